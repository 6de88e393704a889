#include "sst/config.hpp"

#include <charconv>
#include <sstream>

#include "sst/error.hpp"
#include "sst/io.hpp"

namespace sst {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw config_error(key, "expected a non-negative integer, got '" + value + "'");
    return out;
}

}  // namespace

std::string format_block_pattern(const std::vector<BlockKind>& blocks) {
    std::string out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) out += ",";
        out += blocks[i] == BlockKind::kAttention ? "attention" : "ssm";
    }
    return out;
}

std::vector<BlockKind> parse_block_pattern(const std::string& text) {
    std::vector<BlockKind> blocks;
    std::stringstream ss(text);
    std::string tag;
    while (std::getline(ss, tag, ',')) {
        tag = trim(tag);
        if (tag == "attention")
            blocks.push_back(BlockKind::kAttention);
        else if (tag == "ssm")
            blocks.push_back(BlockKind::kSsm);
        else
            throw config_error("blocks", "unknown block tag '" + tag + "'");
    }
    return blocks;
}

void PipelineConfig::validate() const {
    if (m1 < 2) throw config_error("m1", "need at least 2 centers");
    if (m2 < 1 || m2 > m1) throw config_error("m2", "must satisfy 1 <= m2 <= m1");
    if (m2 > 65535) throw config_error("m2", "token maps store u16 indices; m2 must be <= 65535");
    if (mask_size < 1 || mask_size > m1)
        throw config_error("mask_size", "must satisfy 1 <= mask_size <= m1");
    if (dicf_k < 1 || dicf_k > m1 - 1)
        throw config_error("dicf_k", "must satisfy 1 <= dicf_k <= m1 - 1");
    if (repeats1 < 1) throw config_error("repeats1", "must be >= 1");
    if (repeats2 < 1) throw config_error("repeats2", "must be >= 1");
    if (channels < 1) throw config_error("channels", "must be >= 1");
    if (blocks.empty()) throw config_error("blocks", "block pattern must not be empty");
    if (blocks.front() != BlockKind::kAttention)
        throw config_error("blocks", "block pattern must start with attention");
}

std::string PipelineConfig::serialize() const {
    std::ostringstream out;
    out << "m1=" << m1 << "\n";
    out << "m2=" << m2 << "\n";
    out << "mask_size=" << mask_size << "\n";
    out << "dicf_k=" << dicf_k << "\n";
    out << "repeats1=" << repeats1 << "\n";
    out << "repeats2=" << repeats2 << "\n";
    out << "channels=" << channels << "\n";
    out << "smoothing_radius=" << smoothing_radius << "\n";
    out << "blocks=" << format_block_pattern(blocks) << "\n";
    out << "seed=" << seed << "\n";
    return out.str();
}

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig config;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(line, "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "m1")
            config.m1 = parse_unsigned(key, value);
        else if (key == "m2")
            config.m2 = parse_unsigned(key, value);
        else if (key == "mask_size")
            config.mask_size = parse_unsigned(key, value);
        else if (key == "dicf_k")
            config.dicf_k = parse_unsigned(key, value);
        else if (key == "repeats1")
            config.repeats1 = static_cast<int>(parse_unsigned(key, value));
        else if (key == "repeats2")
            config.repeats2 = static_cast<int>(parse_unsigned(key, value));
        else if (key == "channels")
            config.channels = parse_unsigned(key, value);
        else if (key == "smoothing_radius")
            config.smoothing_radius = parse_unsigned(key, value);
        else if (key == "blocks")
            config.blocks = parse_block_pattern(value);
        else if (key == "seed")
            config.seed = parse_unsigned(key, value);
        else
            throw config_error(key, "unknown key");
    }
    config.validate();
    return config;
}

PipelineConfig load_config(const std::string& path) {
    return parse_config(read_text_file(path));
}

}  // namespace sst
