#include "sst/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "sst/error.hpp"

namespace sst {

namespace {

void append_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xffu));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xffu));
}

void append_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

void append_f32(std::vector<unsigned char>& out, float v) {
    append_u32(out, std::bit_cast<std::uint32_t>(v));
}

struct Reader {
    const std::vector<unsigned char>& bytes;
    std::size_t pos = 0;

    void require(std::size_t n, const char* what) const {
        if (pos + n > bytes.size())
            throw parse_error(std::string("unexpected end of file while reading ") + what, pos);
    }
    std::uint16_t u16(const char* what) {
        require(2, what);
        const std::uint16_t v = static_cast<std::uint16_t>(bytes[pos]) |
                                static_cast<std::uint16_t>(bytes[pos + 1]) << 8;
        pos += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        require(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
    void magic(const char m[4]) {
        require(4, "magic");
        if (std::memcmp(bytes.data() + pos, m, 4) != 0)
            throw parse_error("bad magic, expected \"" + std::string(m, 4) + "\"", pos);
        pos += 4;
    }
    void done() const {
        if (pos != bytes.size())
            throw parse_error("trailing bytes after declared payload", pos);
    }
};

std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + path + "'", 0);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

void dump(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

constexpr std::uint16_t kFormatVersion = 1;

}  // namespace

void write_cube_file(const std::string& path, const RawCube& cube) {
    if (cube.values.size() != cube.height * cube.width * cube.bands)
        throw invalid_input_error("write_cube_file: value count does not match dimensions");
    std::vector<unsigned char> bytes;
    bytes.reserve(18 + cube.values.size() * 4);
    bytes.insert(bytes.end(), {'H', 'S', 'I', 'C'});
    append_u16(bytes, kFormatVersion);
    append_u32(bytes, static_cast<std::uint32_t>(cube.height));
    append_u32(bytes, static_cast<std::uint32_t>(cube.width));
    append_u32(bytes, static_cast<std::uint32_t>(cube.bands));
    for (double v : cube.values) append_f32(bytes, static_cast<float>(v));
    dump(path, bytes);
}

RawCube read_raw_cube(const std::string& path) {
    const auto bytes = slurp(path);
    Reader r{bytes};
    r.magic("HSIC");
    const std::uint16_t version = r.u16("version");
    if (version != kFormatVersion)
        throw parse_error("unsupported cube file version " + std::to_string(version), 4);
    RawCube cube;
    cube.height = r.u32("height");
    cube.width = r.u32("width");
    cube.bands = r.u32("bands");
    const std::size_t n = cube.height * cube.width * cube.bands;
    cube.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cube.values.push_back(static_cast<double>(r.f32("cube payload")));
    r.done();
    return cube;
}

void write_cube(const std::string& path, const HsiCube& cube) {
    write_cube_file(path, {cube.height(), cube.width(), cube.bands(), cube.values()});
}

HsiCube read_cube(const std::string& path) {
    RawCube raw = read_raw_cube(path);
    return HsiCube(raw.height, raw.width, raw.bands, std::move(raw.values));
}

void write_label_file(const std::string& path, const LabelMap& labels) {
    std::vector<unsigned char> bytes;
    bytes.reserve(16 + labels.labels().size() * 2);
    bytes.insert(bytes.end(), {'H', 'S', 'I', 'L'});
    append_u16(bytes, kFormatVersion);
    append_u32(bytes, static_cast<std::uint32_t>(labels.height()));
    append_u32(bytes, static_cast<std::uint32_t>(labels.width()));
    append_u16(bytes, labels.class_count());
    for (std::uint16_t l : labels.labels()) append_u16(bytes, l);
    dump(path, bytes);
}

LabelMap read_label_file(const std::string& path) {
    const auto bytes = slurp(path);
    Reader r{bytes};
    r.magic("HSIL");
    const std::uint16_t version = r.u16("version");
    if (version != kFormatVersion)
        throw parse_error("unsupported label file version " + std::to_string(version), 4);
    const std::uint32_t h = r.u32("height");
    const std::uint32_t w = r.u32("width");
    const std::uint16_t c = r.u16("class count");
    std::vector<std::uint16_t> labels;
    labels.reserve(static_cast<std::size_t>(h) * w);
    for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i) {
        const std::size_t at = r.pos;
        const std::uint16_t l = r.u16("label payload");
        if (l > c)
            throw parse_error("label " + std::to_string(l) + " exceeds class count " +
                                  std::to_string(c),
                              at);
        labels.push_back(l);
    }
    r.done();
    return LabelMap(h, w, c, std::move(labels));
}

void write_checkpoint(const std::string& path, const ClassifierParams& params) {
    const auto refs = tensor_refs(params);
    std::vector<unsigned char> bytes;
    bytes.insert(bytes.end(), {'S', 'S', 'T', 'P'});
    append_u16(bytes, kFormatVersion);
    append_u32(bytes, static_cast<std::uint32_t>(refs.size()));
    for (const auto& ref : refs) {
        append_u32(bytes, static_cast<std::uint32_t>(ref.tensor->rows()));
        append_u32(bytes, static_cast<std::uint32_t>(ref.tensor->cols()));
    }
    for (const auto& ref : refs)
        for (std::size_t i = 0; i < ref.tensor->size(); ++i)
            append_f32(bytes, static_cast<float>(ref.tensor->data()[i]));
    dump(path, bytes);
}

void read_checkpoint_into(const std::string& path, ClassifierParams& params) {
    const auto bytes = slurp(path);
    Reader r{bytes};
    r.magic("SSTP");
    const std::uint16_t version = r.u16("version");
    if (version != kFormatVersion)
        throw parse_error("unsupported checkpoint version " + std::to_string(version), 4);

    auto refs = tensor_refs(params);
    const std::uint32_t count = r.u32("tensor count");
    if (count != refs.size())
        throw config_error("checkpoint",
                           "tensor count " + std::to_string(count) + " does not match the " +
                               std::to_string(refs.size()) + " expected from the configuration");
    for (const auto& ref : refs) {
        const std::uint32_t rows = r.u32("tensor rows");
        const std::uint32_t cols = r.u32("tensor cols");
        if (rows != ref.tensor->rows() || cols != ref.tensor->cols())
            throw config_error("checkpoint", "tensor '" + ref.name + "' has shape " +
                                                 std::to_string(rows) + "x" + std::to_string(cols) +
                                                 ", expected " + std::to_string(ref.tensor->rows()) +
                                                 "x" + std::to_string(ref.tensor->cols()));
    }
    for (auto& ref : refs)
        for (std::size_t i = 0; i < ref.tensor->size(); ++i)
            ref.tensor->data()[i] = static_cast<double>(r.f32("checkpoint payload"));
    r.done();
}

ClassifierParams read_checkpoint(const std::string& path, std::span<const BlockKind> pattern,
                                 std::size_t feature_dim) {
    // Peek the head width (the last tensor's column count) to size the
    // parameters, then load with full shape validation.
    const auto bytes = slurp(path);
    Reader r{bytes};
    r.magic("SSTP");
    const std::uint16_t version = r.u16("version");
    if (version != kFormatVersion)
        throw parse_error("unsupported checkpoint version " + std::to_string(version), 4);
    const std::uint32_t count = r.u32("tensor count");
    if (count < 1) throw parse_error("checkpoint declares no tensors", 6);
    r.pos += static_cast<std::size_t>(count - 1) * 8;
    r.u32("head rows");
    const std::uint32_t classes = r.u32("head cols");

    ClassifierParams params = init_classifier(pattern, feature_dim, classes, 0);
    read_checkpoint_into(path, params);
    return params;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'", 0);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace sst
