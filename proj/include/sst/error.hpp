#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sst {

/// An argument violated an operation's documented precondition.
class invalid_input_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed binary or text input; carries the byte offset of the first
/// offending byte.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& message, std::size_t byte_offset)
        : std::runtime_error(message + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A configuration value violates a constraint; names the offending key.
class config_error : public std::runtime_error {
public:
    config_error(const std::string& key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(key) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Structurally valid input with no usable numerical content
/// (zero spread, empty support).
class degenerate_input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class training_diverged_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sst
