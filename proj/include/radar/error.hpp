#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radar {

// Exception kinds map one-to-one onto the CLI exit codes (see tools/radar_cli.cpp).

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed file content. `offset` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A non-finite value appeared in an iterative computation.
class DivergedError : public std::runtime_error {
public:
    DivergedError(const std::string& where, std::size_t index)
        : std::runtime_error(where + " diverged at index " + std::to_string(index)), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

} // namespace radar
