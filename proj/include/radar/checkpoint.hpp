#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "radar/config.hpp"

namespace radar {

struct NamedArray {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<double> values;

    bool operator==(const NamedArray&) const = default;
};

/// Training snapshot: parameters, optimizer moments and schedule state.
/// On disk: a text manifest (version, scalars, config, array table with byte
/// offsets) terminated by an `end` line, then little-endian binary64 payload.
struct Checkpoint {
    static constexpr int kVersion = 1;

    int version = kVersion;
    std::string method;
    int epoch = 0;
    double best_val_loss = 0.0;
    KeyValues state;   // optimizer / schedule scalars, exact text encoding
    KeyValues config;  // ExperimentConfig snapshot
    std::vector<NamedArray> arrays;

    const NamedArray* find(const std::string& name) const;
    const std::string* state_value(const std::string& key) const;

    bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& c);
/// Throws FormatError for bad magic, unknown version, malformed manifest or truncation.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Hex-float text for exact double round trips in the manifest.
std::string exact_double(double v);
double parse_exact_double(const std::string& s);

} // namespace radar
