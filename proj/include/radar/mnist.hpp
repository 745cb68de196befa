#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "radar/geometry.hpp"

namespace radar {

struct Raster {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> bytes;  // row-major
};

/// Reads an IDX3 image file (magic 0x00000803). Throws FormatError with the failing byte offset.
std::vector<Raster> read_mnist_idx(const std::filesystem::path& path);

/// Reads an IDX1 label file (magic 0x00000801).
std::vector<std::uint8_t> read_mnist_labels(const std::filesystem::path& path);

/// Byte / 255, row-major. Only 28 x 28 rasters are accepted.
RcsMap mnist_to_rcs(const Raster& image);

/// Inverse of mnist_to_rcs for values produced by it (round(v * 255)).
Raster rcs_to_raster(const RcsMap& map, int side);

struct SplitSizes {
    std::size_t train = 800;
    std::size_t val = 200;
    std::size_t test = 1000;
};

struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Draws disjoint random index sets from [0, available). Deterministic per seed.
DatasetSplit split_dataset(std::size_t available, std::uint64_t seed, SplitSizes sizes = {});

} // namespace radar
