#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "radar/geometry.hpp"

namespace radar {

struct NamedShape {
    std::string name;
    RcsMap map;
};

RcsMap shape_rectangle(int side = 28);
RcsMap shape_cross(int side = 28);
RcsMap shape_ring(int side = 28);
/// Block letter from a 5x7 bitmap font scaled by 3; supports A E F H L T X Z.
RcsMap shape_letter(char letter, int side = 28);

/// Rectangle, cross, ring and a handful of letters.
std::vector<NamedShape> builtin_shapes(int side = 28);

/// Loads a binary PGM (P5, maxval 255) of size side x side as an RCS map.
RcsMap load_shape_pgm(const std::filesystem::path& path, int side = 28);

} // namespace radar
