#include "radar/shapes.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "radar/error.hpp"
#include "radar/io.hpp"

namespace radar {
namespace {

struct Glyph {
    char letter;
    std::array<const char*, 7> rows;
};

constexpr std::array<Glyph, 8> kFont{{
    {'A', {" ### ", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
    {'E', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####"}},
    {'F', {"#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#    "}},
    {'H', {"#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #"}},
    {'L', {"#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####"}},
    {'T', {"#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  "}},
    {'X', {"#   #", "#   #", " # # ", "  #  ", " # # ", "#   #", "#   #"}},
    {'Z', {"#####", "    #", "   # ", "  #  ", " #   ", "#    ", "#####"}},
}};

RcsMap blank(int side)
{
    return RcsMap{std::vector<double>(static_cast<std::size_t>(side) * side, 0.0)};
}

} // namespace

RcsMap shape_rectangle(int side)
{
    RcsMap m = blank(side);
    for (int r = side / 4; r < side - side / 4; ++r) {
        for (int c = side / 3; c < side - side / 3; ++c) m.values[r * side + c] = 1.0;
    }
    return m;
}

RcsMap shape_cross(int side)
{
    RcsMap m = blank(side);
    const int lo = side / 2 - 2;
    const int hi = side / 2 + 2;
    for (int r = 4; r < side - 4; ++r) {
        for (int c = 4; c < side - 4; ++c) {
            if ((r >= lo && r < hi) || (c >= lo && c < hi)) m.values[r * side + c] = 1.0;
        }
    }
    return m;
}

RcsMap shape_ring(int side)
{
    RcsMap m = blank(side);
    const double center = 0.5 * (side - 1);
    const double outer = 0.36 * side;
    const double inner = 0.22 * side;
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const double d = std::hypot(r - center, c - center);
            if (d <= outer && d >= inner) m.values[r * side + c] = 1.0;
        }
    }
    return m;
}

RcsMap shape_letter(char letter, int side)
{
    for (const auto& g : kFont) {
        if (g.letter != letter) continue;
        constexpr int scale = 3;
        RcsMap m = blank(side);
        const int top = (side - 7 * scale) / 2;
        const int left = (side - 5 * scale) / 2;
        for (int gr = 0; gr < 7; ++gr) {
            for (int gc = 0; gc < 5; ++gc) {
                if (g.rows[gr][gc] != '#') continue;
                for (int dr = 0; dr < scale; ++dr) {
                    for (int dc = 0; dc < scale; ++dc) {
                        const int r = top + gr * scale + dr;
                        const int c = left + gc * scale + dc;
                        if (r >= 0 && r < side && c >= 0 && c < side) m.values[r * side + c] = 1.0;
                    }
                }
            }
        }
        return m;
    }
    throw InvalidArgument(std::string("shape_letter: no glyph for '") + letter + "'");
}

std::vector<NamedShape> builtin_shapes(int side)
{
    std::vector<NamedShape> out{
        {"rectangle", shape_rectangle(side)},
        {"cross", shape_cross(side)},
        {"ring", shape_ring(side)},
    };
    for (char c : {'E', 'F', 'H', 'L', 'T', 'X'}) out.push_back({std::string("letter-") + c, shape_letter(c, side)});
    return out;
}

RcsMap load_shape_pgm(const std::filesystem::path& path, int side)
{
    const std::string bytes = read_file(path);
    std::istringstream in(bytes);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || !in || maxval != 255) throw FormatError("expected a binary 8-bit PGM in " + path.string(), 0);
    if (w != side || h != side) throw InvalidArgument("shape image must be " + std::to_string(side) + "x" + std::to_string(side));
    in.get();
    const auto offset = static_cast<std::size_t>(in.tellg());
    if (bytes.size() < offset + static_cast<std::size_t>(w) * h) throw FormatError("PGM payload truncated", bytes.size());
    RcsMap m = blank(side);
    for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = static_cast<unsigned char>(bytes[offset + i]) / 255.0;
    return m;
}

} // namespace radar
