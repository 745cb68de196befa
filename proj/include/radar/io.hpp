#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radar/forward_model.hpp"

namespace radar {

/// Echo file: text header
///   radar-echo 1 / count / length / f0 / bandwidth / n_freqs / antennas / snr_db / seed / end
/// followed by count * length complex samples as interleaved little-endian binary64 (re, im).
struct EchoContainer {
    double f0 = 0.0;
    double bandwidth = 0.0;
    int n_freqs = 0;
    int antennas = 0;
    std::optional<double> snr_db;  // "none" on disk
    std::uint64_t seed = 0;
    std::size_t length = 0;
    std::vector<Echo> echoes;
};

std::string serialize_echoes(const EchoContainer& c);
EchoContainer parse_echoes(const std::string& bytes);
void save_echoes(const std::filesystem::path& path, const EchoContainer& c);
EchoContainer load_echoes(const std::filesystem::path& path);

/// Real maps (ground truth or reconstructions): text header
///   radar-map 1 / count / length / end
/// followed by count * length little-endian binary64 values.
struct MapContainer {
    std::size_t length = 0;
    std::vector<std::vector<double>> maps;
};

std::string serialize_maps(const MapContainer& c);
MapContainer parse_maps(const std::string& bytes);
void save_maps(const std::filesystem::path& path, const MapContainer& c);
MapContainer load_maps(const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255). Values are clamped to [0, 1] and rounded half up.
std::string encode_pgm(std::span<const double> values, int rows, int cols);
void render_image(std::span<const double> values, int rows, int cols, const std::filesystem::path& path);

/// Tiles equally sized square maps into a grid with one-pixel white separators.
/// tiles[r][c] is the map shown at grid row r, column c.
struct Canvas {
    int rows = 0;
    int cols = 0;
    std::vector<double> pixels;
};
Canvas tile_maps(const std::vector<std::vector<std::vector<double>>>& tiles, int side);

/// Minimal line chart of several series over shared x values (white background, black axes).
Canvas plot_curves(std::span<const double> x, const std::vector<std::vector<double>>& series, int width = 320,
                   int height = 200);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

} // namespace radar
