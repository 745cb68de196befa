#pragma once

#include <cstddef>
#include <vector>

namespace radar {

// Engineering value; the worked geometry (5 mm spacing at 30 GHz) assumes it.
inline constexpr double kSpeedOfLight = 3.0e8;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Square imaging domain meshed into side_cells x side_cells cells.
/// Cell p = row * side_cells + col; row 0 sits at the largest y.
struct DoiGrid {
    int side_cells = 0;
    double cell_size = 0.0;
    std::vector<Point2> centers;

    std::size_t size() const { return centers.size(); }
};

struct ArrayGeometry {
    std::vector<Point2> positions;

    std::size_t size() const { return positions.size(); }
};

/// f_n = f0 + (B / Nf) * n for n = 0 .. Nf-1.
struct FrequencySweep {
    double f0 = 0.0;
    double bandwidth = 0.0;
    int n_freqs = 0;
    std::vector<double> freqs;

    double step() const { return bandwidth / n_freqs; }
};

/// Real RCS amplitudes in [0, 1], one per DOI cell.
struct RcsMap {
    std::vector<double> values;
};

DoiGrid build_doi_grid(int side_cells, double cell_size);

/// Uniform linear array of k elements on y = standoff, spacing c / (2 f0), centered on x = 0.
ArrayGeometry build_ula(int k, double f0, double standoff);

FrequencySweep build_sweep(double f0, double bandwidth, int n_freqs);

/// Row-major K x P matrix of antenna-to-cell distances.
std::vector<double> distances(const ArrayGeometry& array, const DoiGrid& grid);

} // namespace radar
