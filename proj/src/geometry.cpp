#include "radar/geometry.hpp"

#include <cmath>

#include "radar/error.hpp"

namespace radar {

DoiGrid build_doi_grid(int side_cells, double cell_size)
{
    if (side_cells < 1) throw InvalidArgument("build_doi_grid: side_cells must be >= 1");
    if (!(cell_size > 0.0)) throw InvalidArgument("build_doi_grid: cell_size must be positive");

    DoiGrid grid;
    grid.side_cells = side_cells;
    grid.cell_size = cell_size;
    grid.centers.reserve(static_cast<std::size_t>(side_cells) * side_cells);
    const double half = 0.5 * (side_cells - 1);
    for (int row = 0; row < side_cells; ++row) {
        for (int col = 0; col < side_cells; ++col) {
            grid.centers.push_back({(col - half) * cell_size, (half - row) * cell_size});
        }
    }
    return grid;
}

ArrayGeometry build_ula(int k, double f0, double standoff)
{
    if (k < 1) throw InvalidArgument("build_ula: need at least one antenna");
    if (!(f0 > 0.0)) throw InvalidArgument("build_ula: f0 must be positive");

    const double spacing = kSpeedOfLight / (2.0 * f0);
    const double half = 0.5 * (k - 1);
    ArrayGeometry array;
    array.positions.reserve(k);
    for (int i = 0; i < k; ++i) array.positions.push_back({(i - half) * spacing, standoff});
    return array;
}

FrequencySweep build_sweep(double f0, double bandwidth, int n_freqs)
{
    if (n_freqs < 1) throw InvalidArgument("build_sweep: n_freqs must be >= 1");
    if (!(f0 > 0.0) || !(bandwidth > 0.0)) throw InvalidArgument("build_sweep: f0 and bandwidth must be positive");

    FrequencySweep sweep{f0, bandwidth, n_freqs, {}};
    sweep.freqs.resize(n_freqs);
    const double step = bandwidth / n_freqs;
    for (int n = 0; n < n_freqs; ++n) sweep.freqs[n] = f0 + step * n;
    return sweep;
}

std::vector<double> distances(const ArrayGeometry& array, const DoiGrid& grid)
{
    const std::size_t p_count = grid.size();
    std::vector<double> r(array.size() * p_count);
    for (std::size_t k = 0; k < array.size(); ++k) {
        const Point2 a = array.positions[k];
        for (std::size_t p = 0; p < p_count; ++p) {
            const Point2 c = grid.centers[p];
            r[k * p_count + p] = std::hypot(a.x - c.x, a.y - c.y);
        }
    }
    return r;
}

} // namespace radar
