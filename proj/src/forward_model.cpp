#include "radar/forward_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "radar/error.hpp"
#include "radar/kernels.hpp"

namespace radar {

SensingMatrix::SensingMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries,
                             std::optional<SensingProvenance> provenance)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), provenance_(std::move(provenance))
{
    if (entries_.size() != rows_ * cols_) throw InvalidArgument("SensingMatrix: entry count does not match shape");
    gram_.resize(cols_ * cols_);
    kernels::parallel::gram_real(entries_, rows_, cols_, gram_);
}

SensingMatrix SensingMatrix::from_real(std::size_t rows, std::size_t cols, std::span<const double> entries)
{
    std::vector<cplx> c(entries.begin(), entries.end());
    return SensingMatrix(rows, cols, std::move(c));
}

std::vector<cplx> SensingMatrix::apply(std::span<const double> x) const
{
    if (x.size() != cols_) throw InvalidArgument("SensingMatrix::apply: dimension mismatch");
    std::vector<cplx> y(rows_);
    kernels::parallel::matvec_real_input(entries_, rows_, cols_, x, y);
    return y;
}

std::vector<double> SensingMatrix::adjoint_real(std::span<const cplx> s) const
{
    if (s.size() != rows_) throw InvalidArgument("SensingMatrix::adjoint_real: dimension mismatch");
    std::vector<double> out(cols_);
    kernels::parallel::adjoint_real(entries_, rows_, cols_, s, out);
    return out;
}

std::vector<double> SensingMatrix::apply_gram(std::span<const double> x) const
{
    std::vector<double> out(cols_);
    apply_gram(x, out);
    return out;
}

void SensingMatrix::apply_gram(std::span<const double> x, std::span<double> out) const
{
    if (x.size() != cols_ || out.size() != cols_) throw InvalidArgument("SensingMatrix::apply_gram: dimension mismatch");
    kernels::parallel::gemv(gram_, cols_, cols_, x, out);
}

SensingMatrix build_sensing_matrix(const FrequencySweep& sweep, const ArrayGeometry& array, const DoiGrid& grid)
{
    const std::size_t nf = sweep.freqs.size();
    const std::size_t k_count = array.size();
    const std::size_t p_count = grid.size();
    const auto r = distances(array, grid);

    std::vector<cplx> entries(nf * k_count * p_count);
    // Phase 4 pi f R / c is reduced to a fraction of a cycle first so entries stay
    // accurate to ~1e-15 even though the raw phase is in the thousands of radians.
    for (std::size_t k = 0; k < k_count; ++k) {
        for (std::size_t n = 0; n < nf; ++n) {
            cplx* row = entries.data() + (k * nf + n) * p_count;
            for (std::size_t p = 0; p < p_count; ++p) {
                const double cycles = 2.0 * sweep.freqs[n] * r[k * p_count + p] / kSpeedOfLight;
                const double phase = -2.0 * std::numbers::pi * (cycles - std::round(cycles));
                row[p] = {std::cos(phase), std::sin(phase)};
            }
        }
    }
    return SensingMatrix(nf * k_count, p_count, std::move(entries), SensingProvenance{sweep, array, grid});
}

Echo synthesize_echo(const SensingMatrix& a, const RcsMap& eps)
{
    if (eps.values.size() != a.cols()) throw InvalidArgument("synthesize_echo: RCS map length does not match the sensing matrix");
    return Echo{a.apply(eps.values), std::nullopt};
}

double noise_variance(const Echo& echo, double snr_db)
{
    double power = 0.0;
    for (const cplx& v : echo.samples) power += std::norm(v);
    power /= static_cast<double>(echo.samples.size());
    return power / std::pow(10.0, snr_db / 10.0);
}

Echo add_awgn(const Echo& echo, std::optional<double> snr_db, std::uint64_t seed)
{
    if (!snr_db || std::isinf(*snr_db)) return echo;
    const double variance = noise_variance(echo, *snr_db);
    if (!(variance > 0.0)) throw InvalidArgument("add_awgn: cannot set a finite SNR on a zero echo");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    Echo out{echo.samples, snr_db};
    for (cplx& v : out.samples) {
        const double re = normal(rng);
        const double im = normal(rng);
        v += cplx(re, im);
    }
    return out;
}

} // namespace radar
