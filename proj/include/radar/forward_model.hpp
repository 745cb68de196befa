#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "radar/geometry.hpp"

namespace radar {

using cplx = std::complex<double>;

struct SensingProvenance {
    FrequencySweep sweep;
    ArrayGeometry array;
    DoiGrid grid;
};

/// Complex (Nf K) x P matrix mapping an RCS map to stacked per-antenna echoes,
/// together with the real normal matrix Re(A^H A) used by every solver.
/// Immutable once built.
class SensingMatrix {
public:
    SensingMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries,
                  std::optional<SensingProvenance> provenance = std::nullopt);

    /// Convenience for toy problems with a real matrix.
    static SensingMatrix from_real(std::size_t rows, std::size_t cols, std::span<const double> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    cplx at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    std::span<const cplx> entries() const { return entries_; }
    /// Re(A^H A), cols x cols, row-major and exactly symmetric.
    std::span<const double> gram() const { return gram_; }
    const std::optional<SensingProvenance>& provenance() const { return provenance_; }

    /// A x for a real vector x.
    std::vector<cplx> apply(std::span<const double> x) const;
    /// Re(A^H s).
    std::vector<double> adjoint_real(std::span<const cplx> s) const;
    /// Re(A^H A) x.
    std::vector<double> apply_gram(std::span<const double> x) const;
    void apply_gram(std::span<const double> x, std::span<double> out) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<cplx> entries_;
    std::vector<double> gram_;
    std::optional<SensingProvenance> provenance_;
};

/// Entry (k Nf + n, p) = exp(-j 4 pi f_n R_{k,p} / c).
SensingMatrix build_sensing_matrix(const FrequencySweep& sweep, const ArrayGeometry& array, const DoiGrid& grid);

struct Echo {
    std::vector<cplx> samples;
    std::optional<double> snr_db;  // empty for a noise-free echo
};

/// Noise-free echo s = A eps.
Echo synthesize_echo(const SensingMatrix& a, const RcsMap& eps);

/// Per-sample complex noise variance for the requested SNR against the echo's mean power.
double noise_variance(const Echo& echo, double snr_db);

/// Adds circularly-symmetric complex Gaussian noise. An empty or infinite snr_db
/// returns the echo unchanged.
Echo add_awgn(const Echo& echo, std::optional<double> snr_db, std::uint64_t seed);

} // namespace radar
