#pragma once

#include <optional>
#include <span>
#include <vector>

#include "radar/forward_model.hpp"

namespace radar {

struct FistaConfig {
    double lambda = 0.001;
    int max_iter = 2000;
    std::optional<double> mu;  // defaults to 1 / lambda_max(A^H A)
    bool record_objective = false;
    bool early_stop = false;   // stop when ||x_new - x|| <= stop_tol * ||x_new||
    double stop_tol = 1e-8;

    void validate() const;
};

struct SolverResult {
    std::vector<double> estimate;
    std::vector<double> objective_trace;  // E(x_0), E(x_1), ... when recorded
    int iterations_run = 0;
};

struct PowerIterationResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Largest eigenvalue of A^H A by power iteration from the normalized all-ones vector.
/// Stops when the Rayleigh quotient changes by at most tol (relative).
PowerIterationResult power_iteration_lmax(const SensingMatrix& a, double tol = 1e-8, int max_it = 500);

/// sign(x) max(|x| - theta, 0), elementwise.
std::vector<double> soft_threshold(std::span<const double> x, double theta);

/// 1/2 ||s - A eps||^2 + lambda ||eps||_1
double energy(const SensingMatrix& a, const Echo& s, std::span<const double> eps, double lambda);

/// FISTA momentum weight (t_i - 1) / t_{i+1} for iterations i = 0 .. count-1, with
/// t_0 = 1 and t_{i+1} = (1 + sqrt(1 + 4 t_i^2)) / 2.
std::vector<double> fista_momentum(int count);

/// Accelerated proximal gradient on E(eps) over real eps, starting from zero.
/// Throws DivergedError naming the iteration if the iterate becomes non-finite.
SolverResult fista_solve(const SensingMatrix& a, const Echo& s, const FistaConfig& cfg);

} // namespace radar
