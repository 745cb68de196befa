#include "radar/fista.hpp"

#include <algorithm>
#include <cmath>

#include "radar/error.hpp"

namespace radar {

void FistaConfig::validate() const
{
    if (max_iter < 1) throw InvalidArgument("FistaConfig: max_iter must be >= 1");
    if (!(lambda >= 0.0)) throw InvalidArgument("FistaConfig: lambda must be >= 0");
    if (mu && !(*mu > 0.0)) throw InvalidArgument("FistaConfig: mu must be positive");
}

PowerIterationResult power_iteration_lmax(const SensingMatrix& a, double tol, int max_it)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    std::vector<cplx> v(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    std::vector<cplx> u(m);
    std::vector<cplx> w(n);

    PowerIterationResult result;
    double previous = 0.0;
    for (int it = 1; it <= max_it; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += a.at(i, j) * v[j];
            u[i] = acc;
        }
        double rayleigh = 0.0;
        for (const cplx& x : u) rayleigh += std::norm(x);

        std::fill(w.begin(), w.end(), cplx(0.0));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) w[j] += std::conj(a.at(i, j)) * u[i];
        }
        double norm = 0.0;
        for (const cplx& x : w) norm += std::norm(x);
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) throw InvalidArgument("power_iteration_lmax: matrix annihilates the iterate");
        for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / norm;

        result.value = rayleigh;
        result.iterations = it;
        if (it > 1 && std::abs(rayleigh - previous) <= tol * rayleigh) {
            result.converged = true;
            break;
        }
        previous = rayleigh;
    }
    return result;
}

std::vector<double> soft_threshold(std::span<const double> x, double theta)
{
    if (!(theta >= 0.0)) throw InvalidArgument("soft_threshold: theta must be >= 0");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double mag = std::max(std::abs(x[i]) - theta, 0.0);
        out[i] = x[i] > 0.0 ? mag : (x[i] < 0.0 ? -mag : 0.0);
    }
    return out;
}

double energy(const SensingMatrix& a, const Echo& s, std::span<const double> eps, double lambda)
{
    if (s.samples.size() != a.rows()) throw InvalidArgument("energy: echo length mismatch");
    const auto predicted = a.apply(eps);
    double residual = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) residual += std::norm(s.samples[i] - predicted[i]);
    double l1 = 0.0;
    for (double v : eps) l1 += std::abs(v);
    return 0.5 * residual + lambda * l1;
}

std::vector<double> fista_momentum(int count)
{
    std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
    double t = 1.0;
    for (auto& c : out) {
        const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        c = (t - 1.0) / next;
        t = next;
    }
    return out;
}

SolverResult fista_solve(const SensingMatrix& a, const Echo& s, const FistaConfig& cfg)
{
    cfg.validate();
    if (s.samples.size() != a.rows()) throw InvalidArgument("fista_solve: echo length mismatch");

    const std::size_t n = a.cols();
    const double mu = cfg.mu ? *cfg.mu : 1.0 / power_iteration_lmax(a).value;
    const double theta = cfg.lambda * mu;
    const auto back = a.adjoint_real(s.samples);

    std::vector<double> prev(n, 0.0);
    std::vector<double> cur(n, 0.0);
    std::vector<double> y(n);
    std::vector<double> grad(n);

    SolverResult result;
    if (cfg.record_objective) result.objective_trace.push_back(energy(a, s, cur, cfg.lambda));

    double t = 1.0;
    for (int i = 0; i < cfg.max_iter; ++i) {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double momentum = (t - 1.0) / t_next;
        for (std::size_t j = 0; j < n; ++j) y[j] = cur[j] + momentum * (cur[j] - prev[j]);

        a.apply_gram(y, grad);
        double change = 0.0;
        double size = 0.0;
        bool finite = true;
        for (std::size_t j = 0; j < n; ++j) {
            const double z = y[j] - mu * (grad[j] - back[j]);
            const double mag = std::max(std::abs(z) - theta, 0.0);
            const double next = z > 0.0 ? mag : (z < 0.0 ? -mag : 0.0);
            finite = finite && std::isfinite(next);
            change += (next - cur[j]) * (next - cur[j]);
            size += next * next;
            prev[j] = cur[j];
            cur[j] = next;
        }
        if (!finite) throw DivergedError("fista_solve", static_cast<std::size_t>(i));
        t = t_next;
        result.iterations_run = i + 1;
        if (cfg.record_objective) result.objective_trace.push_back(energy(a, s, cur, cfg.lambda));
        if (cfg.early_stop && std::sqrt(change) <= cfg.stop_tol * std::sqrt(size)) break;
    }
    result.estimate = std::move(cur);
    return result;
}

} // namespace radar
