#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "radar/error.hpp"
#include "radar/fista.hpp"
#include "radar/forward_model.hpp"

using namespace radar;

namespace {

SensingMatrix table_matrix()
{
    return build_sensing_matrix(build_sweep(30e9, 5e9, 50), build_ula(4, 30e9, 2.0), build_doi_grid(28, 0.01));
}

SensingMatrix column_subset(const SensingMatrix& a, std::size_t first, std::size_t count)
{
    std::vector<cplx> e;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = first; j < first + count; ++j) e.push_back(a.at(i, j));
    }
    return SensingMatrix(a.rows(), count, std::move(e));
}

Eigen::MatrixXcd to_eigen(const SensingMatrix& a)
{
    Eigen::MatrixXcd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a.at(i, j);
    }
    return m;
}

} // namespace

TEST_CASE("power iteration: toy matrices")
{
    std::vector<double> eye(16, 0.0);
    for (int i = 0; i < 4; ++i) eye[i * 5] = 1.0;
    CHECK(power_iteration_lmax(SensingMatrix::from_real(4, 4, eye)).value == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> two = {2.0};
    const auto r = power_iteration_lmax(SensingMatrix::from_real(1, 1, two));
    CHECK(r.value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(1.0 / r.value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("power iteration matches a dense eigensolver on a 20-column submatrix")
{
    const SensingMatrix full = table_matrix();
    for (std::size_t first : {0u, 382u, 764u}) {
        const SensingMatrix sub = column_subset(full, first, 20);
        const Eigen::MatrixXcd m = to_eigen(sub);
        const Eigen::MatrixXcd normal = m.adjoint() * m;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(normal);
        const double oracle = eig.eigenvalues().maxCoeff();
        const auto r = power_iteration_lmax(sub);
        CHECK(std::abs(r.value - oracle) / oracle < 1e-6);
    }
}

TEST_CASE("gradient step operator I - mu Re(A^H A) has spectral radius <= 1")
{
    const SensingMatrix sub = column_subset(table_matrix(), 100, 20);
    const double mu = 1.0 / power_iteration_lmax(sub).value;
    Eigen::MatrixXd g(20, 20);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) g(i, j) = sub.gram()[i * 20 + j];
    }
    const Eigen::MatrixXd op = Eigen::MatrixXd::Identity(20, 20) - mu * g;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op);
    CHECK(eig.eigenvalues().cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
}

TEST_CASE("soft threshold examples")
{
    const std::vector<double> x = {1.2, -1.2, 0.3, -0.3, 0.5};
    const auto y = soft_threshold(x, 0.5);
    CHECK(y[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(-0.7).epsilon(1e-15));
    CHECK(y[2] == 0.0);
    CHECK(y[3] == 0.0);
    CHECK(y[4] == 0.0);
    CHECK(soft_threshold(x, 0.0) == x);
}

TEST_CASE("soft threshold is non-expansive")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(16), b(16);
        for (auto& v : a) v = d(rng);
        for (auto& v : b) v = d(rng);
        const double theta = std::abs(d(rng));
        const auto sa = soft_threshold(a, theta), sb = soft_threshold(b, theta);
        double lhs = 0, rhs = 0;
        for (int i = 0; i < 16; ++i) {
            lhs += (sa[i] - sb[i]) * (sa[i] - sb[i]);
            rhs += (a[i] - b[i]) * (a[i] - b[i]);
        }
        CHECK(lhs <= rhs + 1e-15);
    }
}

TEST_CASE("t-recurrence")
{
    const auto m = fista_momentum(3);
    const double t1 = (1 + std::sqrt(5.0)) / 2;
    const double t2 = (1 + std::sqrt(1 + 4 * t1 * t1)) / 2;
    CHECK(std::abs(t1 - 1.618034) < 1e-6);
    CHECK(std::abs(t2 - 2.193527) < 1e-6);
    CHECK(std::abs(t2 - 2.193544) < 5e-5);  // commonly quoted rounding
    CHECK(m[0] == 0.0);
    CHECK(m[1] == doctest::Approx((t1 - 1) / t2).epsilon(1e-15));
}

TEST_CASE("energy examples")
{
    const SensingMatrix a = table_matrix();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RcsMap truth;
    for (int p = 0; p < 784; ++p) truth.values.push_back(u(rng) < 0.1 ? u(rng) : 0.0);
    const Echo s = synthesize_echo(a, truth);

    double l1 = 0;
    for (double v : truth.values) l1 += std::abs(v);
    CHECK(energy(a, s, truth.values, 0.01) == doctest::Approx(0.01 * l1).epsilon(1e-9));

    double half_norm = 0;
    for (const cplx& v : s.samples) half_norm += std::norm(v);
    CHECK(energy(a, s, std::vector<double>(784, 0.0), 0.5) == doctest::Approx(half_norm / 2).epsilon(1e-12));

    std::vector<double> x(784);
    for (auto& v : x) v = u(rng) - 0.5;
    const auto ax = a.apply(x);
    double fit = 0, reg = 0;
    for (std::size_t i = 0; i < ax.size(); ++i) fit += std::norm(s.samples[i] - ax[i]);
    for (double v : x) reg += std::abs(v);
    CHECK(energy(a, s, x, 0.003) == doctest::Approx(0.5 * fit + 0.003 * reg).epsilon(1e-12));
}

TEST_CASE("identity operator reaches the closed-form soft-threshold solution")
{
    std::vector<double> eye(16, 0.0);
    for (int i = 0; i < 4; ++i) eye[i * 5] = 1.0;
    const SensingMatrix a = SensingMatrix::from_real(4, 4, eye);
    Echo s{{1.0, 0.2, -0.8, 0.0}, std::nullopt};
    FistaConfig cfg;
    cfg.lambda = 0.5;
    cfg.mu = 1.0;
    cfg.max_iter = 500;
    cfg.record_objective = true;
    const auto r = fista_solve(a, s, cfg);
    const double expected[] = {0.5, 0.0, -0.3, 0.0};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(r.estimate[i] - expected[i]) < 1e-4);
    CHECK(r.iterations_run == 500);
    CHECK(r.objective_trace.size() == 501);
}

TEST_CASE("zero echo stays at zero")
{
    const SensingMatrix a = table_matrix();
    FistaConfig cfg;
    cfg.max_iter = 50;
    const auto r = fista_solve(a, Echo{std::vector<cplx>(200), std::nullopt}, cfg);
    for (double v : r.estimate) CHECK(v == 0.0);
}

TEST_CASE("endpoint energy decreases on a noise-free digit-like scene")
{
    const SensingMatrix a = table_matrix();
    RcsMap truth{std::vector<double>(784, 0.0)};
    for (int r = 8; r < 20; ++r) truth.values[r * 28 + 14] = 1.0;
    const Echo s = synthesize_echo(a, truth);
    FistaConfig cfg;
    cfg.max_iter = 100;
    cfg.record_objective = true;
    const auto r = fista_solve(a, s, cfg);
    CHECK(r.objective_trace.back() < r.objective_trace.front());
    CHECK(r.objective_trace.front() == doctest::Approx(energy(a, s, std::vector<double>(784, 0.0), cfg.lambda)));
}

TEST_CASE("invalid configs and divergence")
{
    FistaConfig cfg;
    cfg.max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg.max_iter = 10;
    cfg.lambda = -1;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg.lambda = 0.1;
    cfg.mu = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);

    // A step far above 2 / L makes the iterates blow up.
    const std::vector<double> two = {2.0};
    const SensingMatrix a = SensingMatrix::from_real(1, 1, two);
    cfg.mu = 10.0;
    cfg.lambda = 0.0;
    cfg.max_iter = 2000;
    try {
        fista_solve(a, Echo{{cplx(1.0, 0.0)}, std::nullopt}, cfg);
        FAIL("expected divergence");
    } catch (const DivergedError& e) {
        CHECK(e.index() > 0);
    }
}
