// Serial reference vs OpenMP kernels at the sizes used by the imaging pipeline.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "radar/kernels.hpp"

namespace {

using radar::kernels::ConvShape;
using radar::kernels::cplx;

constexpr std::size_t kRows = 200;  // 4 antennas x 50 frequencies
constexpr std::size_t kCols = 784;  // 28 x 28 cells

std::vector<double> random_real(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

std::vector<cplx> random_complex(std::size_t n, unsigned seed)
{
    const auto re = random_real(n, seed);
    const auto im = random_real(n, seed + 1);
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
    return v;
}

template <auto Fn>
void bm_gemv(benchmark::State& state)
{
    const auto g = random_real(kCols * kCols, 1);
    const auto x = random_real(kCols, 2);
    std::vector<double> y(kCols);
    for (auto _ : state) {
        Fn(g, kCols, kCols, x, y);
        benchmark::DoNotOptimize(y.data());
    }
}

template <auto Fn>
void bm_matvec(benchmark::State& state)
{
    const auto a = random_complex(kRows * kCols, 3);
    const auto x = random_real(kCols, 4);
    std::vector<cplx> y(kRows);
    for (auto _ : state) {
        Fn(a, kRows, kCols, x, y);
        benchmark::DoNotOptimize(y.data());
    }
}

template <auto Fn>
void bm_adjoint(benchmark::State& state)
{
    const auto a = random_complex(kRows * kCols, 5);
    const auto s = random_complex(kRows, 6);
    std::vector<double> out(kCols);
    for (auto _ : state) {
        Fn(a, kRows, kCols, s, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <auto Fn>
void bm_gram(benchmark::State& state)
{
    const auto a = random_complex(kRows * kCols, 7);
    std::vector<double> g(kCols * kCols);
    for (auto _ : state) {
        Fn(a, kRows, kCols, g);
        benchmark::DoNotOptimize(g.data());
    }
}

template <auto Fn>
void bm_conv(benchmark::State& state)
{
    const ConvShape shape{28, 28, 14, 14};
    const auto x = random_real(28 * 28 * 14, 8);
    const auto k = random_real(9 * 14 * 14, 9);
    const auto b = random_real(14, 10);
    std::vector<double> y(28 * 28 * 14);
    for (auto _ : state) {
        Fn(x, shape, k, b, y);
        benchmark::DoNotOptimize(y.data());
    }
}

template <auto Fn>
void bm_conv_backward_weights(benchmark::State& state)
{
    const ConvShape shape{28, 28, 14, 14};
    const auto x = random_real(28 * 28 * 14, 11);
    const auto dy = random_real(28 * 28 * 14, 12);
    std::vector<double> dk(9 * 14 * 14);
    std::vector<double> db(14);
    for (auto _ : state) {
        Fn(x, dy, shape, dk, db);
        benchmark::DoNotOptimize(dk.data());
    }
}

namespace s = radar::kernels::serial;
namespace p = radar::kernels::parallel;

BENCHMARK(bm_gemv<s::gemv>)->Name("gemv_gram/serial");
BENCHMARK(bm_gemv<p::gemv>)->Name("gemv_gram/parallel");
BENCHMARK(bm_matvec<s::matvec_real_input>)->Name("matvec_real_input/serial");
BENCHMARK(bm_matvec<p::matvec_real_input>)->Name("matvec_real_input/parallel");
BENCHMARK(bm_adjoint<s::adjoint_real>)->Name("adjoint_real/serial");
BENCHMARK(bm_adjoint<p::adjoint_real>)->Name("adjoint_real/parallel");
BENCHMARK(bm_gram<s::gram_real>)->Name("gram_real/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gram<p::gram_real>)->Name("gram_real/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(bm_conv<s::conv3x3_forward>)->Name("conv3x3_forward/serial");
BENCHMARK(bm_conv<p::conv3x3_forward>)->Name("conv3x3_forward/parallel");
BENCHMARK(bm_conv_backward_weights<s::conv3x3_backward_weights>)->Name("conv3x3_backward_weights/serial");
BENCHMARK(bm_conv_backward_weights<p::conv3x3_backward_weights>)->Name("conv3x3_backward_weights/parallel");

} // namespace

BENCHMARK_MAIN();
