#pragma once

// Dense inner loops shared by the forward model, the solver and the network.
//
// Every kernel exists twice: `serial` is the plain reference and `parallel`
// splits independent output elements across OpenMP threads. Each output
// element is accumulated in the same order in both, so results are
// bit-identical; tests/unit/test_kernels.cpp checks that.

#include <complex>
#include <cstddef>
#include <span>

namespace radar::kernels {

using cplx = std::complex<double>;

struct ConvShape {
    int height = 0;
    int width = 0;
    int in_channels = 0;
    int out_channels = 0;
};

#define RADAR_KERNEL_DECLS                                                                               \
    /* y = M x, M row-major rows x cols */                                                               \
    void gemv(std::span<const double> m, std::size_t rows, std::size_t cols, std::span<const double> x, \
              std::span<double> y);                                                                      \
    /* y = A x for complex A and real x */                                                               \
    void matvec_real_input(std::span<const cplx> a, std::size_t rows, std::size_t cols,                  \
                           std::span<const double> x, std::span<cplx> y);                                \
    /* out = Re(A^H s) */                                                                                \
    void adjoint_real(std::span<const cplx> a, std::size_t rows, std::size_t cols,                       \
                      std::span<const cplx> s, std::span<double> out);                                   \
    /* G = Re(A^H A), cols x cols */                                                                     \
    void gram_real(std::span<const cplx> a, std::size_t rows, std::size_t cols, std::span<double> g);   \
    /* 3x3 same-padded cross-correlation. x: H x W x Cin, kernel: 3 x 3 x Cin x Cout */                  \
    void conv3x3_forward(std::span<const double> x, ConvShape shape, std::span<const double> kernel,    \
                         std::span<const double> bias, std::span<double> y);                             \
    void conv3x3_backward_input(std::span<const double> dy, ConvShape shape,                             \
                                std::span<const double> kernel, std::span<double> dx);                   \
    void conv3x3_backward_weights(std::span<const double> x, std::span<const double> dy,                \
                                  ConvShape shape, std::span<double> dkernel, std::span<double> dbias);

namespace serial {
RADAR_KERNEL_DECLS
}

namespace parallel {
RADAR_KERNEL_DECLS
}

#undef RADAR_KERNEL_DECLS

/// Number of OpenMP threads available to `parallel` kernels (1 without OpenMP).
int max_threads();

} // namespace radar::kernels
