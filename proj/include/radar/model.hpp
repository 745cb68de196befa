#pragma once

// Unrolled L-FISTA blocks followed by a residual convolutional refinement head,
// plus the fully connected baseline. Forward passes optionally record the
// activations their backward passes need; gradients are exact reverse mode.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "radar/forward_model.hpp"
#include "radar/tensor.hpp"

namespace radar {

double softplus(double x);
double softplus_inverse(double y);

/// 3x3 convolution weights, kernel laid out [ky][kx][in][out].
struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    std::vector<double> kernel;
    std::vector<double> bias;

    static ConvLayer zeros(int in_channels, int out_channels);
    std::size_t parameter_count() const { return kernel.size() + bias.size(); }
};

/// Same-padded 3x3 cross-correlation of an H x W x Cin tensor.
Tensor conv2d_3x3(const Tensor& x, const ConvLayer& layer);

struct ResBlockParams {
    ConvLayer first;
    ConvLayer second;
};

struct ResHeadParams {
    ConvLayer head;
    std::vector<ResBlockParams> blocks;
    ConvLayer tail;

    static ResHeadParams zeros(int channels, int block_count);
    std::size_t parameter_count() const;
};

/// Applied (positive) step and threshold of one unrolled iteration.
struct LFistaBlockParams {
    double mu = 0.0;
    double theta = 0.0;
};

struct ModelParams {
    // Unconstrained storage; the applied values are softplus(raw).
    std::vector<double> raw_mu;
    std::vector<double> raw_theta;
    ResHeadParams res_head;
    bool frozen_blocks = false;  // FISTA-ResNet baseline: block scalars are not trained

    std::size_t block_count() const { return raw_mu.size(); }
    LFistaBlockParams block(std::size_t i) const { return {softplus(raw_mu[i]), softplus(raw_theta[i])}; }
    void set_block(std::size_t i, LFistaBlockParams b);
    std::size_t parameter_count() const;
    std::size_t trainable_parameter_count() const;
};

struct ModelInit {
    int blocks = 20;
    double lambda = 0.01;  // theta_i = lambda * mu_i
    int channels = 14;
    int res_blocks = 2;
    bool frozen_blocks = false;
    std::uint64_t seed = 1;
};

/// Blocks start as plain FISTA (mu = 1 / lambda_max(A^H A), theta = lambda mu);
/// convolutions get He-normal weights and zero biases, except the tail, which starts at zero.
ModelParams init_model(const SensingMatrix& a, const ModelInit& init);

/// Zero-valued parameters with the same structure (used for gradients).
ModelParams zeros_like(const ModelParams& p);

/// Resets every block to mu = 1 / lambda_max(A^H A), theta = lambda mu.
void retune_blocks(ModelParams& p, const SensingMatrix& a, double lambda);

struct DnnParams {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::size_t outputs = 0;
    double input_scale = 1.0;  // fixed scaling of the Re/Im echo vector, not trained
    std::vector<double> w1;    // hidden x inputs
    std::vector<double> b1;
    std::vector<double> w2;    // outputs x hidden
    std::vector<double> b2;

    static DnnParams zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs);
    std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
};

/// Echo length n gives 2n inputs. Glorot-normal weights, zero biases.
DnnParams init_dnn(std::size_t echo_length, std::size_t hidden, std::size_t outputs, std::uint64_t seed);

// ---- uniform parameter access (optimizer state, checkpoints) ----

template <class T>
struct ParamSlot {
    std::string name;
    std::vector<std::size_t> shape;
    std::span<T> values;
    bool trainable = true;
};

std::vector<ParamSlot<double>> param_slots(ModelParams& p);
std::vector<ParamSlot<const double>> param_slots(const ModelParams& p);
std::vector<ParamSlot<double>> param_slots(DnnParams& p);
std::vector<ParamSlot<const double>> param_slots(const DnnParams& p);

// ---- forward / backward ----

struct LFistaCache {
    std::vector<std::vector<double>> x;         // x_0 .. x_{N+1}
    std::vector<std::vector<double>> y;         // momentum point per block
    std::vector<std::vector<double>> residual;  // Re(A^H A) y - Re(A^H s) per block
    std::vector<std::vector<double>> pre;       // pre-ReLU value per block
};

struct ResHeadCache {
    std::vector<double> input;
    std::vector<double> head_pre;
    std::vector<std::vector<double>> block_in;
    std::vector<std::vector<double>> block_mid_pre;
    std::vector<std::vector<double>> block_sum;
    std::vector<double> tail_in;
};

struct ModelCache {
    LFistaCache lfista;
    ResHeadCache res;
};

struct DnnCache {
    std::vector<double> input;
    std::vector<double> hidden_pre;
};

/// Unrolled blocks only. Throws DivergedError naming the block on a non-finite activation.
Tensor lfista_forward(const SensingMatrix& a, const Echo& s, const ModelParams& p, LFistaCache* cache = nullptr);

/// Refinement head on a side x side map.
Tensor resnet_forward(const Tensor& coarse, const ResHeadParams& p, ResHeadCache* cache = nullptr);

/// Full pipeline; output has shape {side, side} and is not clamped.
Tensor model_forward(const SensingMatrix& a, const Echo& s, const ModelParams& p, ModelCache* cache = nullptr);

/// Gradients of a scalar loss given dL/d(output). `grads` must be shaped like `p`
/// (see zeros_like); it is overwritten. Block-scalar gradients are zero when frozen.
void model_backward(const SensingMatrix& a, const ModelParams& p, const ModelCache& cache,
                    std::span<const double> d_output, ModelParams& grads);

/// Backward through the refinement head alone; returns dL/d(coarse).
std::vector<double> resnet_backward(const ResHeadParams& p, const ResHeadCache& cache,
                                    std::span<const double> d_output, ResHeadParams& grads);

Tensor dnn_forward(const Echo& s, const DnnParams& p, DnnCache* cache = nullptr);
void dnn_backward(const DnnParams& p, const DnnCache& cache, std::span<const double> d_output, DnnParams& grads);

/// Side length of a square grid with `cells` cells; throws if not square.
int square_side(std::size_t cells);

} // namespace radar
