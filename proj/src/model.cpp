#include "radar/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "radar/error.hpp"
#include "radar/fista.hpp"
#include "radar/kernels.hpp"

namespace radar {
namespace {

double sigmoid(double x)
{
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void relu_inplace(std::vector<double>& v)
{
    for (double& x : v) x = std::max(x, 0.0);
}

void fill_normal(std::vector<double>& v, double stddev, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, stddev);
    for (double& x : v) x = normal(rng);
}

kernels::ConvShape conv_shape(int side, const ConvLayer& layer)
{
    return {side, side, layer.in_channels, layer.out_channels};
}

std::vector<double> conv_apply(std::span<const double> x, int side, const ConvLayer& layer)
{
    std::vector<double> y(static_cast<std::size_t>(side) * side * layer.out_channels);
    kernels::parallel::conv3x3_forward(x, conv_shape(side, layer), layer.kernel, layer.bias, y);
    return y;
}

// Accumulates weight gradients into `grads` and returns dL/dx.
std::vector<double> conv_backward(std::span<const double> x, std::span<const double> dy, int side,
                                  const ConvLayer& layer, ConvLayer& grads)
{
    const auto shape = conv_shape(side, layer);
    kernels::parallel::conv3x3_backward_weights(x, dy, shape, grads.kernel, grads.bias);
    std::vector<double> dx(static_cast<std::size_t>(side) * side * layer.in_channels);
    kernels::parallel::conv3x3_backward_input(dy, shape, layer.kernel, dx);
    return dx;
}

void mask_by_positive(std::vector<double>& grad, const std::vector<double>& pre)
{
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!(pre[i] > 0.0)) grad[i] = 0.0;
    }
}

template <class T, class P>
std::vector<ParamSlot<T>> model_slots(P& p)
{
    std::vector<ParamSlot<T>> out;
    const bool blocks_trainable = !p.frozen_blocks;
    out.push_back({"lfista.raw_mu", {p.raw_mu.size()}, std::span<T>(p.raw_mu), blocks_trainable});
    out.push_back({"lfista.raw_theta", {p.raw_theta.size()}, std::span<T>(p.raw_theta), blocks_trainable});
    auto add_conv = [&out](const std::string& name, auto& layer) {
        const auto cin = static_cast<std::size_t>(layer.in_channels);
        const auto cout = static_cast<std::size_t>(layer.out_channels);
        out.push_back({name + ".kernel", {3, 3, cin, cout}, std::span<T>(layer.kernel), true});
        out.push_back({name + ".bias", {cout}, std::span<T>(layer.bias), true});
    };
    add_conv("res.head", p.res_head.head);
    for (std::size_t b = 0; b < p.res_head.blocks.size(); ++b) {
        add_conv("res.block" + std::to_string(b) + ".conv0", p.res_head.blocks[b].first);
        add_conv("res.block" + std::to_string(b) + ".conv1", p.res_head.blocks[b].second);
    }
    add_conv("res.tail", p.res_head.tail);
    return out;
}

template <class T, class P>
std::vector<ParamSlot<T>> dnn_slots(P& p)
{
    return {
        {"dnn.dense1.weight", {p.hidden, p.inputs}, std::span<T>(p.w1), true},
        {"dnn.dense1.bias", {p.hidden}, std::span<T>(p.b1), true},
        {"dnn.dense2.weight", {p.outputs, p.hidden}, std::span<T>(p.w2), true},
        {"dnn.dense2.bias", {p.outputs}, std::span<T>(p.b2), true},
    };
}

} // namespace

double softplus(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inverse(double y)
{
    if (!(y > 0.0)) throw InvalidArgument("softplus_inverse: argument must be positive");
    return y > 30.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

int square_side(std::size_t cells)
{
    const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cells))));
    if (static_cast<std::size_t>(side) * side != cells) throw InvalidArgument("grid with " + std::to_string(cells) + " cells is not square");
    return side;
}

ConvLayer ConvLayer::zeros(int in_channels, int out_channels)
{
    ConvLayer l;
    l.in_channels = in_channels;
    l.out_channels = out_channels;
    l.kernel.assign(static_cast<std::size_t>(9) * in_channels * out_channels, 0.0);
    l.bias.assign(static_cast<std::size_t>(out_channels), 0.0);
    return l;
}

Tensor conv2d_3x3(const Tensor& x, const ConvLayer& layer)
{
    if (x.shape.size() != 3 || x.shape[2] != static_cast<std::size_t>(layer.in_channels) || x.shape[0] != x.shape[1])
        throw InvalidArgument("conv2d_3x3: expected a square H x W x Cin tensor matching the kernel");
    if (layer.kernel.size() != static_cast<std::size_t>(9) * layer.in_channels * layer.out_channels ||
        layer.bias.size() != static_cast<std::size_t>(layer.out_channels))
        throw InvalidArgument("conv2d_3x3: kernel or bias has the wrong size");
    const auto side = static_cast<int>(x.shape[0]);
    Tensor y{{x.shape[0], x.shape[1], static_cast<std::size_t>(layer.out_channels)}, {}};
    y.values = conv_apply(x.values, side, layer);
    return y;
}

ResHeadParams ResHeadParams::zeros(int channels, int block_count)
{
    ResHeadParams p;
    p.head = ConvLayer::zeros(1, channels);
    for (int b = 0; b < block_count; ++b)
        p.blocks.push_back({ConvLayer::zeros(channels, channels), ConvLayer::zeros(channels, channels)});
    p.tail = ConvLayer::zeros(channels, 1);
    return p;
}

std::size_t ResHeadParams::parameter_count() const
{
    std::size_t n = head.parameter_count() + tail.parameter_count();
    for (const auto& b : blocks) n += b.first.parameter_count() + b.second.parameter_count();
    return n;
}

void ModelParams::set_block(std::size_t i, LFistaBlockParams b)
{
    raw_mu[i] = softplus_inverse(b.mu);
    raw_theta[i] = softplus_inverse(b.theta);
}

std::size_t ModelParams::parameter_count() const
{
    return raw_mu.size() + raw_theta.size() + res_head.parameter_count();
}

std::size_t ModelParams::trainable_parameter_count() const
{
    return frozen_blocks ? res_head.parameter_count() : parameter_count();
}

ModelParams init_model(const SensingMatrix& a, const ModelInit& init)
{
    if (init.blocks < 1) throw InvalidArgument("init_model: need at least one block");
    ModelParams p;
    p.raw_mu.resize(init.blocks);
    p.raw_theta.resize(init.blocks);
    p.frozen_blocks = init.frozen_blocks;
    retune_blocks(p, a, init.lambda);

    p.res_head = ResHeadParams::zeros(init.channels, init.res_blocks);
    std::mt19937_64 rng(init.seed);
    auto he = [&rng](ConvLayer& l) { fill_normal(l.kernel, std::sqrt(2.0 / (9.0 * l.in_channels)), rng); };
    he(p.res_head.head);
    for (auto& b : p.res_head.blocks) {
        he(b.first);
        he(b.second);
    }
    // Zero tail: the untrained network outputs an empty map instead of large random intensities.
    return p;
}

ModelParams zeros_like(const ModelParams& p)
{
    ModelParams g = p;
    for (auto& slot : param_slots(g)) std::fill(slot.values.begin(), slot.values.end(), 0.0);
    return g;
}

void retune_blocks(ModelParams& p, const SensingMatrix& a, double lambda)
{
    const double mu = 1.0 / power_iteration_lmax(a).value;
    for (std::size_t i = 0; i < p.block_count(); ++i) p.set_block(i, {mu, lambda * mu});
}

DnnParams DnnParams::zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs)
{
    DnnParams p;
    p.inputs = inputs;
    p.hidden = hidden;
    p.outputs = outputs;
    p.w1.assign(hidden * inputs, 0.0);
    p.b1.assign(hidden, 0.0);
    p.w2.assign(outputs * hidden, 0.0);
    p.b2.assign(outputs, 0.0);
    return p;
}

DnnParams init_dnn(std::size_t echo_length, std::size_t hidden, std::size_t outputs, std::uint64_t seed)
{
    DnnParams p = DnnParams::zeros(2 * echo_length, hidden, outputs);
    p.input_scale = 1.0 / std::sqrt(static_cast<double>(echo_length));
    std::mt19937_64 rng(seed);
    fill_normal(p.w1, std::sqrt(2.0 / static_cast<double>(p.inputs + hidden)), rng);
    fill_normal(p.w2, std::sqrt(2.0 / static_cast<double>(hidden + outputs)), rng);
    return p;
}

std::vector<ParamSlot<double>> param_slots(ModelParams& p) { return model_slots<double>(p); }
std::vector<ParamSlot<const double>> param_slots(const ModelParams& p) { return model_slots<const double>(p); }
std::vector<ParamSlot<double>> param_slots(DnnParams& p) { return dnn_slots<double>(p); }
std::vector<ParamSlot<const double>> param_slots(const DnnParams& p) { return dnn_slots<const double>(p); }

// ---------------------------------------------------------------------------

Tensor lfista_forward(const SensingMatrix& a, const Echo& s, const ModelParams& p, LFistaCache* cache)
{
    if (s.samples.size() != a.rows()) throw InvalidArgument("lfista_forward: echo length mismatch");
    const std::size_t n = a.cols();
    const std::size_t blocks = p.block_count();
    const auto back = a.adjoint_real(s.samples);
    const auto momentum = fista_momentum(static_cast<int>(blocks));

    std::vector<double> prev(n, 0.0);
    std::vector<double> cur(n, 0.0);
    std::vector<double> y(n);
    std::vector<double> g(n);
    std::vector<double> z(n);
    if (cache) {
        cache->x.assign(1, prev);
        cache->x.push_back(cur);
        cache->y.clear();
        cache->residual.clear();
        cache->pre.clear();
    }

    for (std::size_t i = 0; i < blocks; ++i) {
        const auto [mu, theta] = p.block(i);
        for (std::size_t j = 0; j < n; ++j) y[j] = cur[j] + momentum[i] * (cur[j] - prev[j]);
        a.apply_gram(y, g);
        bool finite = true;
        for (std::size_t j = 0; j < n; ++j) {
            g[j] -= back[j];
            z[j] = y[j] - mu * g[j] - theta;
            finite = finite && std::isfinite(z[j]);
        }
        if (!finite) throw DivergedError("lfista_forward block", i);
        prev.swap(cur);
        for (std::size_t j = 0; j < n; ++j) cur[j] = std::max(z[j], 0.0);
        if (cache) {
            cache->y.push_back(y);
            cache->residual.push_back(g);
            cache->pre.push_back(z);
            cache->x.push_back(cur);
        }
    }
    const auto side = static_cast<std::size_t>(square_side(n));
    return Tensor{{side, side}, std::move(cur)};
}

Tensor resnet_forward(const Tensor& coarse, const ResHeadParams& p, ResHeadCache* cache)
{
    const int side = square_side(coarse.values.size());
    std::vector<double> head_pre = conv_apply(coarse.values, side, p.head);
    std::vector<double> u = head_pre;
    relu_inplace(u);
    if (cache) {
        cache->input = coarse.values;
        cache->head_pre = head_pre;
        cache->block_in.clear();
        cache->block_mid_pre.clear();
        cache->block_sum.clear();
    }
    for (const auto& block : p.blocks) {
        std::vector<double> mid_pre = conv_apply(u, side, block.first);
        std::vector<double> mid = mid_pre;
        relu_inplace(mid);
        std::vector<double> sum = conv_apply(mid, side, block.second);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += u[i];
        if (cache) {
            cache->block_in.push_back(u);
            cache->block_mid_pre.push_back(std::move(mid_pre));
            cache->block_sum.push_back(sum);
        }
        u = std::move(sum);
        relu_inplace(u);
    }
    if (cache) cache->tail_in = u;
    const auto s = static_cast<std::size_t>(side);
    return Tensor{{s, s}, conv_apply(u, side, p.tail)};
}

Tensor model_forward(const SensingMatrix& a, const Echo& s, const ModelParams& p, ModelCache* cache)
{
    Tensor coarse = lfista_forward(a, s, p, cache ? &cache->lfista : nullptr);
    return resnet_forward(coarse, p.res_head, cache ? &cache->res : nullptr);
}

std::vector<double> resnet_backward(const ResHeadParams& p, const ResHeadCache& cache, std::span<const double> d_output,
                                    ResHeadParams& grads)
{
    if (cache.input.empty()) throw std::logic_error("resnet_backward: forward pass did not record a cache");
    const int side = square_side(cache.input.size());

    std::vector<double> du = conv_backward(cache.tail_in, d_output, side, p.tail, grads.tail);
    for (std::size_t b = p.blocks.size(); b-- > 0;) {
        const auto& block = p.blocks[b];
        auto& gblock = grads.blocks[b];
        mask_by_positive(du, cache.block_sum[b]);  // ReLU after the skip sum

        std::vector<double> mid = cache.block_mid_pre[b];
        relu_inplace(mid);
        std::vector<double> d_mid = conv_backward(mid, du, side, block.second, gblock.second);
        mask_by_positive(d_mid, cache.block_mid_pre[b]);
        std::vector<double> d_in = conv_backward(cache.block_in[b], d_mid, side, block.first, gblock.first);
        for (std::size_t i = 0; i < du.size(); ++i) du[i] += d_in[i];  // skip path
    }
    mask_by_positive(du, cache.head_pre);
    return conv_backward(cache.input, du, side, p.head, grads.head);
}

void model_backward(const SensingMatrix& a, const ModelParams& p, const ModelCache& cache,
                    std::span<const double> d_output, ModelParams& grads)
{
    const auto& lc = cache.lfista;
    if (lc.x.empty()) throw std::logic_error("model_backward: forward pass did not record a cache");
    const std::vector<double> d_coarse = resnet_backward(p.res_head, cache.res, d_output, grads.res_head);

    const std::size_t n = a.cols();
    const std::size_t blocks = p.block_count();
    const auto momentum = fista_momentum(static_cast<int>(blocks));

    // d[k] accumulates dL/dx_k for k = 0 .. blocks + 1.
    std::vector<std::vector<double>> d(blocks + 2, std::vector<double>(n, 0.0));
    d[blocks + 1] = d_coarse;
    std::vector<double> dz(n);
    std::vector<double> gdz(n);
    for (std::size_t i = blocks; i-- > 0;) {
        const auto [mu, theta] = p.block(i);
        const auto& dx_out = d[i + 2];
        double d_theta = 0.0;
        double d_mu = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            dz[j] = lc.pre[i][j] > 0.0 ? dx_out[j] : 0.0;
            d_theta -= dz[j];
            d_mu -= dz[j] * lc.residual[i][j];
        }
        a.apply_gram(dz, gdz);
        const double c = momentum[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double dy = dz[j] - mu * gdz[j];
            d[i + 1][j] += (1.0 + c) * dy;
            d[i][j] -= c * dy;
        }
        if (p.frozen_blocks) {
            grads.raw_mu[i] = 0.0;
            grads.raw_theta[i] = 0.0;
        } else {
            grads.raw_mu[i] = d_mu * sigmoid(p.raw_mu[i]);
            grads.raw_theta[i] = d_theta * sigmoid(p.raw_theta[i]);
        }
    }
}

Tensor dnn_forward(const Echo& s, const DnnParams& p, DnnCache* cache)
{
    if (2 * s.samples.size() != p.inputs) throw InvalidArgument("dnn_forward: echo length does not match the input layer");
    const std::size_t len = s.samples.size();
    std::vector<double> input(p.inputs);
    for (std::size_t i = 0; i < len; ++i) {
        input[i] = p.input_scale * s.samples[i].real();
        input[len + i] = p.input_scale * s.samples[i].imag();
    }
    std::vector<double> hidden(p.hidden);
    kernels::parallel::gemv(p.w1, p.hidden, p.inputs, input, hidden);
    for (std::size_t h = 0; h < p.hidden; ++h) hidden[h] += p.b1[h];
    if (cache) {
        cache->input = input;
        cache->hidden_pre = hidden;
    }
    relu_inplace(hidden);
    std::vector<double> out(p.outputs);
    kernels::parallel::gemv(p.w2, p.outputs, p.hidden, hidden, out);
    for (std::size_t o = 0; o < p.outputs; ++o) out[o] += p.b2[o];
    const auto side = static_cast<std::size_t>(square_side(p.outputs));
    return Tensor{{side, side}, std::move(out)};
}

void dnn_backward(const DnnParams& p, const DnnCache& cache, std::span<const double> d_output, DnnParams& grads)
{
    if (cache.input.empty()) throw std::logic_error("dnn_backward: forward pass did not record a cache");
    std::vector<double> hidden = cache.hidden_pre;
    relu_inplace(hidden);

    std::vector<double> d_hidden(p.hidden, 0.0);
    for (std::size_t o = 0; o < p.outputs; ++o) {
        const double g = d_output[o];
        grads.b2[o] = g;
        for (std::size_t h = 0; h < p.hidden; ++h) {
            grads.w2[o * p.hidden + h] = g * hidden[h];
            d_hidden[h] += g * p.w2[o * p.hidden + h];
        }
    }
    for (std::size_t h = 0; h < p.hidden; ++h) {
        const double g = cache.hidden_pre[h] > 0.0 ? d_hidden[h] : 0.0;
        grads.b1[h] = g;
        for (std::size_t i = 0; i < p.inputs; ++i) grads.w1[h * p.inputs + i] = g * cache.input[i];
    }
}

} // namespace radar
