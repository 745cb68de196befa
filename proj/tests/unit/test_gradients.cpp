#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "radar/forward_model.hpp"
#include "radar/model.hpp"
#include "radar/training.hpp"

using namespace radar;

namespace {

constexpr double kStep = 1e-5;
constexpr double kTolerance = 1e-4;

// Small random problem: 5 x 5 grid, 12 complex measurements.
struct Toy {
    SensingMatrix a;
    RcsMap truth;
    Echo echo;
};

Toy make_toy(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> e;
    for (int i = 0; i < 12 * 25; ++i) e.push_back(std::polar(1.0, 6.283185307179586 * u(rng)));
    SensingMatrix a(12, 25, std::move(e));
    RcsMap truth;
    for (int p = 0; p < 25; ++p) truth.values.push_back(u(rng) < 0.4 ? u(rng) : 0.0);
    Echo echo = synthesize_echo(a, truth);
    for (auto& v : echo.samples) v += cplx(0.05 * d(rng), 0.05 * d(rng));
    return {std::move(a), std::move(truth), std::move(echo)};
}

template <class Params>
void check_groups(Params& p, const Params& analytic, const std::function<double()>& loss)
{
    auto slots = param_slots(p);
    const auto grads = param_slots(analytic);
    for (std::size_t k = 0; k < slots.size(); ++k) {
        if (!slots[k].trainable) continue;
        double num2 = 0, diff2 = 0;
        for (std::size_t i = 0; i < slots[k].values.size(); ++i) {
            double& v = slots[k].values[i];
            const double keep = v;
            v = keep + kStep;
            const double up = loss();
            v = keep - kStep;
            const double down = loss();
            v = keep;
            const double numeric = (up - down) / (2 * kStep);
            num2 += numeric * numeric;
            diff2 += (numeric - grads[k].values[i]) * (numeric - grads[k].values[i]);
        }
        const double rel = std::sqrt(diff2) / std::max(std::sqrt(num2), 1e-12);
        INFO("group " << slots[k].name << " relative error " << rel);
        CHECK(rel < kTolerance);
        CHECK(num2 > 0.0);
    }
}

ModelParams toy_model(const SensingMatrix& a, bool frozen)
{
    ModelInit init;
    init.blocks = 4;
    init.channels = 3;
    init.res_blocks = 2;
    init.frozen_blocks = frozen;
    init.seed = 17;
    ModelParams p = init_model(a, init);
    // Larger steps and thresholds than the plain-FISTA start so every block is active.
    for (std::size_t i = 0; i < p.block_count(); ++i) p.set_block(i, {0.6 * p.block(i).mu * (1 + 0.1 * i), 0.02});
    std::mt19937_64 rng(23);
    std::normal_distribution<double> d(0.0, 0.05);
    for (auto& slot : param_slots(p)) {
        if (slot.name.find("bias") != std::string::npos) {
            for (auto& v : slot.values) v = 0.05 + d(rng);
        }
    }
    // The tail starts at zero, which would hide every upstream gradient.
    for (auto& v : p.res_head.tail.kernel) v = 0.3 * d(rng) / 0.05;
    return p;
}

} // namespace

TEST_CASE("L-FISTA-ResNet: every parameter group matches central differences")
{
    const Toy toy = make_toy(1);
    ModelParams p = toy_model(toy.a, false);
    const LossWeights w;

    ModelCache cache;
    const Tensor out = model_forward(toy.a, toy.echo, p, &cache);
    const LossResult l = hybrid_loss(toy.truth.values, out.values, toy.echo, toy.a, w);
    ModelParams g = zeros_like(p);
    model_backward(toy.a, p, cache, l.gradient, g);

    check_groups(p, g, [&] {
        return hybrid_loss(toy.truth.values, model_forward(toy.a, toy.echo, p).values, toy.echo, toy.a, w, false).value;
    });
}

TEST_CASE("FISTA-ResNet: frozen block scalars get zero gradient, the head matches central differences")
{
    const Toy toy = make_toy(2);
    ModelParams p = toy_model(toy.a, true);
    const LossWeights w;
    ModelCache cache;
    const Tensor out = model_forward(toy.a, toy.echo, p, &cache);
    const LossResult l = hybrid_loss(toy.truth.values, out.values, toy.echo, toy.a, w);
    ModelParams g = zeros_like(p);
    model_backward(toy.a, p, cache, l.gradient, g);
    for (double v : g.raw_mu) CHECK(v == 0.0);
    for (double v : g.raw_theta) CHECK(v == 0.0);
    check_groups(p, g, [&] {
        return hybrid_loss(toy.truth.values, model_forward(toy.a, toy.echo, p).values, toy.echo, toy.a, w, false).value;
    });
}

TEST_CASE("plain MSE regression path (lambda1 = lambda2 = 0)")
{
    const Toy toy = make_toy(3);
    ModelParams p = toy_model(toy.a, false);
    const LossWeights w{0.0, 0.0};
    ModelCache cache;
    const Tensor out = model_forward(toy.a, toy.echo, p, &cache);
    const LossResult l = hybrid_loss(toy.truth.values, out.values, toy.echo, toy.a, w);
    ModelParams g = zeros_like(p);
    model_backward(toy.a, p, cache, l.gradient, g);
    check_groups(p, g, [&] {
        return hybrid_loss(toy.truth.values, model_forward(toy.a, toy.echo, p).values, toy.echo, toy.a, w, false).value;
    });
}

TEST_CASE("DNN: every parameter group matches central differences")
{
    const Toy toy = make_toy(4);
    DnnParams p = init_dnn(12, 6, 25, 9);
    for (auto& b : p.b1) b = 0.3;
    const LossWeights w;
    DnnCache cache;
    const Tensor out = dnn_forward(toy.echo, p, &cache);
    const LossResult l = hybrid_loss(toy.truth.values, out.values, toy.echo, toy.a, w);
    DnnParams g = DnnParams::zeros(p.inputs, p.hidden, p.outputs);
    dnn_backward(p, cache, l.gradient, g);
    check_groups(p, g, [&] {
        return hybrid_loss(toy.truth.values, dnn_forward(toy.echo, p).values, toy.echo, toy.a, w, false).value;
    });
}

TEST_CASE("zero upstream gradient gives zero parameter gradients")
{
    const Toy toy = make_toy(5);
    ModelParams p = toy_model(toy.a, false);
    ModelCache cache;
    model_forward(toy.a, toy.echo, p, &cache);
    ModelParams g = zeros_like(p);
    for (auto& slot : param_slots(g)) std::fill(slot.values.begin(), slot.values.end(), 1.0);
    model_backward(toy.a, p, cache, std::vector<double>(25, 0.0), g);
    for (const auto& slot : param_slots(std::as_const(g))) {
        for (double v : slot.values) CHECK(v == 0.0);
    }
}

TEST_CASE("raising a threshold only removes mass: theta gradient of the summed output is nonpositive")
{
    const Toy toy = make_toy(6);
    ModelParams p = toy_model(toy.a, false);
    LFistaCache lc;
    ModelCache cache;
    model_forward(toy.a, toy.echo, p, &cache);
    // Single block, output = ReLU(pre - theta): d(sum out)/d theta = -(# active) * softplus'(raw).
    ModelParams one;
    one.raw_mu = {p.raw_mu[0]};
    one.raw_theta = {p.raw_theta[0]};
    one.res_head = p.res_head;
    const Tensor coarse = lfista_forward(toy.a, toy.echo, one, &lc);
    double active = 0;
    for (double v : coarse.values) active += v > 0 ? 1 : 0;
    REQUIRE(active > 0);

    // Numeric check against the closed form, bypassing the head.
    const double h = 1e-6;
    ModelParams up = one, down = one;
    up.raw_theta[0] += h;
    down.raw_theta[0] -= h;
    double su = 0, sd = 0;
    for (double v : lfista_forward(toy.a, toy.echo, up).values) su += v;
    for (double v : lfista_forward(toy.a, toy.echo, down).values) sd += v;
    const double numeric = (su - sd) / (2 * h);
    CHECK(numeric <= 0.0);
    const double sig = 1.0 / (1.0 + std::exp(-one.raw_theta[0]));
    CHECK(numeric == doctest::Approx(-active * sig).epsilon(1e-5));
}
