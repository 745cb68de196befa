#include "radar/training.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <utility>

#include "radar/error.hpp"
#include "radar/metrics.hpp"

namespace radar {
namespace {

template <class P>
P zeros_of(const P& p)
{
    P g = p;
    for (auto& slot : param_slots(g)) std::fill(slot.values.begin(), slot.values.end(), 0.0);
    return g;
}

double sample_gradient(const SensingMatrix& a, const Sample& s, const ModelParams& p, LossWeights w, ModelParams& grad)
{
    ModelCache cache;
    const Tensor out = model_forward(a, s.echo, p, &cache);
    const LossResult loss = hybrid_loss(s.truth.values, out.values, s.echo, a, w);
    model_backward(a, p, cache, loss.gradient, grad);
    return loss.value;
}

double sample_gradient(const SensingMatrix& a, const Sample& s, const DnnParams& p, LossWeights w, DnnParams& grad)
{
    DnnCache cache;
    const Tensor out = dnn_forward(s.echo, p, &cache);
    const LossResult loss = hybrid_loss(s.truth.values, out.values, s.echo, a, w);
    dnn_backward(p, cache, loss.gradient, grad);
    return loss.value;
}

// Runs body(i) for i in [0, n) across OpenMP threads and rethrows the first failure.
template <class F>
void parallel_for_each(std::size_t n, F&& body)
{
    std::exception_ptr failure;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(radar_parallel_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

template <class P>
FitResult fit_impl(const SensingMatrix& a, std::span<const Sample> train, std::span<const Sample> val,
                   const TrainConfig& cfg, const KeyValues& snapshot, P params,
                   const std::function<void(const EpochLog&)>& on_epoch)
{
    AdamState adam = make_adam(params, cfg.learning_rate);
    PlateauSchedule schedule{cfg.lr_factor, cfg.lr_patience};
    FitResult result;

    auto record = [&](EpochLog row) {
        result.log.push_back(row);
        if (on_epoch) on_epoch(row);
    };

    {
        const EvalSummary tr = evaluate(a, train, params, cfg.loss);
        const EvalSummary va = evaluate(a, val, params, cfg.loss);
        const double lr = adam.learning_rate;
        schedule.observe(va.loss, adam.learning_rate);
        result.best = make_checkpoint(cfg.method, params, adam, schedule, 0, snapshot);
        result.best_params = params;
        record({0, lr, tr.loss, va.loss, va.mse, va.ssim});
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t batch = std::max<std::size_t>(cfg.batch_size, 1);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::uniform_int_distribution<std::size_t> pick(0, i - 1);
            std::swap(order[i - 1], order[pick(rng)]);
        }
        const double lr = adam.learning_rate;
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += batch, ++batch_index) {
            const std::size_t members = std::min(batch, order.size() - start);
            std::vector<P> grads(members, zeros_of(params));
            std::vector<double> losses(members);
            parallel_for_each(members, [&](std::size_t m) {
                losses[m] = sample_gradient(a, train[order[start + m]], params, cfg.loss, grads[m]);
            });

            P total = zeros_of(params);
            auto total_slots = param_slots(total);
            for (std::size_t m = 0; m < members; ++m) {
                if (!std::isfinite(losses[m]))
                    throw DivergedError("training loss at epoch " + std::to_string(epoch) + ", batch", batch_index);
                loss_sum += losses[m];
                const auto member_slots = param_slots(std::as_const(grads[m]));
                for (std::size_t s = 0; s < total_slots.size(); ++s) {
                    for (std::size_t k = 0; k < total_slots[s].values.size(); ++k)
                        total_slots[s].values[k] += member_slots[s].values[k];
                }
            }
            const double scale = 1.0 / static_cast<double>(members);
            for (auto& slot : total_slots) {
                for (double& g : slot.values) g *= scale;
            }
            adam_step(param_slots(params), param_slots(std::as_const(total)), adam);
        }

        const EvalSummary va = evaluate(a, val, params, cfg.loss);
        if (!std::isfinite(va.loss)) throw DivergedError("validation loss at epoch", static_cast<std::size_t>(epoch));
        if (schedule.observe(va.loss, adam.learning_rate)) {
            result.best = make_checkpoint(cfg.method, params, adam, schedule, epoch, snapshot);
            result.best_params = params;
        }
        record({epoch, lr, loss_sum / static_cast<double>(train.size()), va.loss, va.mse, va.ssim});
    }
    return result;
}

void append_slots(Checkpoint& c, const std::string& prefix, const std::vector<ParamSlot<const double>>& slots,
                  const std::vector<std::vector<double>>* values = nullptr)
{
    for (std::size_t i = 0; i < slots.size(); ++i) {
        NamedArray arr{prefix + slots[i].name, slots[i].shape, {}};
        if (values) {
            arr.values = (*values)[i];
        } else {
            arr.values.assign(slots[i].values.begin(), slots[i].values.end());
        }
        c.arrays.push_back(std::move(arr));
    }
}

const NamedArray& require_array(const Checkpoint& c, const std::string& name)
{
    const NamedArray* a = c.find(name);
    if (!a) throw FormatError("checkpoint: missing array '" + name + "'", 0);
    return *a;
}

template <class P>
void fill_from_checkpoint(const Checkpoint& c, P& p)
{
    for (auto& slot : param_slots(p)) {
        const NamedArray& arr = require_array(c, "param." + slot.name);
        if (arr.shape != slot.shape || arr.values.size() != slot.values.size())
            throw FormatError("checkpoint: shape mismatch for '" + slot.name + "'", 0);
        std::copy(arr.values.begin(), arr.values.end(), slot.values.begin());
    }
}

} // namespace

LossResult hybrid_loss(std::span<const double> eps_true, std::span<const double> eps_hat, const Echo& s,
                       const SensingMatrix& a, LossWeights w, bool with_gradient)
{
    if (eps_true.size() != eps_hat.size() || eps_hat.size() != a.cols() || s.samples.size() != a.rows())
        throw InvalidArgument("hybrid_loss: shape mismatch");
    LossResult r;
    for (std::size_t i = 0; i < eps_hat.size(); ++i) {
        const double d = eps_hat[i] - eps_true[i];
        r.terms.squared_error += d * d;
        r.terms.absolute_error += std::abs(d);
    }
    std::vector<cplx> residual = a.apply(eps_hat);  // A eps_hat - s
    for (std::size_t i = 0; i < residual.size(); ++i) {
        residual[i] -= s.samples[i];
        r.terms.physics += std::norm(residual[i]);
    }
    r.value = r.terms.squared_error + w.lambda1 * r.terms.absolute_error + w.lambda2 * r.terms.physics;

    if (with_gradient) {
        r.gradient = a.adjoint_real(residual);
        for (std::size_t i = 0; i < eps_hat.size(); ++i) {
            const double d = eps_hat[i] - eps_true[i];
            const double sign = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            r.gradient[i] = 2.0 * d + w.lambda1 * sign + 2.0 * w.lambda2 * r.gradient[i];
        }
    }
    return r;
}

void adam_step(std::vector<ParamSlot<double>> params, const std::vector<ParamSlot<const double>>& grads, AdamState& state)
{
    if (params.size() != grads.size() || params.size() != state.m.size()) throw InvalidArgument("adam_step: slot mismatch");
    ++state.step;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t s = 0; s < params.size(); ++s) {
        if (!params[s].trainable) continue;
        auto& m = state.m[s];
        auto& v = state.v[s];
        if (grads[s].values.size() != params[s].values.size() || m.size() != params[s].values.size())
            throw InvalidArgument("adam_step: shape mismatch in '" + params[s].name + "'");
        for (std::size_t k = 0; k < m.size(); ++k) {
            const double g = grads[s].values[k];
            m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g;
            v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g * g;
            const double mhat = m[k] / c1;
            const double vhat = v[k] / c2;
            params[s].values[k] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

bool PlateauSchedule::observe(double loss, double& lr)
{
    if (!has_best || loss < best) {
        best = loss;
        has_best = true;
        bad_epochs = 0;
        return true;
    }
    if (++bad_epochs > patience) {
        lr *= factor;
        bad_epochs = 0;
    }
    return false;
}

std::string method_name(Method m)
{
    switch (m) {
    case Method::LFistaResNet: return "lfista-resnet";
    case Method::FistaResNet: return "fista-resnet";
    case Method::Dnn: return "dnn";
    }
    return "unknown";
}

Method parse_method(const std::string& name)
{
    if (name == "lfista-resnet") return Method::LFistaResNet;
    if (name == "fista-resnet") return Method::FistaResNet;
    if (name == "dnn") return Method::Dnn;
    throw InvalidArgument("unknown method '" + name + "' (expected lfista-resnet, fista-resnet or dnn)");
}

TrainConfig TrainConfig::from_experiment(const ExperimentConfig& cfg, Method method)
{
    TrainConfig t;
    t.method = method;
    t.epochs = cfg.epochs;
    t.batch_size = static_cast<std::size_t>(cfg.batch_size);
    t.learning_rate = cfg.learning_rate;
    t.lr_factor = cfg.lr_factor;
    t.lr_patience = cfg.lr_patience;
    t.loss = {cfg.loss_lambda1, cfg.loss_lambda2};
    t.seed = cfg.seed;
    t.model.blocks = cfg.blocks;
    t.model.lambda = cfg.block_lambda;
    t.model.channels = cfg.res_channels;
    t.model.res_blocks = cfg.res_blocks;
    t.model.frozen_blocks = method == Method::FistaResNet;
    t.model.seed = cfg.seed;
    t.dnn_hidden = static_cast<std::size_t>(cfg.dnn_hidden);
    return t;
}

NetworkParams init_network(const SensingMatrix& a, const TrainConfig& cfg)
{
    if (cfg.method == Method::Dnn) return init_dnn(a.rows(), cfg.dnn_hidden, a.cols(), cfg.seed);
    ModelInit init = cfg.model;
    init.frozen_blocks = cfg.method == Method::FistaResNet;
    return init_model(a, init);
}

Tensor network_forward(const SensingMatrix& a, const Echo& s, const NetworkParams& p)
{
    if (const auto* m = std::get_if<ModelParams>(&p)) return model_forward(a, s, *m);
    return dnn_forward(s, std::get<DnnParams>(p));
}

EvalSummary evaluate(const SensingMatrix& a, std::span<const Sample> samples, const NetworkParams& p, LossWeights w)
{
    const int side = square_side(a.cols());
    std::vector<double> loss(samples.size()), err(samples.size()), sim(samples.size());
    parallel_for_each(samples.size(), [&](std::size_t i) {
        const Tensor out = network_forward(a, samples[i].echo, p);
        loss[i] = hybrid_loss(samples[i].truth.values, out.values, samples[i].echo, a, w, false).value;
        const auto clamped = clamp01(out.values);
        err[i] = mse(clamped, samples[i].truth.values);
        sim[i] = ssim(clamped, samples[i].truth.values, side, side);
    });
    EvalSummary s;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        s.loss += loss[i];
        s.mse += err[i];
        s.ssim += sim[i];
    }
    if (!samples.empty()) {
        const auto n = static_cast<double>(samples.size());
        s.loss /= n;
        s.mse /= n;
        s.ssim /= n;
    }
    return s;
}

FitResult fit(const SensingMatrix& a, std::span<const Sample> train, std::span<const Sample> val, const TrainConfig& cfg,
              const KeyValues& config_snapshot, const std::function<void(const EpochLog&)>& on_epoch)
{
    if (train.empty() || val.empty()) throw InvalidArgument("fit: training and validation sets must be non-empty");
    NetworkParams init = init_network(a, cfg);
    return std::visit([&](auto& p) { return fit_impl(a, train, val, cfg, config_snapshot, p, on_epoch); }, init);
}

Checkpoint make_checkpoint(Method method, const NetworkParams& params, const AdamState& adam,
                           const PlateauSchedule& schedule, int epoch, const KeyValues& config_snapshot)
{
    Checkpoint c;
    c.method = method_name(method);
    c.epoch = epoch;
    c.best_val_loss = schedule.best;
    c.config = config_snapshot;
    c.state = {
        {"learning_rate", exact_double(adam.learning_rate)},
        {"adam_beta1", exact_double(adam.beta1)},
        {"adam_beta2", exact_double(adam.beta2)},
        {"adam_epsilon", exact_double(adam.epsilon)},
        {"adam_step", std::to_string(adam.step)},
        {"plateau_bad_epochs", std::to_string(schedule.bad_epochs)},
    };
    std::visit(
        [&](const auto& p) {
            const auto slots = param_slots(p);
            append_slots(c, "param.", slots);
            if (adam.m.size() == slots.size()) {
                append_slots(c, "adam.m.", slots, &adam.m);
                append_slots(c, "adam.v.", slots, &adam.v);
            }
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, DnnParams>)
                c.state.emplace_back("dnn_input_scale", exact_double(p.input_scale));
        },
        params);
    return c;
}

NetworkParams params_from_checkpoint(const Checkpoint& c, std::size_t grid_cells, std::size_t echo_length)
{
    const Method method = [&] {
        try {
            return parse_method(c.method);
        } catch (const InvalidArgument& e) {
            throw FormatError(std::string("checkpoint: ") + e.what(), 0);
        }
    }();

    for (const auto& [k, v] : c.config) {
        if (k != "side_cells") continue;
        const auto side = std::stoul(v);
        if (side * side != grid_cells)
            throw FormatError("checkpoint: shape mismatch, trained on " + std::to_string(side * side) + " cells but the grid has " +
                                  std::to_string(grid_cells), 0);
    }

    if (method == Method::Dnn) {
        const auto& w1 = require_array(c, "param.dnn.dense1.weight");
        const auto& w2 = require_array(c, "param.dnn.dense2.weight");
        if (w1.shape.size() != 2 || w2.shape.size() != 2) throw FormatError("checkpoint: malformed dense weights", 0);
        if (w2.shape[0] != grid_cells || w1.shape[1] != 2 * echo_length)
            throw FormatError("checkpoint: shape mismatch between dense layers and grid/echo size", 0);
        DnnParams p = DnnParams::zeros(w1.shape[1], w1.shape[0], w2.shape[0]);
        fill_from_checkpoint(c, p);
        const std::string* scale = c.state_value("dnn_input_scale");
        if (!scale) throw FormatError("checkpoint: missing dnn_input_scale", 0);
        p.input_scale = parse_exact_double(*scale);
        return p;
    }

    const auto& mu = require_array(c, "param.lfista.raw_mu");
    const auto& head = require_array(c, "param.res.head.kernel");
    if (mu.shape.size() != 1 || head.shape.size() != 4) throw FormatError("checkpoint: malformed model arrays", 0);
    int res_blocks = 0;
    while (c.find("param.res.block" + std::to_string(res_blocks) + ".conv0.kernel")) ++res_blocks;

    ModelParams p;
    p.raw_mu.assign(mu.shape[0], 0.0);
    p.raw_theta.assign(mu.shape[0], 0.0);
    p.res_head = ResHeadParams::zeros(static_cast<int>(head.shape[3]), res_blocks);
    p.frozen_blocks = method == Method::FistaResNet;
    fill_from_checkpoint(c, p);
    return p;
}

std::string format_log_csv(const std::vector<EpochLog>& log)
{
    std::ostringstream out;
    out << "epoch,lr,train_loss,val_loss,val_mse,val_ssim\n";
    for (const auto& r : log) {
        out << r.epoch << ',' << format_number(r.lr) << ',' << format_number(r.train_loss) << ','
            << format_number(r.val_loss) << ',' << format_number(r.val_mse) << ',' << format_number(r.val_ssim) << '\n';
    }
    return out.str();
}

} // namespace radar
