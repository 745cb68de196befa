#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "radar/checkpoint.hpp"
#include "radar/config.hpp"
#include "radar/forward_model.hpp"
#include "radar/model.hpp"

namespace radar {

struct LossWeights {
    double lambda1 = 0.1;
    double lambda2 = 0.05;
};

struct LossTerms {
    double squared_error = 0.0;  // ||eps - eps_hat||_2^2
    double absolute_error = 0.0; // ||eps - eps_hat||_1
    double physics = 0.0;        // ||s - A eps_hat||_2^2
};

struct LossResult {
    double value = 0.0;
    LossTerms terms;
    std::vector<double> gradient;  // d value / d eps_hat
};

/// ||eps - eps_hat||^2 + lambda1 ||eps - eps_hat||_1 + lambda2 ||s - A eps_hat||^2.
/// The L1 subgradient is sign(eps_hat - eps), zero at ties.
LossResult hybrid_loss(std::span<const double> eps_true, std::span<const double> eps_hat, const Echo& s,
                       const SensingMatrix& a, LossWeights w, bool with_gradient = true);

/// Bias-corrected Adam over the trainable slots of a parameter set.
struct AdamState {
    double learning_rate = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

template <class Params>
AdamState make_adam(const Params& p, double learning_rate)
{
    AdamState s;
    s.learning_rate = learning_rate;
    for (const auto& slot : param_slots(p)) {
        s.m.emplace_back(slot.values.size(), 0.0);
        s.v.emplace_back(slot.values.size(), 0.0);
    }
    return s;
}

void adam_step(std::vector<ParamSlot<double>> params, const std::vector<ParamSlot<const double>>& grads, AdamState& state);

/// Reduce-on-plateau: when the monitored loss has not reached a new strict
/// minimum for more than `patience` consecutive epochs, lr *= factor and the
/// counter restarts.
struct PlateauSchedule {
    double factor = 0.1;
    int patience = 10;
    double best = 0.0;
    bool has_best = false;
    int bad_epochs = 0;

    /// Returns true if `loss` is a new best. May scale `lr`.
    bool observe(double loss, double& lr);
};

enum class Method { LFistaResNet, FistaResNet, Dnn };

std::string method_name(Method m);
Method parse_method(const std::string& name);

using NetworkParams = std::variant<ModelParams, DnnParams>;

struct Sample {
    RcsMap truth;
    Echo echo;
};

struct TrainConfig {
    Method method = Method::LFistaResNet;
    int epochs = 100;
    std::size_t batch_size = 16;
    double learning_rate = 1e-2;
    double lr_factor = 0.1;
    int lr_patience = 10;
    LossWeights loss;
    std::uint64_t seed = 7;
    ModelInit model;
    std::size_t dnn_hidden = 10;

    static TrainConfig from_experiment(const ExperimentConfig& cfg, Method method);
};

struct EpochLog {
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_mse = 0.0;
    double val_ssim = 0.0;
};

struct FitResult {
    Checkpoint best;
    NetworkParams best_params;
    std::vector<EpochLog> log;  // row 0 is the untrained network
};

NetworkParams init_network(const SensingMatrix& a, const TrainConfig& cfg);

/// Forward pass of either network on one echo.
Tensor network_forward(const SensingMatrix& a, const Echo& s, const NetworkParams& p);

struct EvalSummary {
    double loss = 0.0;
    double mse = 0.0;
    double ssim = 0.0;
};

/// Mean hybrid loss and clamped-output MSE / SSIM over a sample set.
EvalSummary evaluate(const SensingMatrix& a, std::span<const Sample> samples, const NetworkParams& p, LossWeights w);

/// Mini-batch Adam training with per-epoch validation and the plateau schedule.
/// Returns the best-validation snapshot. `on_epoch` (optional) sees each log row.
FitResult fit(const SensingMatrix& a, std::span<const Sample> train, std::span<const Sample> val, const TrainConfig& cfg,
              const KeyValues& config_snapshot, const std::function<void(const EpochLog&)>& on_epoch = {});

Checkpoint make_checkpoint(Method method, const NetworkParams& params, const AdamState& adam,
                           const PlateauSchedule& schedule, int epoch, const KeyValues& config_snapshot);

/// Rebuilds the network stored in a checkpoint. Throws FormatError when the
/// arrays do not match the expected grid size or echo length.
NetworkParams params_from_checkpoint(const Checkpoint& c, std::size_t grid_cells, std::size_t echo_length);

std::string format_log_csv(const std::vector<EpochLog>& log);

} // namespace radar
