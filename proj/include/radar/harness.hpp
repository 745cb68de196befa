#pragma once

// End-to-end experiment plumbing shared by the CLI and the acceptance suite:
// dataset synthesis, training runs, the four-method comparison and the
// generalization sweeps. Every CSV written here is byte-deterministic for a
// given config, seed and checkpoint; wall-clock timings go to timing.txt only.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radar/config.hpp"
#include "radar/fista.hpp"
#include "radar/metrics.hpp"
#include "radar/shapes.hpp"
#include "radar/training.hpp"

namespace radar {

/// Sensing matrix for the configured geometry. `f0_override` changes only the
/// frequency sweep; the antenna array stays where the configured f0 put it.
SensingMatrix build_scene_matrix(const ExperimentConfig& cfg, std::optional<double> f0_override = std::nullopt);

struct Dataset {
    std::vector<Sample> train;
    std::vector<Sample> val;
    std::vector<Sample> test;
};

/// Loads MNIST from cfg.mnist_dir, splits it, synthesizes noise-free echoes for
/// train/val and (optionally noised) echoes for test, and writes everything to
/// out_dir as *_truth.map / *_echoes.bin plus config.txt.
Dataset run_synth(const ExperimentConfig& cfg, std::optional<double> test_snr_db, const std::filesystem::path& out_dir);

Dataset load_dataset(const std::filesystem::path& data_dir);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, Method m);

/// Trains one method on a synthesized dataset; writes <method>.ckpt and <method>_log.csv.
FitResult run_train(const ExperimentConfig& cfg, Method method, const Dataset& data, const std::filesystem::path& out_dir);

/// A reconstruction method under evaluation: FISTA when `network` is empty.
struct MethodSpec {
    std::string label;
    std::optional<NetworkParams> network;
    FistaConfig fista;
};

struct MethodResult {
    MetricsReport report;
    std::vector<std::vector<double>> reconstructions;  // unclamped
};

/// Reconstructs every sample with every method (same echoes for all), timing each
/// method over the full sample set after one warm-up call.
std::vector<MethodResult> evaluate_methods(const SensingMatrix& a, std::span<const Sample> samples,
                                           const std::vector<MethodSpec>& methods);

/// Loads the three trained networks from ckpt_dir. Throws InvalidArgument naming
/// the method whose checkpoint is missing.
std::map<Method, NetworkParams> load_networks(const std::filesystem::path& ckpt_dir, const SensingMatrix& a,
                                              std::span<const Method> methods);

/// FISTA, FISTA-ResNet, L-FISTA-ResNet and DNN in that order. Pass include_fista = false
/// to skip the (slow) classical solver.
std::vector<MethodSpec> standard_methods(const ExperimentConfig& cfg, const SensingMatrix& a,
                                         const std::map<Method, NetworkParams>& nets, bool include_fista = true);

std::vector<Sample> make_samples(const SensingMatrix& a, std::span<const RcsMap> truths);

struct CompareOutput {
    std::vector<MethodResult> results;
};

/// Runs the comparison on the test split and writes metrics.csv, per_sample.csv,
/// timing.txt and grid_<method>.pgm (truth / reconstruction / |error| rows).
CompareOutput compare_methods(const ExperimentConfig& cfg, const SensingMatrix& a, std::span<const Sample> test,
                              const std::vector<MethodSpec>& methods, const std::filesystem::path& out_dir);

struct SweepRow {
    std::string setting;  // e.g. "10" dB, "none", "29" GHz
    std::string method;
    double mean_mse = 0.0;
    double mean_ssim = 0.0;
};

/// Evaluates the methods on test echoes re-noised at each SNR (plus noise-free);
/// writes sweep_snr.csv and sweep_snr.pgm.
std::vector<SweepRow> sweep_snr(const ExperimentConfig& cfg, const SensingMatrix& a, std::span<const Sample> test,
                                const std::vector<MethodSpec>& methods, std::span<const double> snr_db,
                                std::uint64_t seed, const std::filesystem::path& out_dir);

/// Rebuilds A for each center frequency and re-synthesizes the test echoes.
/// FISTA and FISTA-ResNet recompute mu from the new A; learned blocks stay fixed.
/// Writes sweep_freq.csv and sweep_freq.pgm.
std::vector<SweepRow> sweep_center_frequency(const ExperimentConfig& cfg, std::span<const RcsMap> truths,
                                             const std::map<Method, NetworkParams>& nets, bool include_fista,
                                             std::span<const double> f0_ghz, const std::filesystem::path& out_dir);

/// Same pipeline as compare_methods on shape targets; writes shapes.csv and shapes_grid.pgm.
std::vector<MethodResult> unseen_shape_eval(const SensingMatrix& a, const std::vector<NamedShape>& shapes,
                                            const std::vector<MethodSpec>& methods, const std::filesystem::path& out_dir);

/// |truth - reconstruction| after clamping the reconstruction to [0, 1].
std::vector<double> error_map(std::span<const double> truth, std::span<const double> reconstruction);

} // namespace radar
