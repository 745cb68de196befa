#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace radar {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Everything needed to reproduce a run. Defaults: K = 4, Nf = 50, 28 x 28 grid,
/// f0 = 30 GHz, B = 5 GHz, and the full 800/200 training profile.
struct ExperimentConfig {
    // geometry
    int side_cells = 28;
    double cell_size = 0.01;  // m
    double standoff = 2.0;    // m
    int antennas = 4;
    // sweep
    double f0 = 30e9;         // Hz
    double bandwidth = 5e9;   // Hz
    int n_freqs = 50;
    // dataset
    std::string mnist_dir = "data/mnist";
    int n_train = 800;
    int n_val = 200;
    int n_test = 1000;
    std::uint64_t seed = 7;
    // classical solver
    double fista_lambda = 0.001;
    int fista_max_iter = 2000;
    // network
    int blocks = 20;
    double block_lambda = 0.01;  // initial (and, for FISTA-ResNet, fixed) theta = lambda mu
    int res_channels = 14;
    int res_blocks = 2;
    int dnn_hidden = 10;
    // training
    int epochs = 100;
    int batch_size = 16;
    double learning_rate = 1e-2;
    double lr_factor = 0.1;
    int lr_patience = 10;
    double loss_lambda1 = 0.1;
    double loss_lambda2 = 0.05;
    // evaluation
    std::string snr_list = "0,5,10,15,20,30";
    std::string f0_list_ghz = "28,29,30,31,32";
    int sweep_samples = 50;
    std::string out_dir = "out";

    /// Desk-scale CI profile: 200 / 50 / 100 samples, 20 epochs.
    void apply_fast_profile();

    /// Throws ConfigError for out-of-range values.
    void validate() const;

    /// Every field as key = value, in a fixed order.
    KeyValues to_key_values() const;

    /// Applies one key = value pair; unknown keys and unparsable values throw ConfigError.
    void set(const std::string& key, const std::string& value);
};

/// Parses a flat `key = value` file ('#' starts a comment) on top of the defaults.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

std::string format_number(double v);
std::vector<double> parse_number_list(const std::string& text);

} // namespace radar
