#pragma once

#include <span>
#include <string>
#include <vector>

namespace radar {

double mse(std::span<const double> a, std::span<const double> b);

struct SsimOptions {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double data_range = 1.0;
};

/// Mean of the local SSIM map. Local statistics use a normalized Gaussian window
/// with half-sample symmetric (reflect) padding, so every pixel contributes.
double ssim(std::span<const double> a, std::span<const double> b, int rows, int cols, const SsimOptions& opt = {});

std::vector<double> clamp01(std::span<const double> x);

struct MetricsReport {
    std::string method;
    std::vector<double> mse;
    std::vector<double> ssim;
    double mean_mse = 0.0;
    double mean_ssim = 0.0;
    double seconds_per_sample = 0.0;
};

/// Fills mean_mse / mean_ssim from the per-sample values (summed in index order).
void finalize(MetricsReport& report);

} // namespace radar
