#include "radar/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "radar/error.hpp"

namespace radar {
namespace {

// Half-sample symmetric reflection: -1 -> 0, -2 -> 1, n -> n-1.
int reflect(int i, int n)
{
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - 1 - i;
}

std::vector<double> gaussian_window(int size, double sigma)
{
    std::vector<double> w(size);
    const double center = 0.5 * (size - 1);
    double total = 0.0;
    for (int i = 0; i < size; ++i) {
        const double d = i - center;
        w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

std::vector<double> filter(const std::vector<double>& img, int rows, int cols, const std::vector<double>& w)
{
    const int half = static_cast<int>(w.size()) / 2;
    std::vector<double> tmp(img.size());
    std::vector<double> out(img.size());
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int k = 0; k < static_cast<int>(w.size()); ++k) acc += w[k] * img[r * cols + reflect(c + k - half, cols)];
            tmp[r * cols + c] = acc;
        }
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int k = 0; k < static_cast<int>(w.size()); ++k) acc += w[k] * tmp[reflect(r + k - half, rows) * cols + c];
            out[r * cols + c] = acc;
        }
    }
    return out;
}

} // namespace

double mse(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.empty()) throw InvalidArgument("mse: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return acc / static_cast<double>(a.size());
}

double ssim(std::span<const double> a, std::span<const double> b, int rows, int cols, const SsimOptions& opt)
{
    const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (a.size() != n || b.size() != n || n == 0) throw InvalidArgument("ssim: shape mismatch");

    const auto w = gaussian_window(opt.window, opt.sigma);
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter(x, rows, cols, w);
    const auto my = filter(y, rows, cols, w);
    const auto exx = filter(xx, rows, cols, w);
    const auto eyy = filter(yy, rows, cols, w);
    const auto exy = filter(xy, rows, cols, w);

    const double c1 = (opt.k1 * opt.data_range) * (opt.k1 * opt.data_range);
    const double c2 = (opt.k2 * opt.data_range) * (opt.k2 * opt.data_range);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double vx = exx[i] - mx[i] * mx[i];
        const double vy = eyy[i] - my[i] * my[i];
        const double cov = exy[i] - mx[i] * my[i];
        const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
        const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
        total += num / den;
    }
    return total / static_cast<double>(n);
}

std::vector<double> clamp01(std::span<const double> x)
{
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::clamp(v, 0.0, 1.0); });
    return out;
}

void finalize(MetricsReport& report)
{
    auto mean = [](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
    };
    report.mean_mse = mean(report.mse);
    report.mean_ssim = mean(report.ssim);
}

} // namespace radar
