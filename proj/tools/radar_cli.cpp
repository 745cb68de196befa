// Command-line front end: synth, fista, train, infer, eval, sweep-snr, sweep-freq, shapes.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "radar/checkpoint.hpp"
#include "radar/config.hpp"
#include "radar/error.hpp"
#include "radar/fista.hpp"
#include "radar/harness.hpp"
#include "radar/io.hpp"
#include "radar/model.hpp"
#include "radar/shapes.hpp"
#include "radar/training.hpp"

namespace fs = std::filesystem;
using namespace radar;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kData = 3, kDiverged = 4 };

struct Shared {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool fast = false;
    std::string mnist_dir;
};

void add_shared(CLI::App* sub, Shared& s)
{
    sub->add_option("--config", s.config, "key = value config file (unknown keys are errors)");
    sub->add_option("--seed", s.seed, "RNG seed override");
    sub->add_option("--out-dir", s.out_dir, "Output directory (default: config out_dir)");
    sub->add_flag("--fast", s.fast, "Desk-scale profile: 200/50/100 samples, 20 epochs");
    sub->add_option("--mnist-dir", s.mnist_dir, "Directory with the four MNIST IDX files");
}

// Explicit --config wins; otherwise a data directory's config.txt (written by synth) is used.
ExperimentConfig resolve_config(const Shared& s, const std::string& data_dir = {})
{
    ExperimentConfig cfg;
    if (!s.config.empty()) {
        cfg = load_config(s.config);
    } else if (!data_dir.empty() && fs::exists(fs::path(data_dir) / "config.txt")) {
        cfg = load_config(fs::path(data_dir) / "config.txt");
    }
    if (s.fast) cfg.apply_fast_profile();
    if (s.seed) cfg.seed = *s.seed;
    if (!s.mnist_dir.empty()) cfg.mnist_dir = s.mnist_dir;
    if (!s.out_dir.empty()) cfg.out_dir = s.out_dir;
    cfg.validate();
    return cfg;
}

std::vector<Method> parse_methods(const std::string& text)
{
    if (text == "all") return {Method::LFistaResNet, Method::FistaResNet, Method::Dnn};
    std::vector<Method> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_method(item));
    return out;
}

// Sensing matrix matching an echo container's sweep, on the configured grid and array.
SensingMatrix matrix_for(const ExperimentConfig& cfg, const EchoContainer& c)
{
    if (c.antennas != cfg.antennas || c.bandwidth != cfg.bandwidth || c.n_freqs != cfg.n_freqs)
        throw FormatError("echo container sweep/array does not match the config (antennas, bandwidth, n_freqs)", 0);
    SensingMatrix a = build_scene_matrix(cfg, c.f0);
    if (c.length != a.rows()) throw FormatError("echo length does not match the sensing matrix", 0);
    return a;
}

void write_reconstructions(const std::vector<std::vector<double>>& maps, std::size_t cells, const fs::path& out_dir,
                           const std::string& stem)
{
    save_maps(out_dir / (stem + ".map"), MapContainer{cells, maps});
    const int side = square_side(cells);
    std::vector<std::vector<std::vector<double>>> tiles;
    constexpr std::size_t kPerRow = 10;
    for (std::size_t i = 0; i < std::min<std::size_t>(maps.size(), 100); ++i) {
        if (i % kPerRow == 0) tiles.emplace_back();
        tiles.back().push_back(clamp01(maps[i]));
    }
    while (!tiles.empty() && tiles.back().size() < tiles.front().size())
        tiles.back().push_back(std::vector<double>(cells, 1.0));
    if (!tiles.empty()) {
        const Canvas c = tile_maps(tiles, side);
        render_image(c.pixels, c.rows, c.cols, out_dir / (stem + ".pgm"));
    }
}

std::vector<Sample> first_n(const std::vector<Sample>& v, int n)
{
    if (n < 0 || static_cast<std::size_t>(n) >= v.size()) return v;
    return {v.begin(), v.begin() + n};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse-sampled FMCW radar imaging: echo synthesis, FISTA and unrolled-network reconstruction"};
    app.require_subcommand(1);

    Shared shared;

    auto* synth = app.add_subcommand("synth", "Split MNIST and synthesize train/val/test echoes");
    add_shared(synth, shared);
    std::optional<double> snr_db;
    std::optional<double> f0_ghz;
    synth->add_option("--snr-db", snr_db, "Add white Gaussian noise at this SNR to the test echoes");
    synth->add_option("--f0-ghz", f0_ghz, "Center-frequency override in GHz");

    auto* fista = app.add_subcommand("fista", "Reconstruct an echo container with classical FISTA");
    add_shared(fista, shared);
    std::string echoes_path;
    std::optional<double> lambda;
    std::optional<int> max_iter;
    std::string objective_csv;
    fista->add_option("--echoes", echoes_path, "Echo container")->required();
    fista->add_option("--lambda", lambda, "l1 weight (default: config fista_lambda)");
    fista->add_option("--max-iter", max_iter, "Iterations (default: config fista_max_iter)");
    fista->add_option("--record-objective", objective_csv, "Write the per-iteration objective to this CSV");

    auto* train = app.add_subcommand("train", "Train L-FISTA-ResNet, FISTA-ResNet and/or the DNN baseline");
    add_shared(train, shared);
    std::string data_dir;
    std::string methods_text = "all";
    train->add_option("--data-dir", data_dir, "Directory written by synth")->required();
    train->add_option("--method", methods_text, "lfista-resnet, fista-resnet, dnn, a comma list, or all");

    auto* infer = app.add_subcommand("infer", "Reconstruct an echo container with a trained checkpoint");
    add_shared(infer, shared);
    std::string checkpoint_file;
    infer->add_option("--checkpoint", checkpoint_file, "Checkpoint file")->required();
    infer->add_option("--echoes", echoes_path, "Echo container")->required();

    auto* eval = app.add_subcommand("eval", "Four-method comparison on the test split");
    add_shared(eval, shared);
    std::string ckpt_dir;
    int limit = -1;
    bool no_fista = false;
    eval->add_option("--data-dir", data_dir, "Directory written by synth")->required();
    eval->add_option("--checkpoint-dir", ckpt_dir, "Directory with <method>.ckpt files (default: data dir)");
    eval->add_option("--limit", limit, "Use only the first N test samples");
    eval->add_flag("--no-fista", no_fista, "Skip the classical FISTA baseline");

    auto* sweep_snr_cmd = app.add_subcommand("sweep-snr", "Evaluate at the configured SNR grid plus noise-free");
    add_shared(sweep_snr_cmd, shared);
    int sweep_limit = 50;
    sweep_snr_cmd->add_option("--data-dir", data_dir, "Directory written by synth")->required();
    sweep_snr_cmd->add_option("--checkpoint-dir", ckpt_dir, "Directory with <method>.ckpt files (default: data dir)");
    sweep_snr_cmd->add_option("--limit", sweep_limit, "Number of test samples");
    sweep_snr_cmd->add_flag("--no-fista", no_fista, "Skip the classical FISTA baseline");

    auto* sweep_freq_cmd = app.add_subcommand("sweep-freq", "Evaluate at the configured center-frequency grid");
    add_shared(sweep_freq_cmd, shared);
    sweep_freq_cmd->add_option("--data-dir", data_dir, "Directory written by synth")->required();
    sweep_freq_cmd->add_option("--checkpoint-dir", ckpt_dir, "Directory with <method>.ckpt files (default: data dir)");
    sweep_freq_cmd->add_option("--limit", sweep_limit, "Number of test samples");
    sweep_freq_cmd->add_flag("--no-fista", no_fista, "Skip the classical FISTA baseline");

    auto* shapes_cmd = app.add_subcommand("shapes", "Evaluate on built-in shapes and letters (and optional PGM rasters)");
    add_shared(shapes_cmd, shared);
    std::vector<std::string> shape_files;
    shapes_cmd->add_option("--checkpoint-dir", ckpt_dir, "Directory with <method>.ckpt files")->required();
    shapes_cmd->add_option("--shape", shape_files, "Extra 28x28 PGM raster(s)");
    shapes_cmd->add_flag("--no-fista", no_fista, "Skip the classical FISTA baseline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (synth->parsed()) {
            ExperimentConfig cfg = resolve_config(shared);
            if (f0_ghz) cfg.f0 = *f0_ghz * 1e9;
            cfg.validate();
            const fs::path out(cfg.out_dir);
            const Dataset d = run_synth(cfg, snr_db, out);
            std::printf("synth: %zu train, %zu val, %zu test echoes -> %s\n", d.train.size(), d.val.size(), d.test.size(),
                        out.string().c_str());
        } else if (fista->parsed()) {
            ExperimentConfig cfg = resolve_config(shared);
            const EchoContainer c = load_echoes(echoes_path);
            const SensingMatrix a = matrix_for(cfg, c);
            FistaConfig fc;
            fc.lambda = lambda.value_or(cfg.fista_lambda);
            fc.max_iter = max_iter.value_or(cfg.fista_max_iter);
            fc.record_objective = !objective_csv.empty();
            fc.mu = 1.0 / power_iteration_lmax(a).value;
            fc.validate();
            std::vector<std::vector<double>> maps;
            std::ostringstream trace;
            trace << "sample,iteration,objective\n";
            for (std::size_t i = 0; i < c.echoes.size(); ++i) {
                SolverResult r = fista_solve(a, c.echoes[i], fc);
                for (std::size_t t = 0; t < r.objective_trace.size(); ++t)
                    trace << i << ',' << t << ',' << format_number(r.objective_trace[t]) << '\n';
                maps.push_back(std::move(r.estimate));
            }
            const fs::path out(cfg.out_dir);
            write_reconstructions(maps, a.cols(), out, "fista");
            if (!objective_csv.empty()) write_file(objective_csv, trace.str());
            std::printf("fista: %zu reconstructions -> %s\n", maps.size(), (out / "fista.map").string().c_str());
        } else if (train->parsed()) {
            const ExperimentConfig cfg = resolve_config(shared, data_dir);
            const Dataset d = load_dataset(data_dir);
            const fs::path out = shared.out_dir.empty() ? fs::path(data_dir) : fs::path(cfg.out_dir);
            for (Method m : parse_methods(methods_text)) {
                const FitResult r = run_train(cfg, m, d, out);
                const EpochLog& first = r.log.front();
                const EpochLog& last = r.log.back();
                std::printf("train %s: val_mse %.6g -> %.6g, best epoch %d -> %s\n", method_name(m).c_str(), first.val_mse,
                            last.val_mse, r.best.epoch, checkpoint_path(out, m).string().c_str());
            }
        } else if (infer->parsed()) {
            const ExperimentConfig cfg = resolve_config(shared);
            const EchoContainer c = load_echoes(echoes_path);
            const SensingMatrix a = matrix_for(cfg, c);
            const Checkpoint ck = load_checkpoint(checkpoint_file);
            NetworkParams p = params_from_checkpoint(ck, a.cols(), a.rows());
            if (parse_method(ck.method) == Method::FistaResNet) retune_blocks(std::get<ModelParams>(p), a, cfg.block_lambda);
            std::vector<std::vector<double>> maps;
            for (const auto& e : c.echoes) maps.push_back(network_forward(a, e, p).values);
            const fs::path out(cfg.out_dir);
            write_reconstructions(maps, a.cols(), out, ck.method);
            std::printf("infer %s: %zu reconstructions -> %s\n", ck.method.c_str(), maps.size(),
                        (out / (ck.method + ".map")).string().c_str());
        } else if (eval->parsed() || sweep_snr_cmd->parsed() || sweep_freq_cmd->parsed()) {
            const ExperimentConfig cfg = resolve_config(shared, data_dir);
            const Dataset d = load_dataset(data_dir);
            const fs::path ckpts = ckpt_dir.empty() ? fs::path(data_dir) : fs::path(ckpt_dir);
            const fs::path out = shared.out_dir.empty() ? fs::path(data_dir) : fs::path(cfg.out_dir);
            const SensingMatrix a = build_scene_matrix(cfg);
            const std::vector<Method> all = {Method::LFistaResNet, Method::FistaResNet, Method::Dnn};
            const auto nets = load_networks(ckpts, a, all);
            if (eval->parsed()) {
                const auto test = first_n(d.test, limit);
                const auto res = compare_methods(cfg, a, test, standard_methods(cfg, a, nets, !no_fista), out);
                for (const auto& r : res.results)
                    std::printf("%-14s mse %.6f  ssim %.4f  %.3g s/sample\n", r.report.method.c_str(), r.report.mean_mse,
                                r.report.mean_ssim, r.report.seconds_per_sample);
            } else if (sweep_snr_cmd->parsed()) {
                const auto test = first_n(d.test, sweep_limit);
                const auto snrs = parse_number_list(cfg.snr_list);
                const auto rows = sweep_snr(cfg, a, test, standard_methods(cfg, a, nets, !no_fista), snrs, cfg.seed, out);
                for (const auto& r : rows)
                    std::printf("snr %-5s %-14s mse %.6f  ssim %.4f\n", r.setting.c_str(), r.method.c_str(), r.mean_mse,
                                r.mean_ssim);
            } else {
                const auto test = first_n(d.test, sweep_limit);
                std::vector<RcsMap> truths;
                for (const auto& s : test) truths.push_back(s.truth);
                const auto f0s = parse_number_list(cfg.f0_list_ghz);
                const auto rows = sweep_center_frequency(cfg, truths, nets, !no_fista, f0s, out);
                for (const auto& r : rows)
                    std::printf("f0 %-4s GHz %-14s mse %.6f  ssim %.4f\n", r.setting.c_str(), r.method.c_str(), r.mean_mse,
                                r.mean_ssim);
            }
        } else if (shapes_cmd->parsed()) {
            const ExperimentConfig cfg = resolve_config(shared);
            const SensingMatrix a = build_scene_matrix(cfg);
            const std::vector<Method> all = {Method::LFistaResNet, Method::FistaResNet, Method::Dnn};
            const auto nets = load_networks(ckpt_dir, a, all);
            std::vector<NamedShape> shapes = builtin_shapes(cfg.side_cells);
            for (const auto& f : shape_files) shapes.push_back({fs::path(f).stem().string(), load_shape_pgm(f, cfg.side_cells)});
            const fs::path out = shared.out_dir.empty() ? fs::path(ckpt_dir) : fs::path(cfg.out_dir);
            const auto res = unseen_shape_eval(a, shapes, standard_methods(cfg, a, nets, !no_fista), out);
            for (const auto& r : res)
                std::printf("%-14s mse %.6f  ssim %.4f\n", r.report.method.c_str(), r.report.mean_mse, r.report.mean_ssim);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const DivergedError& e) {
        std::fprintf(stderr, "numerical divergence: %s\n", e.what());
        return kDiverged;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kData;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kOk;
}
