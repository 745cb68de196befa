#include "radar/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "radar/error.hpp"
#include "radar/io.hpp"
#include "radar/mnist.hpp"

namespace radar {
namespace fs = std::filesystem;
namespace {

constexpr const char* kSplits[] = {"train", "val", "test"};

std::uint64_t noise_seed(std::uint64_t seed, std::size_t setting, std::size_t sample)
{
    return seed * 1000003ULL + setting * 7919ULL + sample;
}

std::vector<double> reconstruct(const MethodSpec& m, const SensingMatrix& a, const Echo& echo)
{
    if (m.network) return network_forward(a, echo, *m.network).values;
    return fista_solve(a, echo, m.fista).estimate;
}

EchoContainer make_container(const ExperimentConfig& cfg, std::size_t length, std::optional<double> snr)
{
    EchoContainer c;
    c.f0 = cfg.f0;
    c.bandwidth = cfg.bandwidth;
    c.n_freqs = cfg.n_freqs;
    c.antennas = cfg.antennas;
    c.snr_db = snr;
    c.seed = cfg.seed;
    c.length = length;
    return c;
}

std::string config_text(const ExperimentConfig& cfg)
{
    std::string out;
    for (const auto& [k, v] : cfg.to_key_values()) out += k + " = " + v + "\n";
    return out;
}

void write_canvas(const Canvas& c, const fs::path& path) { render_image(c.pixels, c.rows, c.cols, path); }

void write_sweep_outputs(const std::vector<SweepRow>& rows, const std::string& column, std::span<const double> x,
                         const std::vector<std::string>& x_labels, const std::vector<std::string>& methods,
                         const fs::path& csv, const fs::path& plot)
{
    std::ostringstream out;
    out << column << ",method,mean_mse,mean_ssim\n";
    for (const auto& r : rows)
        out << r.setting << ',' << r.method << ',' << format_number(r.mean_mse) << ',' << format_number(r.mean_ssim) << '\n';
    write_file(csv, out.str());

    std::vector<std::vector<double>> series;
    for (const auto& m : methods) {
        std::vector<double> s;
        for (const auto& label : x_labels) {
            for (const auto& r : rows) {
                if (r.method == m && r.setting == label) s.push_back(r.mean_ssim);
            }
        }
        series.push_back(std::move(s));
    }
    write_canvas(plot_curves(x, series), plot);
}

} // namespace

SensingMatrix build_scene_matrix(const ExperimentConfig& cfg, std::optional<double> f0_override)
{
    const DoiGrid grid = build_doi_grid(cfg.side_cells, cfg.cell_size);
    const ArrayGeometry array = build_ula(cfg.antennas, cfg.f0, cfg.standoff);
    const FrequencySweep sweep = build_sweep(f0_override.value_or(cfg.f0), cfg.bandwidth, cfg.n_freqs);
    return build_sensing_matrix(sweep, array, grid);
}

std::vector<Sample> make_samples(const SensingMatrix& a, std::span<const RcsMap> truths)
{
    std::vector<Sample> out;
    out.reserve(truths.size());
    for (const auto& t : truths) out.push_back({t, synthesize_echo(a, t)});
    return out;
}

Dataset run_synth(const ExperimentConfig& cfg, std::optional<double> test_snr_db, const fs::path& out_dir)
{
    cfg.validate();
    const fs::path mnist(cfg.mnist_dir);
    std::vector<Raster> images = read_mnist_idx(mnist / "train-images-idx3-ubyte");
    if (fs::exists(mnist / "t10k-images-idx3-ubyte")) {
        auto extra = read_mnist_idx(mnist / "t10k-images-idx3-ubyte");
        images.insert(images.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
    }
    const DatasetSplit split = split_dataset(images.size(), cfg.seed,
                                             {static_cast<std::size_t>(cfg.n_train), static_cast<std::size_t>(cfg.n_val),
                                              static_cast<std::size_t>(cfg.n_test)});
    const SensingMatrix a = build_scene_matrix(cfg);

    Dataset data;
    const std::vector<std::size_t>* indices[] = {&split.train, &split.val, &split.test};
    std::vector<Sample>* targets[] = {&data.train, &data.val, &data.test};
    for (int s = 0; s < 3; ++s) {
        const bool noisy = s == 2 && test_snr_db.has_value();
        MapContainer truth{a.cols(), {}};
        EchoContainer echoes = make_container(cfg, a.rows(), noisy ? test_snr_db : std::nullopt);
        for (std::size_t i = 0; i < indices[s]->size(); ++i) {
            RcsMap map = mnist_to_rcs(images[(*indices[s])[i]]);
            Echo echo = synthesize_echo(a, map);
            if (noisy) echo = add_awgn(echo, test_snr_db, noise_seed(cfg.seed, 0, i));
            truth.maps.push_back(map.values);
            echoes.echoes.push_back(echo);
            targets[s]->push_back({std::move(map), std::move(echo)});
        }
        save_maps(out_dir / (std::string(kSplits[s]) + "_truth.map"), truth);
        save_echoes(out_dir / (std::string(kSplits[s]) + "_echoes.bin"), echoes);
    }
    write_file(out_dir / "config.txt", config_text(cfg));
    return data;
}

Dataset load_dataset(const fs::path& data_dir)
{
    Dataset data;
    std::vector<Sample>* targets[] = {&data.train, &data.val, &data.test};
    for (int s = 0; s < 3; ++s) {
        const MapContainer truth = load_maps(data_dir / (std::string(kSplits[s]) + "_truth.map"));
        const EchoContainer echoes = load_echoes(data_dir / (std::string(kSplits[s]) + "_echoes.bin"));
        if (truth.maps.size() != echoes.echoes.size())
            throw FormatError(std::string("dataset split '") + kSplits[s] + "' has mismatched truth/echo counts", 0);
        for (std::size_t i = 0; i < truth.maps.size(); ++i) targets[s]->push_back({RcsMap{truth.maps[i]}, echoes.echoes[i]});
    }
    return data;
}

fs::path checkpoint_path(const fs::path& dir, Method m) { return dir / (method_name(m) + ".ckpt"); }

FitResult run_train(const ExperimentConfig& cfg, Method method, const Dataset& data, const fs::path& out_dir)
{
    cfg.validate();
    const SensingMatrix a = build_scene_matrix(cfg);
    const TrainConfig tc = TrainConfig::from_experiment(cfg, method);
    // The output location is not part of the experiment; leaving it out keeps checkpoints relocatable.
    KeyValues snapshot = cfg.to_key_values();
    std::erase_if(snapshot, [](const auto& kv) { return kv.first == "out_dir"; });
    FitResult result = fit(a, data.train, data.val, tc, snapshot);
    fs::create_directories(out_dir);
    save_checkpoint(checkpoint_path(out_dir, method), result.best);
    write_file(out_dir / (method_name(method) + "_log.csv"), format_log_csv(result.log));
    return result;
}

std::vector<MethodResult> evaluate_methods(const SensingMatrix& a, std::span<const Sample> samples,
                                           const std::vector<MethodSpec>& methods)
{
    const int side = square_side(a.cols());
    std::vector<MethodResult> out;
    for (const auto& m : methods) {
        MethodResult r;
        r.report.method = m.label;
        if (!samples.empty()) reconstruct(m, a, samples.front().echo);  // warm-up

        const auto start = std::chrono::steady_clock::now();
        for (const auto& s : samples) r.reconstructions.push_back(reconstruct(m, a, s.echo));
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        r.report.seconds_per_sample = samples.empty() ? 0.0 : elapsed.count() / static_cast<double>(samples.size());

        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto clamped = clamp01(r.reconstructions[i]);
            r.report.mse.push_back(mse(clamped, samples[i].truth.values));
            r.report.ssim.push_back(ssim(clamped, samples[i].truth.values, side, side));
        }
        finalize(r.report);
        out.push_back(std::move(r));
    }
    return out;
}

std::map<Method, NetworkParams> load_networks(const fs::path& ckpt_dir, const SensingMatrix& a, std::span<const Method> methods)
{
    std::map<Method, NetworkParams> nets;
    for (Method m : methods) {
        const fs::path path = checkpoint_path(ckpt_dir, m);
        if (!fs::exists(path))
            throw InvalidArgument("missing checkpoint for " + method_name(m) + ": expected " + path.string() +
                                  " (run `radar train --method " + method_name(m) + "` first)");
        nets.emplace(m, params_from_checkpoint(load_checkpoint(path), a.cols(), a.rows()));
    }
    return nets;
}

std::vector<MethodSpec> standard_methods(const ExperimentConfig& cfg, const SensingMatrix& a,
                                         const std::map<Method, NetworkParams>& nets, bool include_fista)
{
    std::vector<MethodSpec> out;
    if (include_fista) {
        MethodSpec f{"fista", std::nullopt, {}};
        f.fista.lambda = cfg.fista_lambda;
        f.fista.max_iter = cfg.fista_max_iter;
        f.fista.mu = 1.0 / power_iteration_lmax(a).value;
        out.push_back(std::move(f));
    }
    for (Method m : {Method::FistaResNet, Method::LFistaResNet, Method::Dnn}) {
        const auto it = nets.find(m);
        if (it == nets.end()) continue;
        NetworkParams p = it->second;
        if (m == Method::FistaResNet) retune_blocks(std::get<ModelParams>(p), a, cfg.block_lambda);
        out.push_back({method_name(m), std::move(p), {}});
    }
    return out;
}

std::vector<double> error_map(std::span<const double> truth, std::span<const double> reconstruction)
{
    const auto clamped = clamp01(reconstruction);
    std::vector<double> err(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) err[i] = std::abs(truth[i] - clamped[i]);
    return err;
}

CompareOutput compare_methods(const ExperimentConfig& cfg, const SensingMatrix& a, std::span<const Sample> test,
                              const std::vector<MethodSpec>& methods, const fs::path& out_dir)
{
    (void)cfg;
    CompareOutput out{evaluate_methods(a, test, methods)};
    const int side = square_side(a.cols());

    std::ostringstream metrics;
    metrics << "# reference values (28x28 MNIST, 1000 test digits): fista mse=0.0124 ssim=0.872; "
               "fista-resnet mse=0.0065 ssim=0.925; lfista-resnet mse=0.0049 ssim=0.945; dnn mse=0.0263 ssim=0.661\n";
    metrics << "method,samples,mean_mse,mean_ssim\n";
    std::ostringstream per_sample;
    per_sample << "method,sample,mse,ssim\n";
    std::ostringstream timing;
    timing << "# wall-clock seconds per sample after one warm-up call; varies run to run\n";
    for (const auto& r : out.results) {
        metrics << r.report.method << ',' << r.report.mse.size() << ',' << format_number(r.report.mean_mse) << ','
                << format_number(r.report.mean_ssim) << '\n';
        for (std::size_t i = 0; i < r.report.mse.size(); ++i)
            per_sample << r.report.method << ',' << i << ',' << format_number(r.report.mse[i]) << ','
                       << format_number(r.report.ssim[i]) << '\n';
        timing << r.report.method << ' ' << r.report.mse.size() << ' ' << format_number(r.report.seconds_per_sample) << '\n';

        std::vector<std::vector<std::vector<double>>> tiles;
        for (std::size_t i = 0; i < std::min<std::size_t>(test.size(), 8); ++i) {
            tiles.push_back({test[i].truth.values, clamp01(r.reconstructions[i]),
                             error_map(test[i].truth.values, r.reconstructions[i])});
        }
        write_canvas(tile_maps(tiles, side), out_dir / ("grid_" + r.report.method + ".pgm"));
    }
    write_file(out_dir / "metrics.csv", metrics.str());
    write_file(out_dir / "per_sample.csv", per_sample.str());
    write_file(out_dir / "timing.txt", timing.str());
    return out;
}

std::vector<SweepRow> sweep_snr(const ExperimentConfig& cfg, const SensingMatrix& a, std::span<const Sample> test,
                                const std::vector<MethodSpec>& methods, std::span<const double> snr_db,
                                std::uint64_t seed, const fs::path& out_dir)
{
    (void)cfg;
    std::vector<SweepRow> rows;
    std::vector<std::string> labels;
    for (std::size_t s = 0; s <= snr_db.size(); ++s) {
        const bool clean = s == 0;
        const std::string label = clean ? "none" : format_number(snr_db[s - 1]);
        std::vector<Sample> noisy(test.begin(), test.end());
        if (!clean) {
            for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i].echo = add_awgn(test[i].echo, snr_db[s - 1], noise_seed(seed, s, i));
            labels.push_back(label);
        }
        for (const auto& r : evaluate_methods(a, noisy, methods))
            rows.push_back({label, r.report.method, r.report.mean_mse, r.report.mean_ssim});
    }
    std::vector<std::string> names;
    for (const auto& m : methods) names.push_back(m.label);
    write_sweep_outputs(rows, "snr_db", snr_db, labels, names, out_dir / "sweep_snr.csv", out_dir / "sweep_snr.pgm");
    return rows;
}

std::vector<SweepRow> sweep_center_frequency(const ExperimentConfig& cfg, std::span<const RcsMap> truths,
                                             const std::map<Method, NetworkParams>& nets, bool include_fista,
                                             std::span<const double> f0_ghz, const fs::path& out_dir)
{
    std::vector<SweepRow> rows;
    std::vector<std::string> labels;
    std::vector<std::string> names;
    for (double f : f0_ghz) {
        const SensingMatrix a = build_scene_matrix(cfg, f * 1e9);
        const auto samples = make_samples(a, truths);
        const auto methods = standard_methods(cfg, a, nets, include_fista);
        if (names.empty()) {
            for (const auto& m : methods) names.push_back(m.label);
        }
        const std::string label = format_number(f);
        labels.push_back(label);
        for (const auto& r : evaluate_methods(a, samples, methods))
            rows.push_back({label, r.report.method, r.report.mean_mse, r.report.mean_ssim});
    }
    write_sweep_outputs(rows, "f0_ghz", f0_ghz, labels, names, out_dir / "sweep_freq.csv", out_dir / "sweep_freq.pgm");
    return rows;
}

std::vector<MethodResult> unseen_shape_eval(const SensingMatrix& a, const std::vector<NamedShape>& shapes,
                                            const std::vector<MethodSpec>& methods, const fs::path& out_dir)
{
    const int side = square_side(a.cols());
    std::vector<RcsMap> truths;
    for (const auto& s : shapes) truths.push_back(s.map);
    const auto samples = make_samples(a, truths);
    auto results = evaluate_methods(a, samples, methods);

    std::ostringstream csv;
    csv << "shape,method,mse,ssim\n";
    std::vector<std::vector<std::vector<double>>> tiles(shapes.size());
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        tiles[i].push_back(shapes[i].map.values);
        for (const auto& r : results) {
            csv << shapes[i].name << ',' << r.report.method << ',' << format_number(r.report.mse[i]) << ','
                << format_number(r.report.ssim[i]) << '\n';
            tiles[i].push_back(clamp01(r.reconstructions[i]));
            tiles[i].push_back(error_map(shapes[i].map.values, r.reconstructions[i]));
        }
    }
    write_file(out_dir / "shapes.csv", csv.str());
    write_canvas(tile_maps(tiles, side), out_dir / "shapes_grid.pgm");
    return results;
}

} // namespace radar
