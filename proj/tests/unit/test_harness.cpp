#include <doctest.h>

#include <filesystem>

#include "radar/error.hpp"
#include "radar/harness.hpp"
#include "radar/io.hpp"

using namespace radar;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.mnist_dir = RADAR_MNIST_DIR;
    c.n_train = 16;
    c.n_val = 4;
    c.n_test = 6;
    c.epochs = 1;
    c.blocks = 4;
    c.fista_max_iter = 30;
    c.snr_list = "0,30";
    c.f0_list_ghz = "29,30";
    return c;
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("radar_test_harness_" + name);
    fs::remove_all(p);
    return p;
}

const std::vector<Method> kAll = {Method::LFistaResNet, Method::FistaResNet, Method::Dnn};

} // namespace

TEST_CASE("synth writes the dataset and load_dataset reads it back")
{
    const ExperimentConfig cfg = small_config();
    const fs::path dir = fresh_dir("synth");
    const Dataset d = run_synth(cfg, 10.0, dir);
    CHECK(d.train.size() == 16);
    CHECK(d.val.size() == 4);
    CHECK(d.test.size() == 6);
    CHECK_FALSE(d.train[0].echo.snr_db.has_value());
    CHECK(d.test[0].echo.snr_db == 10.0);

    const Dataset back = load_dataset(dir);
    REQUIRE(back.test.size() == 6);
    CHECK(back.test[3].echo.samples == d.test[3].echo.samples);
    CHECK(back.train[5].truth.values == d.train[5].truth.values);
    CHECK(load_config(dir / "config.txt").to_key_values() == cfg.to_key_values());

    // Train/val echoes are noise-free.
    const SensingMatrix a = build_scene_matrix(cfg);
    CHECK(synthesize_echo(a, d.train[2].truth).samples == d.train[2].echo.samples);
}

TEST_CASE("missing checkpoint names the method")
{
    const ExperimentConfig cfg = small_config();
    const SensingMatrix a = build_scene_matrix(cfg);
    const fs::path dir = fresh_dir("missing");
    fs::create_directories(dir);
    try {
        load_networks(dir, a, kAll);
        FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("lfista-resnet") != std::string::npos);
    }
}

TEST_CASE("train, compare and sweep end to end")
{
    const ExperimentConfig cfg = small_config();
    const fs::path dir = fresh_dir("e2e");
    const Dataset d = run_synth(cfg, std::nullopt, dir);
    for (Method m : kAll) run_train(cfg, m, d, dir);
    for (Method m : kAll) {
        CHECK(fs::exists(checkpoint_path(dir, m)));
        CHECK(fs::exists(dir / (method_name(m) + "_log.csv")));
    }

    // Retraining into another directory reproduces the checkpoints byte for byte.
    const fs::path retrain = fresh_dir("e2e_retrain");
    ExperimentConfig moved = cfg;
    moved.out_dir = retrain.string();
    run_train(moved, Method::LFistaResNet, d, retrain);
    CHECK(read_file(checkpoint_path(retrain, Method::LFistaResNet)) == read_file(checkpoint_path(dir, Method::LFistaResNet)));

    const SensingMatrix a = build_scene_matrix(cfg);
    const auto nets = load_networks(dir, a, kAll);
    const auto methods = standard_methods(cfg, a, nets);
    REQUIRE(methods.size() == 4);
    CHECK(methods[0].label == "fista");
    CHECK(methods[1].label == "fista-resnet");
    CHECK(methods[2].label == "lfista-resnet");
    CHECK(methods[3].label == "dnn");

    const auto cmp = compare_methods(cfg, a, d.test, methods, dir);
    REQUIRE(cmp.results.size() == 4);
    for (const auto& r : cmp.results) {
        CHECK(r.report.mse.size() == 6);
        CHECK(fs::exists(dir / ("grid_" + r.report.method + ".pgm")));
    }
    const std::string metrics = read_file(dir / "metrics.csv");
    CHECK(metrics.rfind("# reference values", 0) == 0);
    CHECK(metrics.find("fista mse=0.0124 ssim=0.872") != std::string::npos);
    CHECK(fs::exists(dir / "per_sample.csv"));
    CHECK(fs::exists(dir / "timing.txt"));

    // Rerunning gives identical bytes.
    const fs::path again = fresh_dir("e2e_again");
    compare_methods(cfg, a, d.test, methods, again);
    CHECK(read_file(again / "metrics.csv") == metrics);
    CHECK(read_file(again / "per_sample.csv") == read_file(dir / "per_sample.csv"));
    CHECK(read_file(again / "grid_dnn.pgm") == read_file(dir / "grid_dnn.pgm"));

    const auto snr = parse_number_list(cfg.snr_list);
    const auto rows = sweep_snr(cfg, a, d.test, methods, snr, cfg.seed, dir);
    CHECK(rows.size() == 3 * 4);
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(rows[m].setting == "none");
        CHECK(rows[m].mean_mse == cmp.results[m].report.mean_mse);
        CHECK(rows[m].mean_ssim == cmp.results[m].report.mean_ssim);
    }
    const std::string snr_csv = read_file(dir / "sweep_snr.csv");
    sweep_snr(cfg, a, d.test, methods, snr, cfg.seed, again);
    CHECK(read_file(again / "sweep_snr.csv") == snr_csv);
    CHECK(fs::exists(dir / "sweep_snr.pgm"));

    std::vector<RcsMap> truths;
    for (const auto& s : d.test) truths.push_back(s.truth);
    const auto f0 = parse_number_list(cfg.f0_list_ghz);
    const auto frows = sweep_center_frequency(cfg, truths, nets, true, f0, dir);
    REQUIRE(frows.size() == 2 * 4);
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(frows[4 + m].setting == "30");
        CHECK(frows[4 + m].mean_mse == cmp.results[m].report.mean_mse);
    }
    CHECK(fs::exists(dir / "sweep_freq.csv"));

    const auto shapes = unseen_shape_eval(a, {{"rectangle", shape_rectangle()}, {"ring", shape_ring()}}, methods, dir);
    REQUIRE(shapes.size() == 4);
    CHECK(shapes[0].report.ssim.size() == 2);
    CHECK(fs::exists(dir / "shapes.csv"));
    CHECK(fs::exists(dir / "shapes_grid.pgm"));
}

TEST_CASE("error map is |truth - clamp(reconstruction)|")
{
    const std::vector<double> truth = {0.0, 1.0, 0.5};
    const std::vector<double> rec = {-0.2, 0.7, 1.4};
    const auto e = error_map(truth, rec);
    CHECK(e[0] == 0.0);
    CHECK(e[1] == doctest::Approx(0.3));
    CHECK(e[2] == doctest::Approx(0.5));
}
