#include <doctest.h>

#include <filesystem>

#include "radar/config.hpp"
#include "radar/error.hpp"
#include "radar/io.hpp"

using namespace radar;

TEST_CASE("defaults describe the standard 4-antenna, 50-frequency, 28x28 setup")
{
    const ExperimentConfig c;
    CHECK(c.side_cells == 28);
    CHECK(c.cell_size == 0.01);
    CHECK(c.standoff == 2.0);
    CHECK(c.antennas == 4);
    CHECK(c.f0 == 30e9);
    CHECK(c.bandwidth == 5e9);
    CHECK(c.n_freqs == 50);
    CHECK(c.n_train == 800);
    CHECK(c.n_val == 200);
    CHECK(c.n_test == 1000);
    CHECK(c.fista_lambda == 0.001);
    CHECK(c.fista_max_iter == 2000);
    CHECK(c.blocks == 20);
    CHECK(c.epochs == 100);
    CHECK(c.batch_size == 16);
    CHECK(c.learning_rate == 1e-2);
    CHECK(c.loss_lambda1 == 0.1);
    CHECK(c.loss_lambda2 == 0.05);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("fast profile")
{
    ExperimentConfig c;
    c.apply_fast_profile();
    CHECK(c.n_train == 200);
    CHECK(c.n_val == 50);
    CHECK(c.n_test == 100);
    CHECK(c.epochs == 20);
}

TEST_CASE("parse: comments, whitespace and overrides")
{
    const ExperimentConfig c = parse_config("# comment\n  seed = 42  \nepochs=3 # trailing\n\nsnr_list = 0, 10\n");
    CHECK(c.seed == 42);
    CHECK(c.epochs == 3);
    CHECK(parse_number_list(c.snr_list) == std::vector<double>{0.0, 10.0});
}

TEST_CASE("unknown keys and bad values are config errors")
{
    CHECK_THROWS_AS(parse_config("epoch = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("epochs = three\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("epochs\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("cell_size = 0\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/radar.cfg"), ConfigError);
}

TEST_CASE("key = value round trip is exact")
{
    ExperimentConfig c;
    c.cell_size = 0.1 + 0.2;
    c.f0 = 29.5e9;
    c.seed = 123456789012345ULL;
    c.out_dir = "some/dir";
    std::string text;
    for (const auto& [k, v] : c.to_key_values()) text += k + " = " + v + "\n";
    const ExperimentConfig back = parse_config(text);
    CHECK(back.to_key_values() == c.to_key_values());
    CHECK(back.cell_size == c.cell_size);
    CHECK(back.seed == c.seed);

    const auto path = std::filesystem::temp_directory_path() / "radar_test_config.cfg";
    write_file(path, text);
    CHECK(load_config(path).to_key_values() == c.to_key_values());
}

TEST_CASE("number formatting is shortest round-trip")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(3.0) == "3");
    CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
    CHECK_THROWS_AS(parse_number_list("1,x"), ConfigError);
}
