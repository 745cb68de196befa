#include <doctest.h>

#include <cmath>
#include <limits>

#include "radar/checkpoint.hpp"
#include "radar/error.hpp"
#include "radar/forward_model.hpp"
#include "radar/training.hpp"

using namespace radar;

namespace {

Checkpoint sample_checkpoint()
{
    Checkpoint c;
    c.method = "lfista-resnet";
    c.epoch = 7;
    c.best_val_loss = 0.1 + 0.2;
    c.state = {{"learning_rate", exact_double(1e-3)}, {"adam_step", "91"}};
    c.config = {{"seed", "7"}, {"side_cells", "28"}};
    c.arrays = {{"param.a", {2, 3}, {1.0, -2.5, 1e-300, 3.141592653589793, -0.0, 6.0}},
                {"param.b", {1}, {std::numeric_limits<double>::denorm_min()}},
                {"empty", {0}, {}}};
    return c;
}

} // namespace

TEST_CASE("exact double text round trip")
{
    for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min()}) {
        const double back = parse_exact_double(exact_double(v));
        CHECK(back == v);
        CHECK(std::signbit(back) == std::signbit(v));
    }
    CHECK_THROWS_AS(parse_exact_double("zz"), FormatError);
}

TEST_CASE("serialize / deserialize round trip is lossless and byte-stable")
{
    const Checkpoint c = sample_checkpoint();
    const std::string bytes = serialize_checkpoint(c);
    const Checkpoint back = deserialize_checkpoint(bytes);
    CHECK(back == c);
    CHECK(serialize_checkpoint(back) == bytes);
    REQUIRE(back.find("param.a") != nullptr);
    CHECK(back.find("param.a")->shape == std::vector<std::size_t>{2, 3});
    CHECK(back.find("missing") == nullptr);
    REQUIRE(back.state_value("adam_step") != nullptr);
    CHECK(*back.state_value("adam_step") == "91");
}

TEST_CASE("corrupted checkpoints are format errors")
{
    const std::string bytes = serialize_checkpoint(sample_checkpoint());
    CHECK_THROWS_AS(deserialize_checkpoint("not a checkpoint\n"), FormatError);
    CHECK_THROWS_AS(deserialize_checkpoint(""), FormatError);

    std::string wrong_version = bytes;
    wrong_version.replace(wrong_version.find("radar-checkpoint 1"), 18, "radar-checkpoint 9");
    CHECK_THROWS_AS(deserialize_checkpoint(wrong_version), FormatError);

    CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 1)), FormatError);
    CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() / 3)), FormatError);
    CHECK_THROWS_AS(deserialize_checkpoint(bytes + "x"), FormatError);
}

TEST_CASE("network round trip and shape mismatch")
{
    const SensingMatrix a =
        build_sensing_matrix(build_sweep(30e9, 5e9, 50), build_ula(4, 30e9, 2.0), build_doi_grid(28, 0.01));
    ExperimentConfig cfg;
    TrainConfig tc = TrainConfig::from_experiment(cfg, Method::LFistaResNet);
    const NetworkParams model = init_network(a, tc);
    AdamState adam = make_adam(std::get<ModelParams>(model), 1e-2);
    PlateauSchedule sched;
    const Checkpoint ck = make_checkpoint(Method::LFistaResNet, model, adam, sched, 0, cfg.to_key_values());
    const Checkpoint loaded = deserialize_checkpoint(serialize_checkpoint(ck));
    const NetworkParams back = params_from_checkpoint(loaded, 784, 200);
    const auto& m0 = std::get<ModelParams>(model);
    const auto& m1 = std::get<ModelParams>(back);
    CHECK(m0.raw_mu == m1.raw_mu);
    CHECK(m0.raw_theta == m1.raw_theta);
    CHECK(m0.res_head.head.kernel == m1.res_head.head.kernel);
    CHECK(m0.res_head.tail.bias == m1.res_head.tail.bias);
    CHECK(!m1.frozen_blocks);

    CHECK_THROWS_AS(params_from_checkpoint(loaded, 400, 200), FormatError);

    tc = TrainConfig::from_experiment(cfg, Method::Dnn);
    const NetworkParams dnn = init_network(a, tc);
    AdamState adam_dnn = make_adam(std::get<DnnParams>(dnn), 1e-2);
    const Checkpoint dck = make_checkpoint(Method::Dnn, dnn, adam_dnn, sched, 0, cfg.to_key_values());
    const auto dback = std::get<DnnParams>(params_from_checkpoint(dck, 784, 200));
    CHECK(dback.w1 == std::get<DnnParams>(dnn).w1);
    CHECK(dback.input_scale == std::get<DnnParams>(dnn).input_scale);
    CHECK_THROWS_AS(params_from_checkpoint(dck, 784, 100), FormatError);

    Checkpoint broken = loaded;
    broken.arrays.front().values.pop_back();
    CHECK_THROWS_AS(params_from_checkpoint(broken, 784, 200), FormatError);
}
