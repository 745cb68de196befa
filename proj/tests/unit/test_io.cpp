#include <doctest.h>

#include <filesystem>

#include "radar/error.hpp"
#include "radar/io.hpp"
#include "radar/shapes.hpp"

using namespace radar;
namespace fs = std::filesystem;

TEST_CASE("PGM encoding: header, clamping and round-half-up")
{
    const std::vector<double> v = {0.0, 0.5, 1.0, -3.0, 7.0, 0.25};
    const std::string pgm = encode_pgm(v, 2, 3);
    const std::string header = "P5\n3 2\n255\n";
    REQUIRE(pgm.substr(0, header.size()) == header);
    const std::string payload = pgm.substr(header.size());
    REQUIRE(payload.size() == 6);
    CHECK(static_cast<unsigned char>(payload[0]) == 0);
    CHECK(static_cast<unsigned char>(payload[1]) == 128);
    CHECK(static_cast<unsigned char>(payload[2]) == 255);
    CHECK(static_cast<unsigned char>(payload[3]) == 0);
    CHECK(static_cast<unsigned char>(payload[4]) == 255);
    CHECK(static_cast<unsigned char>(payload[5]) == 64);

    const std::string zeros = encode_pgm(std::vector<double>(784, 0.0), 28, 28);
    CHECK(zeros.substr(zeros.size() - 784) == std::string(784, '\0'));
    CHECK_THROWS_AS(encode_pgm(v, 2, 2), InvalidArgument);
}

TEST_CASE("echo container round trip")
{
    EchoContainer c;
    c.f0 = 30e9;
    c.bandwidth = 5e9;
    c.n_freqs = 2;
    c.antennas = 1;
    c.snr_db = 12.5;
    c.seed = 99;
    c.length = 2;
    c.echoes = {Echo{{{1.0, -2.0}, {0.1, 1e-300}}, 12.5}, Echo{{{-0.0, 3.0}, {5.0, 6.0}}, 12.5}};
    const std::string bytes = serialize_echoes(c);
    CHECK(bytes.rfind("radar-echo 1\n", 0) == 0);
    const EchoContainer back = parse_echoes(bytes);
    CHECK(back.f0 == c.f0);
    CHECK(back.snr_db == c.snr_db);
    CHECK(back.seed == 99);
    REQUIRE(back.echoes.size() == 2);
    CHECK(back.echoes[0].samples == c.echoes[0].samples);
    CHECK(back.echoes[1].samples == c.echoes[1].samples);
    CHECK(serialize_echoes(back) == bytes);

    c.snr_db.reset();
    for (auto& e : c.echoes) e.snr_db.reset();
    const std::string clean = serialize_echoes(c);
    CHECK(clean.find("snr_db none\n") != std::string::npos);
    CHECK_FALSE(parse_echoes(clean).snr_db.has_value());

    CHECK_THROWS_AS(parse_echoes(bytes.substr(0, bytes.size() - 3)), FormatError);
    CHECK_THROWS_AS(parse_echoes("radar-map 1\n"), FormatError);

    const fs::path p = fs::temp_directory_path() / "radar_test_io" / "nested" / "e.bin";
    save_echoes(p, c);
    CHECK(serialize_echoes(load_echoes(p)) == clean);
}

TEST_CASE("map container round trip")
{
    MapContainer m{3, {{0.0, 0.5, 1.0}, {0.25, -1.0, 2.0}}};
    const std::string bytes = serialize_maps(m);
    const MapContainer back = parse_maps(bytes);
    CHECK(back.length == 3);
    CHECK(back.maps == m.maps);
    CHECK_THROWS_AS(parse_maps(bytes.substr(0, bytes.size() - 1)), FormatError);
    m.maps.push_back({1.0});
    CHECK_THROWS_AS(serialize_maps(m), InvalidArgument);
}

TEST_CASE("tiling surrounds every tile with one-pixel white lines")
{
    const std::vector<double> a(4, 0.0), b(4, 0.5);
    const Canvas c = tile_maps({{a, b}, {b, a}}, 2);
    CHECK(c.rows == 7);
    CHECK(c.cols == 7);
    auto at = [&](int r, int col) { return c.pixels[r * 7 + col]; };
    CHECK(at(0, 0) == 1.0);
    CHECK(at(1, 1) == 0.0);
    CHECK(at(1, 3) == 1.0);
    CHECK(at(1, 4) == 0.5);
    CHECK(at(3, 1) == 1.0);
    CHECK(at(4, 1) == 0.5);
    CHECK(at(5, 5) == 0.0);
}

TEST_CASE("curve plot has the requested size and draws on a white canvas")
{
    const std::vector<double> x = {0, 5, 10};
    const Canvas c = plot_curves(x, {{0.1, 0.5, 0.9}, {0.9, 0.5, 0.1}}, 120, 80);
    CHECK(c.rows == 80);
    CHECK(c.cols == 120);
    double mn = 1.0;
    for (double v : c.pixels) mn = std::min(mn, v);
    CHECK(mn < 1.0);
}

TEST_CASE("shapes: built-ins are binary 28x28 maps")
{
    const auto shapes = builtin_shapes();
    CHECK(shapes.size() >= 6);
    for (const auto& s : shapes) {
        REQUIRE(s.map.values.size() == 784);
        double mass = 0;
        for (double v : s.map.values) {
            CHECK((v == 0.0 || v == 1.0));
            mass += v;
        }
        CHECK(mass > 10);
        CHECK(mass < 784);
    }
    const RcsMap ring = shape_ring();
    CHECK(ring.values[14 * 28 + 14] == 0.0);  // hollow center
    CHECK_THROWS_AS(shape_letter('?'), InvalidArgument);
}

TEST_CASE("shapes: PGM rasters load back")
{
    const RcsMap cross = shape_cross();
    const fs::path p = fs::temp_directory_path() / "radar_test_cross.pgm";
    render_image(cross.values, 28, 28, p);
    CHECK(load_shape_pgm(p).values == cross.values);
    write_file(p, "P2\n1 1\n255\n0\n");
    CHECK_THROWS_AS(load_shape_pgm(p), FormatError);
}
