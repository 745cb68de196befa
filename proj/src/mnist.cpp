#include "radar/mnist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <string>

#include "radar/error.hpp"

namespace radar {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<char> slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string(), 0);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<char>& buf, std::size_t offset, const std::filesystem::path& path)
{
    if (offset + 4 > buf.size()) throw FormatError("truncated IDX header in " + path.string(), buf.size());
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<std::uint8_t>(buf[offset + i]);
    return v;
}

} // namespace

std::vector<Raster> read_mnist_idx(const std::filesystem::path& path)
{
    const auto buf = slurp(path);
    const std::uint32_t magic = read_be32(buf, 0, path);
    if (magic != kImageMagic) throw FormatError("bad IDX image magic in " + path.string(), 0);
    const std::uint32_t count = read_be32(buf, 4, path);
    const std::uint32_t rows = read_be32(buf, 8, path);
    const std::uint32_t cols = read_be32(buf, 12, path);
    if (rows != 28) throw FormatError("expected 28 rows in " + path.string(), 8);
    if (cols != 28) throw FormatError("expected 28 columns in " + path.string(), 12);

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    const std::size_t need = 16 + pixels * count;
    if (buf.size() < need) throw FormatError("truncated IDX payload in " + path.string(), buf.size());

    std::vector<Raster> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto* first = reinterpret_cast<const std::uint8_t*>(buf.data() + 16 + i * pixels);
        out[i] = Raster{static_cast<int>(rows), static_cast<int>(cols), {first, first + pixels}};
    }
    return out;
}

std::vector<std::uint8_t> read_mnist_labels(const std::filesystem::path& path)
{
    const auto buf = slurp(path);
    if (read_be32(buf, 0, path) != kLabelMagic) throw FormatError("bad IDX label magic in " + path.string(), 0);
    const std::uint32_t count = read_be32(buf, 4, path);
    if (buf.size() < 8 + static_cast<std::size_t>(count)) throw FormatError("truncated IDX labels in " + path.string(), buf.size());
    const auto* first = reinterpret_cast<const std::uint8_t*>(buf.data() + 8);
    return {first, first + count};
}

RcsMap mnist_to_rcs(const Raster& image)
{
    if (image.rows != 28 || image.cols != 28 || image.bytes.size() != 784)
        throw InvalidArgument("mnist_to_rcs: raster must be 28x28");
    RcsMap map;
    map.values.resize(784);
    std::transform(image.bytes.begin(), image.bytes.end(), map.values.begin(),
                   [](std::uint8_t b) { return b / 255.0; });
    return map;
}

Raster rcs_to_raster(const RcsMap& map, int side)
{
    if (map.values.size() != static_cast<std::size_t>(side) * side)
        throw InvalidArgument("rcs_to_raster: size mismatch");
    Raster r{side, side, std::vector<std::uint8_t>(map.values.size())};
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const double v = std::clamp(map.values[i], 0.0, 1.0);
        r.bytes[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return r;
}

DatasetSplit split_dataset(std::size_t available, std::uint64_t seed, SplitSizes sizes)
{
    const std::size_t total = sizes.train + sizes.val + sizes.test;
    if (available < total)
        throw InvalidArgument("split_dataset: need " + std::to_string(total) + " rasters, have " + std::to_string(available));

    std::vector<std::size_t> order(available);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first `total` slots become a uniform random sample.
    for (std::size_t i = 0; i < total; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, available - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    DatasetSplit split;
    auto it = order.begin();
    split.train.assign(it, it + sizes.train);
    it += sizes.train;
    split.val.assign(it, it + sizes.val);
    it += sizes.val;
    split.test.assign(it, it + sizes.test);
    return split;
}

} // namespace radar
