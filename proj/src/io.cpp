#include "radar/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "binary_io.hpp"
#include "radar/config.hpp"
#include "radar/error.hpp"

namespace radar {
namespace {

// Reads "key value" header lines up to "end"; returns the payload offset.
struct Header {
    std::vector<std::pair<std::string, std::string>> fields;
    std::size_t payload = 0;

    const std::string& get(const std::string& key) const
    {
        for (const auto& [k, v] : fields) {
            if (k == key) return v;
        }
        throw FormatError("missing header field '" + key + "'", payload);
    }
};

Header read_header(const std::string& bytes, const std::string& magic)
{
    Header h;
    std::size_t pos = 0;
    bool first = true;
    while (true) {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string::npos) throw FormatError("header not terminated", bytes.size());
        const std::string line = bytes.substr(pos, nl - pos);
        const std::size_t line_pos = pos;
        pos = nl + 1;
        if (first) {
            if (line != magic + " 1") throw FormatError("expected '" + magic + " 1' header", line_pos);
            first = false;
            continue;
        }
        if (line == "end") break;
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw FormatError("malformed header line '" + line + "'", line_pos);
        h.fields.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    h.payload = pos;
    return h;
}

std::size_t to_size(const std::string& s, std::size_t offset)
{
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw FormatError("expected an integer, got '" + s + "'", offset);
    }
}

double to_double(const std::string& s, std::size_t offset)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError("expected a number, got '" + s + "'", offset);
    }
}

void set_pixel(Canvas& c, int r, int col, double v)
{
    if (r >= 0 && r < c.rows && col >= 0 && col < c.cols) c.pixels[static_cast<std::size_t>(r) * c.cols + col] = v;
}

void draw_line(Canvas& c, int r0, int c0, int r1, int c1, double v)
{
    const int steps = std::max(std::abs(r1 - r0), std::abs(c1 - c0));
    for (int s = 0; s <= steps; ++s) {
        const double t = steps == 0 ? 0.0 : static_cast<double>(s) / steps;
        set_pixel(c, static_cast<int>(std::lround(r0 + t * (r1 - r0))), static_cast<int>(std::lround(c0 + t * (c1 - c0))), v);
    }
}

} // namespace

std::string serialize_echoes(const EchoContainer& c)
{
    std::ostringstream head;
    head << "radar-echo 1\n";
    head << "count " << c.echoes.size() << '\n';
    head << "length " << c.length << '\n';
    head << "f0 " << format_number(c.f0) << '\n';
    head << "bandwidth " << format_number(c.bandwidth) << '\n';
    head << "n_freqs " << c.n_freqs << '\n';
    head << "antennas " << c.antennas << '\n';
    head << "snr_db " << (c.snr_db ? format_number(*c.snr_db) : std::string("none")) << '\n';
    head << "seed " << c.seed << '\n';
    head << "end\n";
    std::string out = head.str();
    for (const auto& e : c.echoes) {
        if (e.samples.size() != c.length) throw InvalidArgument("serialize_echoes: echo length differs from header");
        for (const cplx& v : e.samples) {
            detail::append_f64_le(out, v.real());
            detail::append_f64_le(out, v.imag());
        }
    }
    return out;
}

EchoContainer parse_echoes(const std::string& bytes)
{
    const Header h = read_header(bytes, "radar-echo");
    EchoContainer c;
    const std::size_t count = to_size(h.get("count"), 0);
    c.length = to_size(h.get("length"), 0);
    c.f0 = to_double(h.get("f0"), 0);
    c.bandwidth = to_double(h.get("bandwidth"), 0);
    c.n_freqs = static_cast<int>(to_size(h.get("n_freqs"), 0));
    c.antennas = static_cast<int>(to_size(h.get("antennas"), 0));
    const std::string& snr = h.get("snr_db");
    if (snr != "none") c.snr_db = to_double(snr, 0);
    c.seed = to_size(h.get("seed"), 0);

    const std::size_t need = count * c.length * 16;
    if (bytes.size() - h.payload < need) throw FormatError("echo payload truncated", bytes.size());
    c.echoes.resize(count);
    const char* p = bytes.data() + h.payload;
    for (auto& e : c.echoes) {
        e.snr_db = c.snr_db;
        e.samples.resize(c.length);
        for (auto& v : e.samples) {
            v = {detail::read_f64_le(p), detail::read_f64_le(p + 8)};
            p += 16;
        }
    }
    return c;
}

void save_echoes(const std::filesystem::path& path, const EchoContainer& c) { write_file(path, serialize_echoes(c)); }
EchoContainer load_echoes(const std::filesystem::path& path) { return parse_echoes(read_file(path)); }

std::string serialize_maps(const MapContainer& c)
{
    std::string out = "radar-map 1\ncount " + std::to_string(c.maps.size()) + "\nlength " + std::to_string(c.length) + "\nend\n";
    for (const auto& m : c.maps) {
        if (m.size() != c.length) throw InvalidArgument("serialize_maps: map length differs from header");
        for (double v : m) detail::append_f64_le(out, v);
    }
    return out;
}

MapContainer parse_maps(const std::string& bytes)
{
    const Header h = read_header(bytes, "radar-map");
    MapContainer c;
    const std::size_t count = to_size(h.get("count"), 0);
    c.length = to_size(h.get("length"), 0);
    if (bytes.size() - h.payload < count * c.length * 8) throw FormatError("map payload truncated", bytes.size());
    c.maps.assign(count, std::vector<double>(c.length));
    const char* p = bytes.data() + h.payload;
    for (auto& m : c.maps) {
        for (double& v : m) {
            v = detail::read_f64_le(p);
            p += 8;
        }
    }
    return c;
}

void save_maps(const std::filesystem::path& path, const MapContainer& c) { write_file(path, serialize_maps(c)); }
MapContainer load_maps(const std::filesystem::path& path) { return parse_maps(read_file(path)); }

std::string encode_pgm(std::span<const double> values, int rows, int cols)
{
    if (values.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw InvalidArgument("encode_pgm: size mismatch");
    std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
    out.reserve(out.size() + values.size());
    for (double v : values) {
        const double c = std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::floor(c * 255.0 + 0.5))));
    }
    return out;
}

void render_image(std::span<const double> values, int rows, int cols, const std::filesystem::path& path)
{
    write_file(path, encode_pgm(values, rows, cols));
}

Canvas tile_maps(const std::vector<std::vector<std::vector<double>>>& tiles, int side)
{
    const int grid_rows = static_cast<int>(tiles.size());
    int grid_cols = 0;
    for (const auto& row : tiles) grid_cols = std::max(grid_cols, static_cast<int>(row.size()));
    Canvas c;
    c.rows = grid_rows * (side + 1) + 1;
    c.cols = grid_cols * (side + 1) + 1;
    c.pixels.assign(static_cast<std::size_t>(c.rows) * c.cols, 1.0);
    for (int gr = 0; gr < grid_rows; ++gr) {
        for (int gc = 0; gc < static_cast<int>(tiles[gr].size()); ++gc) {
            const auto& map = tiles[gr][gc];
            if (map.size() != static_cast<std::size_t>(side) * side) throw InvalidArgument("tile_maps: tile size mismatch");
            for (int r = 0; r < side; ++r) {
                for (int col = 0; col < side; ++col)
                    set_pixel(c, 1 + gr * (side + 1) + r, 1 + gc * (side + 1) + col, map[r * side + col]);
            }
        }
    }
    return c;
}

Canvas plot_curves(std::span<const double> x, const std::vector<std::vector<double>>& series, int width, int height)
{
    Canvas c{height, width, std::vector<double>(static_cast<std::size_t>(width) * height, 1.0)};
    const int margin = 10;
    draw_line(c, height - margin, margin, height - margin, width - margin, 0.0);
    draw_line(c, margin, margin, height - margin, margin, 0.0);
    if (x.size() < 2) return c;

    double lo = 0.0;
    double hi = 1.0;
    for (const auto& s : series) {
        for (double v : s) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    const double x0 = *std::min_element(x.begin(), x.end());
    const double x1 = *std::max_element(x.begin(), x.end());
    auto px = [&](double v) { return margin + static_cast<int>(std::lround((v - x0) / (x1 - x0) * (width - 2 * margin))); };
    auto py = [&](double v) { return height - margin - static_cast<int>(std::lround((v - lo) / (hi - lo) * (height - 2 * margin))); };
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double shade = 0.6 * static_cast<double>(s) / std::max<std::size_t>(series.size(), 1);
        for (std::size_t i = 0; i + 1 < x.size() && i + 1 < series[s].size(); ++i)
            draw_line(c, py(series[s][i]), px(x[i]), py(series[s][i + 1]), px(x[i + 1]), shade);
    }
    return c;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string(), 0);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace radar
