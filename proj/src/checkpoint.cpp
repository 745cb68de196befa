#include "radar/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "binary_io.hpp"
#include "radar/error.hpp"

namespace radar {
namespace {

constexpr const char* kMagic = "radar-checkpoint";

std::size_t product(const std::vector<std::size_t>& shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

bool has_line_break(const std::string& s) { return s.find('\n') != std::string::npos; }

std::size_t parse_size(const std::string& s, std::size_t offset)
{
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw FormatError("checkpoint: expected an integer, got '" + s + "'", offset);
    return static_cast<std::size_t>(v);
}

} // namespace

const NamedArray* Checkpoint::find(const std::string& name) const
{
    for (const auto& a : arrays) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

const std::string* Checkpoint::state_value(const std::string& key) const
{
    for (const auto& [k, v] : state) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::string exact_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double parse_exact_double(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw FormatError("checkpoint: malformed number '" + s + "'", 0);
    return v;
}

std::string serialize_checkpoint(const Checkpoint& c)
{
    std::ostringstream head;
    head << kMagic << ' ' << c.version << '\n';
    head << "method " << c.method << '\n';
    head << "epoch " << c.epoch << '\n';
    head << "best_val_loss " << exact_double(c.best_val_loss) << '\n';
    for (const auto& [k, v] : c.state) {
        if (has_line_break(k) || has_line_break(v)) throw InvalidArgument("checkpoint: state entries must be single-line");
        head << "state " << k << ' ' << v << '\n';
    }
    for (const auto& [k, v] : c.config) {
        if (has_line_break(k) || has_line_break(v)) throw InvalidArgument("checkpoint: config entries must be single-line");
        head << "config " << k << ' ' << v << '\n';
    }
    std::size_t offset = 0;
    for (const auto& a : c.arrays) {
        if (a.values.size() != product(a.shape)) throw InvalidArgument("checkpoint: array '" + a.name + "' does not match its shape");
        head << "array " << a.name << ' ' << offset << ' ' << a.values.size() << ' ' << a.shape.size();
        for (std::size_t d : a.shape) head << ' ' << d;
        head << '\n';
        offset += a.values.size() * 8;
    }
    head << "end\n";

    std::string out = head.str();
    out.reserve(out.size() + offset);
    for (const auto& a : c.arrays) {
        for (double v : a.values) detail::append_f64_le(out, v);
    }
    return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes)
{
    Checkpoint c;
    struct Entry {
        NamedArray array;
        std::size_t offset;
        std::size_t count;
        std::size_t manifest_pos;
    };
    std::vector<Entry> entries;

    std::size_t pos = 0;
    bool saw_magic = false;
    bool saw_end = false;
    while (pos < bytes.size()) {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string::npos) break;
        const std::string line = bytes.substr(pos, nl - pos);
        const std::size_t line_pos = pos;
        pos = nl + 1;

        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (!saw_magic) {
            if (tag != kMagic) throw FormatError("checkpoint: bad magic", line_pos);
            int version = 0;
            if (!(ls >> version)) throw FormatError("checkpoint: missing version", line_pos);
            if (version != Checkpoint::kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version), line_pos);
            c.version = version;
            saw_magic = true;
            continue;
        }
        if (tag == "end") {
            saw_end = true;
            break;
        }
        auto rest = [&]() {
            std::string r;
            std::getline(ls >> std::ws, r);
            return r;
        };
        if (tag == "method") {
            c.method = rest();
        } else if (tag == "epoch") {
            c.epoch = static_cast<int>(parse_size(rest(), line_pos));
        } else if (tag == "best_val_loss") {
            try {
                c.best_val_loss = parse_exact_double(rest());
            } catch (const FormatError& e) {
                throw FormatError(e.what(), line_pos);
            }
        } else if (tag == "state" || tag == "config") {
            std::string key;
            ls >> key;
            (tag == "state" ? c.state : c.config).emplace_back(key, rest());
        } else if (tag == "array") {
            Entry e{};
            std::size_t ndim = 0;
            if (!(ls >> e.array.name >> e.offset >> e.count >> ndim)) throw FormatError("checkpoint: malformed array entry", line_pos);
            e.array.shape.resize(ndim);
            for (auto& d : e.array.shape) {
                if (!(ls >> d)) throw FormatError("checkpoint: malformed array shape", line_pos);
            }
            if (product(e.array.shape) != e.count) throw FormatError("checkpoint: array '" + e.array.name + "' shape/count mismatch", line_pos);
            e.manifest_pos = line_pos;
            entries.push_back(std::move(e));
        } else {
            throw FormatError("checkpoint: unknown manifest entry '" + tag + "'", line_pos);
        }
    }
    if (!saw_magic) throw FormatError("checkpoint: bad magic", 0);
    if (!saw_end) throw FormatError("checkpoint: manifest not terminated", bytes.size());

    const std::size_t payload = pos;
    for (auto& e : entries) {
        const std::size_t begin = payload + e.offset;
        if (begin + e.count * 8 > bytes.size()) throw FormatError("checkpoint: payload truncated in array '" + e.array.name + "'", bytes.size());
        e.array.values.resize(e.count);
        for (std::size_t i = 0; i < e.count; ++i) e.array.values[i] = detail::read_f64_le(bytes.data() + begin + 8 * i);
        c.arrays.push_back(std::move(e.array));
    }
    std::size_t expected_end = payload;
    for (const auto& a : c.arrays) expected_end += a.values.size() * 8;
    if (bytes.size() != expected_end) throw FormatError("checkpoint: trailing bytes after payload", expected_end);
    return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c)
{
    const std::string bytes = serialize_checkpoint(c);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint " + path.string(), 0);
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return deserialize_checkpoint(bytes);
}

} // namespace radar
