#include "radar/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "radar/error.hpp"

namespace radar {
namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_value(const std::string& key, const std::string& text)
{
    T v{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid value '" + text + "' for key '" + key + "'");
    return v;
}

template <class T>
std::string to_text(T v)
{
    if constexpr (std::is_same_v<T, std::string>) {
        return v;
    } else if constexpr (std::is_floating_point_v<T>) {
        return format_number(v);
    } else {
        return std::to_string(v);
    }
}

// One table drives both directions so the key set cannot drift.
template <class Config, class F>
void for_each_field(Config& c, F&& f)
{
    f("side_cells", c.side_cells);
    f("cell_size", c.cell_size);
    f("standoff", c.standoff);
    f("antennas", c.antennas);
    f("f0", c.f0);
    f("bandwidth", c.bandwidth);
    f("n_freqs", c.n_freqs);
    f("mnist_dir", c.mnist_dir);
    f("n_train", c.n_train);
    f("n_val", c.n_val);
    f("n_test", c.n_test);
    f("seed", c.seed);
    f("fista_lambda", c.fista_lambda);
    f("fista_max_iter", c.fista_max_iter);
    f("blocks", c.blocks);
    f("block_lambda", c.block_lambda);
    f("res_channels", c.res_channels);
    f("res_blocks", c.res_blocks);
    f("dnn_hidden", c.dnn_hidden);
    f("epochs", c.epochs);
    f("batch_size", c.batch_size);
    f("learning_rate", c.learning_rate);
    f("lr_factor", c.lr_factor);
    f("lr_patience", c.lr_patience);
    f("loss_lambda1", c.loss_lambda1);
    f("loss_lambda2", c.loss_lambda2);
    f("snr_list", c.snr_list);
    f("f0_list_ghz", c.f0_list_ghz);
    f("sweep_samples", c.sweep_samples);
    f("out_dir", c.out_dir);
}

} // namespace

std::string format_number(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_value<double>("list", item));
    }
    return out;
}

void ExperimentConfig::apply_fast_profile()
{
    n_train = 200;
    n_val = 50;
    n_test = 100;
    epochs = 20;
}

void ExperimentConfig::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("config: ") + what);
    };
    require(side_cells >= 1, "side_cells must be >= 1");
    require(cell_size > 0.0, "cell_size must be positive");
    require(standoff > 0.0, "standoff must be positive");
    require(antennas >= 1, "antennas must be >= 1");
    require(f0 > 0.0 && bandwidth > 0.0, "f0 and bandwidth must be positive");
    require(n_freqs >= 1, "n_freqs must be >= 1");
    require(n_train >= 1 && n_val >= 1 && n_test >= 1, "split sizes must be >= 1");
    require(fista_lambda >= 0.0 && block_lambda >= 0.0, "lambdas must be >= 0");
    require(fista_max_iter >= 1, "fista_max_iter must be >= 1");
    require(blocks >= 1 && res_channels >= 1 && res_blocks >= 0 && dnn_hidden >= 1, "network sizes must be positive");
    require(epochs >= 0 && batch_size >= 1, "epochs >= 0 and batch_size >= 1 required");
    require(learning_rate > 0.0 && lr_factor > 0.0 && lr_factor < 1.0, "learning rate settings out of range");
    require(lr_patience >= 0, "lr_patience must be >= 0");
    require(loss_lambda1 >= 0.0 && loss_lambda2 >= 0.0, "loss weights must be >= 0");
    require(sweep_samples >= 1, "sweep_samples must be >= 1");
}

KeyValues ExperimentConfig::to_key_values() const
{
    KeyValues out;
    for_each_field(*this, [&out](const char* key, const auto& v) { out.emplace_back(key, to_text(v)); });
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
    bool found = false;
    for_each_field(*this, [&](const char* k, auto& field) {
        if (key != k) return;
        found = true;
        using T = std::decay_t<decltype(field)>;
        if constexpr (std::is_same_v<T, std::string>) {
            field = value;
        } else {
            field = parse_value<T>(key, value);
        }
    });
    if (!found) throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace radar
