#include "trajkit/config.hpp"
#include "trajkit/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

namespace trajkit {

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw Error(ErrorKind::InvalidArgument, key + ": expected a number, got '" + v + "'");
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    long out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw Error(ErrorKind::InvalidArgument, key + ": expected an integer, got '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
        throw Error(ErrorKind::InvalidArgument, key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    const auto l = lower(v);
    if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
    if (l == "false" || l == "0" || l == "no" || l == "off") return false;
    throw Error(ErrorKind::InvalidArgument, key + ": expected true or false, got '" + v + "'");
}

struct Binding {
    const char* key;
    std::function<void(PipelineConfig&, const std::string& key, const std::string& value)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define TK_DOUBLE(KEY, FIELD)                                                                                      \
    Binding{KEY, [](PipelineConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_double(k, v); }, \
            [](const PipelineConfig& c) { return io::format_double(c.FIELD); }}
#define TK_LONG(KEY, FIELD, TYPE)                                                                          \
    Binding{KEY,                                                                                           \
            [](PipelineConfig& c, const std::string& k, const std::string& v) {                            \
                const long x = to_long(k, v);                                                              \
                if (x < 0) throw Error(ErrorKind::InvalidArgument, k + ": must be >= 0");                  \
                c.FIELD = static_cast<TYPE>(x);                                                            \
            },                                                                                             \
            [](const PipelineConfig& c) { return std::to_string(c.FIELD); }}
#define TK_BOOL(KEY, FIELD)                                                                                      \
    Binding{KEY, [](PipelineConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_bool(k, v); }, \
            [](const PipelineConfig& c) { return std::string(c.FIELD ? "true" : "false"); }}

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> table = {
        Binding{"run.seed",
                [](PipelineConfig& c, const std::string& k, const std::string& v) { c.experiment.seed = to_u64(k, v); },
                [](const PipelineConfig& c) { return std::to_string(c.experiment.seed); }},
        TK_DOUBLE("preprocess.sigma_k", experiment.preprocess.sigma_k),
        TK_DOUBLE("preprocess.smoothing", experiment.preprocess.smoothing),
        TK_LONG("features.window", window.window_len, std::size_t),
        TK_LONG("features.stride", window.stride, std::size_t),
        TK_DOUBLE("pca.ratio", experiment.pca.target_ratio),
        TK_BOOL("pca.standardize", experiment.pca.standardize),
        TK_DOUBLE("svm.c", experiment.svm.C),
        TK_DOUBLE("svm.gamma", experiment.svm.gamma),
        Binding{"svm.kernel",
                [](PipelineConfig& c, const std::string& k, const std::string& v) {
                    const auto l = lower(v);
                    if (l != "rbf" && l != "linear")
                        throw Error(ErrorKind::InvalidArgument, k + ": expected rbf or linear, got '" + v + "'");
                    c.experiment.svm.linear = l == "linear";
                },
                [](const PipelineConfig& c) { return std::string(c.experiment.svm.linear ? "linear" : "rbf"); }},
        TK_DOUBLE("svm.tol", experiment.svm.tol),
        TK_DOUBLE("mlp.lr", experiment.mlp.lr),
        TK_LONG("mlp.epochs", experiment.mlp.epochs, int),
        Binding{"mlp.seed",
                [](PipelineConfig& c, const std::string& k, const std::string& v) { c.experiment.mlp.seed = to_u64(k, v); },
                [](const PipelineConfig& c) { return std::to_string(c.experiment.mlp.seed); }},
        TK_DOUBLE("adams.h", experiment.adams.h),
        TK_LONG("adams.steps", experiment.adams.steps, int),
        TK_DOUBLE("adams.coverage", experiment.adams.coverage_multiplier),
        TK_LONG("adams.curve_samples", experiment.adams.curve_samples, int),
        TK_LONG("corpus.per_state", experiment.corpus.per_state[0], int),  // expanded below
        TK_DOUBLE("corpus.duration", experiment.corpus.duration),
        TK_LONG("corpus.history", experiment.history, std::size_t),
        TK_DOUBLE("corpus.test_fraction", experiment.test_fraction),
        TK_DOUBLE("simulate.duration", scenario.duration),
        TK_DOUBLE("simulate.period", scenario.period),
        TK_DOUBLE("simulate.speed", scenario.params.cruise_speed),
        TK_DOUBLE("simulate.climb_rate", scenario.params.climb_rate),
        TK_DOUBLE("simulate.descent_rate", scenario.params.descent_rate),
        TK_DOUBLE("simulate.turn_rate", scenario.params.turn_rate),
        TK_DOUBLE("simulate.turn_start", scenario.params.turn_start),
        TK_DOUBLE("simulate.circle_radius", scenario.params.circle_radius),
        TK_DOUBLE("simulate.roll_time", scenario.params.roll_time),
        Binding{"simulate.turn_angle_deg",
                [](PipelineConfig& c, const std::string& k, const std::string& v) {
                    c.scenario.params.turn_angle = to_double(k, v) * std::numbers::pi / 180.0;
                },
                [](const PipelineConfig& c) {
                    return io::format_double(c.scenario.params.turn_angle * 180.0 / std::numbers::pi);
                }},
        TK_DOUBLE("noise.gps", scenario.noise.gps),
        TK_DOUBLE("noise.pressure", scenario.noise.pressure),
        TK_DOUBLE("noise.gyro", scenario.noise.gyro),
        TK_DOUBLE("noise.accel", scenario.noise.accel),
    };
    return table;
}

#undef TK_DOUBLE
#undef TK_LONG
#undef TK_BOOL

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

} // namespace

IniValues parse_ini(const std::string& text, const std::string& source) {
    IniValues out;
    std::istringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorKind::InvalidArgument, source + ":" + std::to_string(lineno) + ": unterminated section");
            section = lower(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::InvalidArgument, source + ":" + std::to_string(lineno) + ": expected key = value");
        const auto key = lower(trim(line.substr(0, eq)));
        if (section.empty())
            throw Error(ErrorKind::InvalidArgument, source + ":" + std::to_string(lineno) + ": key outside a section");
        out[section + "." + key] = trim(line.substr(eq + 1));
    }
    return out;
}

void apply_ini(PipelineConfig& config, const IniValues& values) {
    for (const auto& [key, value] : values) {
        const auto& table = bindings();
        auto it = std::find_if(table.begin(), table.end(), [&](const Binding& b) { return key == b.key; });
        if (it == table.end()) throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
        it->set(config, key, value);
        if (key == "corpus.per_state") config.experiment.corpus.per_state.fill(config.experiment.corpus.per_state[0]);
        if (key.rfind("noise.", 0) == 0) config.experiment.corpus.noise = config.scenario.noise;
    }
}

void validate_config(const PipelineConfig& c) {
    const auto& e = c.experiment;
    require(e.preprocess.sigma_k > 0.0, "preprocess.sigma_k must be > 0");
    require(e.preprocess.smoothing >= 0.0 && e.preprocess.smoothing <= 1.0, "preprocess.smoothing must lie in [0, 1]");
    require(c.window.window_len >= 2, "features.window must be >= 2");
    require(c.window.stride >= 1, "features.stride must be >= 1");
    require(e.pca.target_ratio > 0.0 && e.pca.target_ratio <= 1.0, "pca.ratio must lie in (0, 1]");
    require(e.svm.C > 0.0, "svm.c must be > 0");
    require(e.svm.tol > 0.0, "svm.tol must be > 0");
    require(std::isfinite(e.svm.gamma), "svm.gamma must be finite");
    require(e.mlp.lr > 0.0, "mlp.lr must be > 0");
    require(e.mlp.epochs >= 1, "mlp.epochs must be >= 1");
    require(e.adams.h > 0.0, "adams.h must be > 0");
    require(e.adams.steps >= 1, "adams.steps must be >= 1");
    require(e.adams.coverage_multiplier > 0.0, "adams.coverage must be > 0");
    require(e.adams.curve_samples >= 3, "adams.curve_samples must be >= 3");
    for (int n : e.corpus.per_state) require(n >= 1, "corpus.per_state must be >= 1");
    require(e.corpus.duration > 0.0, "corpus.duration must be > 0");
    require(e.history >= 3, "corpus.history must be >= 3");
    require(static_cast<double>(e.history) * e.corpus.period < e.corpus.duration,
            "corpus.history must leave future ticks inside corpus.duration");
    require(e.test_fraction > 0.0 && e.test_fraction < 1.0, "corpus.test_fraction must lie in (0, 1)");
    try {
        validate_scenario(c.scenario);
    } catch (const Error& err) {
        throw Error(ErrorKind::InvalidArgument, std::string("simulate: ") + err.what());
    }
}

PipelineConfig load_config(const std::optional<std::filesystem::path>& path) {
    PipelineConfig config;
    std::optional<std::filesystem::path> source = path;
    if (!source) {
        if (const char* env = std::getenv("TRAJKIT_CONFIG"); env && *env) source = std::filesystem::path(env);
    }
    if (source) apply_ini(config, parse_ini(io::read_text(*source), source->string()));
    validate_config(config);
    return config;
}

std::string dump_config(const PipelineConfig& config) {
    std::string out, section;
    for (const auto& b : bindings()) {
        const std::string key = b.key;
        const auto dot = key.find('.');
        const auto sec = key.substr(0, dot);
        if (sec != section) {
            if (!section.empty()) out += "\n";
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += key.substr(dot + 1) + " = " + b.get(config) + "\n";
    }
    return out;
}

} // namespace trajkit
