#ifndef HELMNS_CONFIG_HPP
#define HELMNS_CONFIG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmns/checks.hpp"
#include "helmns/grid.hpp"

// Flat key-value run configuration with dotted section keys:
//
//   grid.n = 32 32 32
//   sim.nu = 0.1
//   checks.run = check_theorem1 monitor_theorem34
//   checks.check_theorem1.tolerance = 1e-6
//   output.dir = out/tg32
//
// '#' starts a comment; values are whitespace-separated tokens.

namespace helmns::config {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline KeyValues parse_key_values(std::istream& is, const std::string& source) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
        kv[key] = value;
    }
    return kv;
}

inline KeyValues load_key_values(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    return parse_key_values(is, path);
}

namespace detail {

inline std::vector<std::string> tokens(const std::string& v) {
    std::istringstream is(v);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

inline long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
    }
}

}  // namespace detail

/// Typed access over a KeyValues map that records which keys were used, so
/// unknown keys can be reported as errors.
class Reader {
  public:
    explicit Reader(const KeyValues& kv) : kv_(kv) {}

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback = "") {
        used_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    double number(const std::string& key, double fallback) {
        used_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : detail::to_double(key, it->second);
    }

    double required_number(const std::string& key) {
        used_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'");
        return detail::to_double(key, it->second);
    }

    long integer(const std::string& key, long fallback) {
        used_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : detail::to_long(key, it->second);
    }

    std::vector<double> numbers(const std::string& key, std::size_t count) {
        used_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'");
        const auto toks = detail::tokens(it->second);
        if (toks.size() != count)
            throw ConfigError("key '" + key + "': expected " + std::to_string(count) +
                              " values, got " + std::to_string(toks.size()));
        std::vector<double> out;
        for (const auto& t : toks) out.push_back(detail::to_double(key, t));
        return out;
    }

    std::vector<double> number_list(const std::string& key) {
        used_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'");
        std::vector<double> out;
        for (const auto& t : detail::tokens(it->second)) out.push_back(detail::to_double(key, t));
        return out;
    }

    std::vector<std::string> words(const std::string& key) {
        used_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? std::vector<std::string>{} : detail::tokens(it->second);
    }

    bool flag(const std::string& key, bool fallback) {
        used_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        const std::string& v = it->second;
        if (v == "on" || v == "true" || v == "1") return true;
        if (v == "off" || v == "false" || v == "0") return false;
        throw ConfigError("key '" + key + "': expected on/off, got '" + v + "'");
    }

    void reject_unused() const {
        for (const auto& [key, value] : kv_)
            if (!used_.count(key)) throw ConfigError("unknown key '" + key + "'");
    }

  private:
    const KeyValues& kv_;
    std::set<std::string> used_;
};

struct CheckSettings {
    double tolerance = -1.0;  // negative: the check's own default
    double gate = -1.0;
    long k = 1;
    double eps_lap = 1e-3;
    double delta_min = 0.0;
    double delta_max = 1e3;
    long max_frames = 0;
    long substeps = 0;
    double forced_delta = 0.0;
    double tol_factor = 10.0;
};

struct RunConfig {
    Grid3 grid;
    flow::SimParams sim;
    double t_end = 1.0;
    std::uint64_t seed = 1;
    int snapshot_every = 10;
    std::string ic = "taylor_green";
    double abc_A = 1.0, abc_B = 1.0, abc_C = 1.0;
    std::array<double, 3> vortex_center{};
    double vortex_scale = 0.6, vortex_strength = 1.0;
    long random_kmax = 4;
    double random_amplitude = 1.0;
    std::vector<std::string> checks;
    std::map<std::string, CheckSettings> settings;
    std::string output_dir = "out";
    bool emit_json = true, emit_csv = true, emit_snapshots = true;
    KeyValues raw;  // config echo for the manifest
};

inline RunConfig parse_run_config(const KeyValues& kv) {
    Reader r(kv);
    RunConfig cfg;
    cfg.raw = kv;

    const auto n = r.numbers("grid.n", 3);
    const auto L = r.numbers("grid.length", 3);
    const std::string bnd = r.str("grid.boundary", "periodic");
    Boundary boundary;
    if (bnd == "periodic")
        boundary = Boundary::Periodic;
    else if (bnd == "window")
        boundary = Boundary::TruncatedWindow;
    else
        throw ConfigError("grid.boundary must be 'periodic' or 'window', got '" + bnd + "'");
    try {
        cfg.grid = make_grid({static_cast<int>(n[0]), static_cast<int>(n[1]),
                              static_cast<int>(n[2])},
                             {L[0], L[1], L[2]}, boundary);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    cfg.sim.nu = r.required_number("sim.nu");
    cfg.sim.rho = r.number("sim.rho", 1.0);
    cfg.sim.dt = r.required_number("sim.dt");
    cfg.t_end = r.required_number("sim.t_end");
    cfg.sim.dealias = r.flag("sim.dealias", true);
    cfg.seed = static_cast<std::uint64_t>(r.integer("sim.seed", 1));
    cfg.snapshot_every = static_cast<int>(r.integer("sim.snapshot_every", 10));
    cfg.ic = r.str("sim.ic", "taylor_green");
    cfg.abc_A = r.number("sim.ic.A", 1.0);
    cfg.abc_B = r.number("sim.ic.B", 1.0);
    cfg.abc_C = r.number("sim.ic.C", 1.0);
    cfg.vortex_center = {cfg.grid.length[0] / 2, cfg.grid.length[1] / 2, cfg.grid.length[2] / 2};
    if (r.has("sim.ic.center")) {
        const auto c = r.numbers("sim.ic.center", 3);
        cfg.vortex_center = {c[0], c[1], c[2]};
    } else {
        r.str("sim.ic.center");  // mark as known
    }
    cfg.vortex_scale = r.number("sim.ic.scale", 0.6);
    cfg.vortex_strength = r.number("sim.ic.strength", 1.0);
    cfg.random_kmax = r.integer("sim.ic.kmax", 4);
    cfg.random_amplitude = r.number("sim.ic.amplitude", 1.0);

    if (cfg.ic != "taylor_green" && cfg.ic != "abc" && cfg.ic != "gaussian_vortex" &&
        cfg.ic != "random_solenoidal")
        throw ConfigError("sim.ic: unknown initial condition '" + cfg.ic + "'");

    if (!(cfg.sim.nu > 0)) throw ConfigError("sim.nu must be positive");
    if (!(cfg.sim.rho > 0)) throw ConfigError("sim.rho must be positive");
    if (!(cfg.sim.dt > 0)) throw ConfigError("sim.dt must be positive");
    if (!(cfg.t_end >= 0)) throw ConfigError("sim.t_end must be non-negative");
    if (cfg.snapshot_every < 1) throw ConfigError("sim.snapshot_every must be >= 1");
    const double stepsReal = cfg.t_end / cfg.sim.dt;
    cfg.sim.steps = static_cast<int>(std::lround(stepsReal));
    if (std::abs(stepsReal - cfg.sim.steps) > 1e-9)
        throw ConfigError("sim.t_end must be an integer multiple of sim.dt");
    if (cfg.sim.steps % cfg.snapshot_every != 0)
        throw ConfigError("sim.snapshot_every must divide the step count " +
                          std::to_string(cfg.sim.steps));

    cfg.checks = r.words("checks.run");
    if (cfg.checks.empty())
        for (const auto& c : verify::check_registry()) cfg.checks.push_back(c.name);
    for (const auto& name : cfg.checks) {
        bool known = false;
        for (const auto& c : verify::check_registry()) known = known || c.name == name;
        if (!known) throw ConfigError("checks.run: unknown check '" + name + "'");
        CheckSettings s;
        const std::string base = "checks." + name + ".";
        s.tolerance = r.number(base + "tolerance", s.tolerance);
        if (r.has(base + "tolerance") && !(s.tolerance > 0))
            throw ConfigError(base + "tolerance must be positive");
        s.gate = r.number(base + "gate", s.gate);
        s.k = r.integer(base + "k", s.k);
        s.eps_lap = r.number(base + "eps_lap", s.eps_lap);
        s.delta_min = r.number(base + "delta_min", s.delta_min);
        s.delta_max = r.number(base + "delta_max", s.delta_max);
        s.max_frames = r.integer(base + "max_frames", s.max_frames);
        s.substeps = r.integer(base + "substeps", s.substeps);
        s.forced_delta = r.number(base + "forced_delta", s.forced_delta);
        s.tol_factor = r.number(base + "tol_factor", s.tol_factor);
        cfg.settings[name] = s;
    }

    cfg.output_dir = r.str("output.dir", "out");
    const auto formats = r.words("output.formats");
    if (!formats.empty()) {
        cfg.emit_json = false;
        cfg.emit_csv = false;
        for (const auto& f : formats) {
            if (f == "json")
                cfg.emit_json = true;
            else if (f == "csv")
                cfg.emit_csv = true;
            else
                throw ConfigError("output.formats: unknown format '" + f + "'");
        }
    }
    cfg.emit_snapshots = r.flag("output.snapshots", true);

    r.reject_unused();
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    return parse_run_config(load_key_values(path));
}

}  // namespace helmns::config

#endif  // HELMNS_CONFIG_HPP
