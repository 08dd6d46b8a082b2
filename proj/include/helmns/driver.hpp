#ifndef HELMNS_DRIVER_HPP
#define HELMNS_DRIVER_HPP

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "helmns/config.hpp"
#include "helmns/report_io.hpp"
#include "helmns/snapshot.hpp"
#include "helmns/version.hpp"

// Experiment orchestration behind the command-line entry point:
// simulate -> run the configured checks -> emit reports, snapshots, and a
// manifest. Exit codes: 0 all gating checks passed, 1 a gating check
// failed, 2 configuration error, 3 simulation abort.

namespace helmns::driver {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSimulationError = 3;

inline VectorField build_ic(const config::RunConfig& cfg) {
    if (cfg.ic == "taylor_green") return flow::ic_taylor_green(cfg.grid);
    if (cfg.ic == "abc") return flow::ic_abc(cfg.grid, cfg.abc_A, cfg.abc_B, cfg.abc_C);
    if (cfg.ic == "gaussian_vortex")
        return flow::ic_gaussian_vortex(cfg.grid, cfg.vortex_center, cfg.vortex_scale,
                                        cfg.vortex_strength);
    return flow::ic_random_solenoidal(cfg.grid, cfg.seed, static_cast<int>(cfg.random_kmax),
                                      cfg.random_amplitude);
}

inline CheckReport run_check(const std::string& name, const flow::Trajectory& traj,
                             const config::CheckSettings& s) {
    auto tol = [&](double fallback) { return s.tolerance > 0 ? s.tolerance : fallback; };
    if (name == "check_reconstruction") return verify::check_reconstruction(traj, tol(1e-9));
    if (name == "check_pressure_harmonic")
        return verify::check_pressure_harmonic(traj, tol(1e-6));
    if (name == "check_gamma_consistency") return verify::check_gamma_consistency(traj);
    if (name == "check_vorticity_transport")
        return verify::check_vorticity_transport(traj, s.tol_factor);
    if (name == "check_lemma1_identity") return verify::check_lemma1_identity(traj, tol(1e-9));
    if (name == "check_theorem1") return verify::check_theorem1(traj, tol(1e-6));
    if (name == "check_corollary1")
        return verify::check_corollary1(traj, s.gate > 0 ? s.gate : 1e-8);
    if (name == "check_theorem2") {
        verify::Theorem2Options opt;
        opt.k = static_cast<int>(s.k);
        opt.tolerance = tol(1e-6);
        opt.gate = s.gate > 0 ? s.gate : 1e-8;
        return verify::check_theorem2(traj, opt);
    }
    if (name == "monitor_theorem34") return verify::monitor_theorem34(traj);
    if (name == "delta_diagnostic") return verify::delta_diagnostic(traj, s.eps_lap);
    if (name == "lambda_compare") {
        verify::LambdaCompareOptions opt;
        opt.epsLap = s.eps_lap;
        opt.deltaMin = s.delta_min;
        opt.deltaMax = s.delta_max;
        opt.maxFrames = static_cast<int>(s.max_frames);
        opt.substepsOverride = static_cast<int>(s.substeps);
        opt.forcedDelta = s.forced_delta;
        return verify::lambda_compare(traj, opt);
    }
    throw config::ConfigError("unknown check '" + name + "'");
}

struct RunResult {
    int exit_code = kExitOk;
    std::filesystem::path manifest_path;
    std::vector<CheckReport> reports;
};

inline RunResult run_experiment(const config::RunConfig& cfg, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    RunResult result;

    fs::create_directories(cfg.output_dir);
    const fs::path outDir(cfg.output_dir);

    log << "simulating: ic=" << cfg.ic << " grid=" << cfg.grid.n[0] << "^3 nu=" << cfg.sim.nu
        << " dt=" << cfg.sim.dt << " steps=" << cfg.sim.steps << "\n";
    flow::Trajectory traj;
    try {
        traj = flow::simulate(build_ic(cfg), cfg.sim, cfg.snapshot_every);
    } catch (const flow::SimulationError& e) {
        log << "simulation aborted: " << e.what() << "\n";
        result.exit_code = kExitSimulationError;
        return result;
    }

    nlohmann::json manifest;
    manifest["artifact_version"] = kVersion;
    manifest["config"] = nlohmann::json(cfg.raw);
    manifest["checks"] = nlohmann::json::array();
    manifest["snapshots"] = nlohmann::json::array();
    manifest["reports"] = nlohmann::json::array();

    std::vector<std::string> files;
    if (cfg.emit_snapshots) {
        for (std::size_t j = 0; j < traj.states.size(); ++j) {
            char name[64];
            std::snprintf(name, sizeof(name), "state_%04zu.hnsf", j);
            write_snapshot(traj.states[j].u, (outDir / name).string());
            manifest["snapshots"].push_back(name);
        }
    }

    bool anyGatingFailure = false;
    for (const auto& name : cfg.checks) {
        const auto t0 = clock::now();
        CheckReport rep = run_check(name, traj, cfg.settings.at(name));
        const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
        std::string csvName;
        if (cfg.emit_csv) {
            csvName = name + ".csv";
            report_io::write_series_csv(rep, (outDir / csvName).string());
            manifest["reports"].push_back(csvName);
        }
        if (cfg.emit_json) {
            const std::string jsonName = name + ".json";
            report_io::write_json(report_io::to_json(rep, csvName),
                                  (outDir / jsonName).string());
            manifest["reports"].push_back(jsonName);
        }
        nlohmann::json summary;
        summary["name"] = rep.name;
        summary["passed"] = rep.passed;
        summary["informational"] = rep.informational;
        summary["applicable"] = rep.applicable;
        summary["worst_residual"] = rep.worst_sup();
        summary["runtime_seconds"] = seconds;
        manifest["checks"].push_back(summary);
        const bool gates = !rep.informational;
        if (gates && !rep.passed) anyGatingFailure = true;
        log << (rep.passed ? "[PASS] " : "[FAIL] ") << rep.name
            << (rep.informational ? " (informational)" : "")
            << (rep.applicable ? "" : " (not applicable)") << ": worst residual "
            << rep.worst_sup() << ", tolerance " << rep.tolerance << ", " << seconds << " s\n";
        result.reports.push_back(std::move(rep));
    }

    result.manifest_path = outDir / "manifest.json";
    report_io::write_json(manifest, result.manifest_path.string());
    log << "manifest: " << result.manifest_path.string() << "\n";
    result.exit_code = anyGatingFailure ? kExitCheckFailure : kExitOk;
    return result;
}

inline int run(const std::string& configPath, std::ostream& log = std::cout) {
    config::RunConfig cfg;
    try {
        cfg = config::load_run_config(configPath);
    } catch (const config::ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return run_experiment(cfg, log).exit_code;
}

inline std::string list_checks_text() {
    std::string out;
    for (const auto& c : verify::check_registry()) {
        out += c.name + " (" + c.anchor + (c.informational ? ", informational" : "") + ")\n";
    }
    return out;
}

// -- backend cross-validation ladder ----------------------------------------

struct LadderConfig {
    std::vector<int> n;
    std::vector<double> length;
    double sigma = 1.0;
    double strength = 1.0;
    double probe_halfwidth = 1.5;
    double tolerance = 1.0;  // per-rung gate on the relative discrepancy
    std::string field = "gaussian_vortex";
    std::string output_dir = "out";
};

inline LadderConfig parse_ladder_config(const config::KeyValues& kv) {
    config::Reader r(kv);
    LadderConfig cfg;
    for (double v : r.number_list("ladder.n")) cfg.n.push_back(static_cast<int>(v));
    cfg.length = r.number_list("ladder.length");
    if (cfg.n.size() != cfg.length.size() || cfg.n.empty())
        throw config::ConfigError("ladder.n and ladder.length must list the same rung count");
    cfg.sigma = r.number("ladder.sigma", cfg.sigma);
    cfg.strength = r.number("ladder.strength", cfg.strength);
    cfg.probe_halfwidth = r.number("ladder.probe_halfwidth", cfg.probe_halfwidth);
    cfg.tolerance = r.number("ladder.tolerance", cfg.tolerance);
    cfg.field = r.str("ladder.field", cfg.field);
    if (cfg.field != "gaussian_vortex" && cfg.field != "sinusoid")
        throw config::ConfigError("ladder.field must be 'gaussian_vortex' or 'sinusoid'");
    cfg.output_dir = r.str("output.dir", cfg.output_dir);
    r.reject_unused();
    return cfg;
}

inline int compare_backends(const std::string& configPath, std::ostream& log = std::cout) {
    LadderConfig cfg;
    try {
        cfg = parse_ladder_config(config::load_key_values(configPath));
    } catch (const config::ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    const fs::path csvPath = fs::path(cfg.output_dir) / "backend_compare.csv";
    std::ofstream csv(csvPath);
    csv << "n,length,h,rel_sup_discrepancy,rms_discrepancy,decay_warning\n";
    log << "rung  n     L        h        rel_discrepancy\n";
    for (std::size_t rung = 0; rung < cfg.n.size(); ++rung) {
        const int n = cfg.n[rung];
        const double L = cfg.length[rung];
        Grid3 w = make_grid({n, n, n}, {L, L, L}, Boundary::TruncatedWindow);
        Grid3 p = make_grid({n, n, n}, {L, L, L}, Boundary::Periodic);
        const double s = cfg.sigma, A = cfg.strength;
        helmholtz::VectorFieldFn fn;
        if (cfg.field == "gaussian_vortex") {
            fn = [L, s, A](double x, double y, double z) {
                const double dx = x - L / 2, dy = y - L / 2, dz = z - L / 2;
                const double e = A * std::exp(-(dx * dx + dy * dy + dz * dz) / (2 * s * s));
                return std::array<double, 3>{-dy / (s * s) * e, dx / (s * s) * e, 0.0};
            };
        } else {
            fn = [L, A](double x, double y, double) {
                return std::array<double, 3>{A * std::sin(2 * std::numbers::pi * y / L),
                                             A * std::sin(2 * std::numbers::pi * x / L), 0.0};
            };
        }
        auto rep = helmholtz::quadrature_vs_spectral_report(fn, w, p,
                                                            {cfg.probe_halfwidth, cfg.tolerance});
        const bool warned = rep.notes.find("decay warning") != std::string::npos;
        csv << n << ',' << report_io::format_double(L) << ','
            << report_io::format_double(L / n) << ','
            << report_io::format_double(rep.worst_sup()) << ','
            << report_io::format_double(rep.worst_l2()) << ',' << (warned ? 1 : 0) << '\n';
        log << rung << "     " << n << "    " << L << "    " << L / n << "    "
            << rep.worst_sup() << (warned ? "  [decay warning]" : "") << "\n";
    }
    csv.close();
    log << "wrote " << csvPath.string() << "\n";
    return kExitOk;
}

}  // namespace helmns::driver

#endif  // HELMNS_DRIVER_HPP
