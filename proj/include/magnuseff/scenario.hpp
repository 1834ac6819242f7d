// scenario.hpp — Configuration ingestion and scenario execution for the CLI:
// simulate / fidelity / sweep / validate-tau / oracle-check, with deterministic
// CSV and JSON emission.
//
// Config format: flat `key = value` lines, `#` comments. With units = "Delta"
// (default) frequencies are in units of Δ and times in units of 2π/|Δ|;
// units = "absolute" takes everything as given. Complex couplings are
// (magnitude, phase-in-radians) pairs.

#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <sstream>

#include "metrics.hpp"
#include "oracle_check.hpp"

namespace magnuseff::scenario {

using json = nlohmann::json;
using prop::MethodLabel;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------- key parsing ---------------------------------

struct KeyValues {
    std::map<std::string, std::string> values;
    mutable std::map<std::string, bool> consumed;

    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    void set(const std::string& key, const std::string& value) {
        if (key.empty()) throw ConfigError("empty config key");
        values[key] = value;
    }

    bool has(const std::string& key) const {
        auto it = values.find(key);
        if (it != values.end()) consumed[key] = true;
        return it != values.end();
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        consumed[key] = true;
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        consumed[key] = true;
        char* end = nullptr;
        const double v = std::strtod(it->second.c_str(), &end);
        if (end == it->second.c_str() || *end != '\0')
            throw ConfigError("config key '" + key + "': not a number: " + it->second);
        return v;
    }

    int get_int(const std::string& key, int fallback) const {
        const double v = get_double(key, fallback);
        if (v != std::floor(v)) throw ConfigError("config key '" + key + "': not an integer");
        return static_cast<int>(v);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        consumed[key] = true;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("config key '" + key + "': expected true/false");
    }

    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        consumed[key] = true;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            char* end = nullptr;
            out.push_back(std::strtod(tok.c_str(), &end));
            if (end == tok.c_str() || *end != '\0')
                throw ConfigError("config key '" + key + "': bad list element: " + tok);
        }
        if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
        return out;
    }

    void reject_unknown() const {
        for (const auto& [k, v] : values) {
            (void)v;
            if (!consumed.count(k)) throw ConfigError("unknown config key: " + k);
        }
    }
};

// ------------------------------ scenario config -------------------------------

enum class InitialStateKind { Probe, Explicit };

struct ScenarioConfig {
    lambda::LambdaParams params; // absolute units
    bool units_delta = true;

    double t_start = 0.0; // absolute
    double t_end = 0.0;
    int n_points = 2;

    std::vector<MethodLabel> methods;
    bool tau_auto = true;
    double tau = 0.0; // absolute, when explicit

    InitialStateKind initial = InitialStateKind::Probe;
    double initial_a = 0.0;
    double initial_b = 0.0;

    std::string out_dir = ".";
    bool emit_f_prime_exact = false;
    int jobs = 1;

    // sweep
    std::string sweep_axis; // delta | Delta | Omega_mag | tau
    std::vector<double> sweep_values;
    std::string sweep_reduce = "min_F";

    // oracle grid
    lambda::OracleGridConfig oracle;

    Tolerances tol = default_tolerances();
    double tol_scale = 1.0;
};

inline MethodLabel parse_method(const std::string& name) {
    if (name == "Exact") return MethodLabel::Exact;
    if (name == "AE") return MethodLabel::AE;
    if (name == "ME2") return MethodLabel::ME2;
    if (name == "ME24") return MethodLabel::ME24;
    if (name == "ME234") return MethodLabel::ME234;
    throw ConfigError("unknown method label: " + name);
}

inline ScenarioConfig parse_scenario(const KeyValues& kv) {
    ScenarioConfig cfg;
    const std::string units = kv.get_string("units", "Delta");
    if (units != "Delta" && units != "absolute")
        throw ConfigError("units must be \"Delta\" or \"absolute\"");
    cfg.units_delta = units == "Delta";

    const double Delta = kv.get_double("Delta", 1.0);
    if (Delta == 0.0) throw ConfigError("Delta must be nonzero");
    const double fscale = cfg.units_delta ? std::abs(Delta) : 1.0; // frequency unit
    const double tscale = cfg.units_delta ? 2.0 * M_PI / std::abs(Delta) : 1.0;

    cfg.params.Delta = Delta;
    cfg.params.delta = kv.get_double("delta", 0.0) * fscale;
    cfg.params.eta = kv.get_double("eta", 0.0) * fscale;
    cfg.params.Omega0 = std::polar(kv.get_double("Omega0_mag", 0.0) * fscale,
                                   kv.get_double("Omega0_phase", 0.0));
    cfg.params.Omega1 = std::polar(kv.get_double("Omega1_mag", 0.0) * fscale,
                                   kv.get_double("Omega1_phase", 0.0));
    try {
        cfg.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }

    cfg.t_start = kv.get_double("t_start", 0.0) * tscale;
    cfg.t_end = kv.get_double("t_end", 30.0) * tscale;
    cfg.n_points = kv.get_int("n_points", 601);
    if (!(cfg.t_end > cfg.t_start) || cfg.n_points < 2)
        throw ConfigError("require t_end > t_start and n_points >= 2");

    const std::string methods = kv.get_string("methods", "Exact,ME24");
    std::stringstream ss(methods);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = KeyValues::trim(tok);
        if (!tok.empty()) cfg.methods.push_back(parse_method(tok));
    }
    if (cfg.methods.empty()) throw ConfigError("methods list is empty");
    for (MethodLabel m : cfg.methods)
        if (m == MethodLabel::ME234 && cfg.params.delta != 0.0)
            throw ConfigError("ME234 requires delta = 0");

    const std::string tau = kv.get_string("tau", "auto");
    if (tau == "auto") {
        cfg.tau_auto = true;
    } else {
        cfg.tau_auto = false;
        char* end = nullptr;
        cfg.tau = std::strtod(tau.c_str(), &end) * tscale;
        if (end == tau.c_str() || *end != '\0' || !(cfg.tau > 0.0))
            throw ConfigError("tau must be \"auto\" or a positive number");
    }

    const std::string init = kv.get_string("initial_state", "probe");
    if (init == "probe") {
        cfg.initial = InitialStateKind::Probe;
    } else if (init == "explicit") {
        cfg.initial = InitialStateKind::Explicit;
        cfg.initial_a = kv.get_double("initial_a", 0.0);
        cfg.initial_b = kv.get_double("initial_b", 0.0);
    } else {
        throw ConfigError("initial_state must be \"probe\" or \"explicit\"");
    }

    cfg.out_dir = kv.get_string("out_dir", ".");
    cfg.emit_f_prime_exact = kv.get_bool("emit_f_prime_exact", false);
    cfg.jobs = kv.get_int("jobs", 1);
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");

    cfg.sweep_axis = kv.get_string("sweep_axis", "");
    cfg.sweep_values = kv.get_double_list("sweep_values", {});
    cfg.sweep_reduce = kv.get_string("sweep_reduce", "min_F");

    cfg.oracle.orders = [&] {
        std::vector<int> orders;
        for (double v : kv.get_double_list("oracle_orders", {1, 2, 3, 4}))
            orders.push_back(static_cast<int>(v));
        return orders;
    }();
    cfg.oracle.delta_over_Delta = kv.get_double_list("oracle_delta", {0.0, 0.05, 0.2});
    cfg.oracle.omega_over_Delta = kv.get_double_list("oracle_Omega", {0.05, 0.3});
    cfg.oracle.tau_periods = kv.get_double_list("oracle_tau", {6.0, 20.0, 60.0});
    cfg.oracle.Delta = std::abs(Delta);
    cfg.oracle.threshold = kv.get_double("oracle_threshold", 1e-6);

    cfg.tol_scale = env_tolerance_scale();
    cfg.tol = default_tolerances().scaled(cfg.tol_scale);
    cfg.oracle.threshold *= cfg.tol_scale;

    kv.reject_unknown();
    return cfg;
}

// ------------------------------ deterministic IO ------------------------------

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path);
    out << content;
}

// -------------------------------- grid/tau prep -------------------------------

struct PreparedRun {
    double tau = 0.0;
    bool tau_auto = false;
    lambda::TauDiagnostics diagnostics;
    prop::TimeGrid grid{0.0, 1.0, 2};
    double dt_slices = 1.0; // grid step in units of τ (k or 1/m, integers)
    bool grid_adjusted = false;
    int requested_points = 0;
    double requested_t_end = 0.0;
};

// τ from select_tau (auto) or as given. The span is snapped up to a whole
// number of slices and every slice boundary lands on a grid point: the step is
// either an integer multiple of τ or an integer subdivision of it. n_points is
// adjusted upward to the next valid grid.
inline PreparedRun prepare_run(const ScenarioConfig& cfg) {
    PreparedRun run;
    run.tau_auto = cfg.tau_auto;
    if (cfg.tau_auto) {
        run.diagnostics = lambda::select_tau(cfg.params, cfg.tol); // throws RegimeError
        run.tau = run.diagnostics.tau;
    } else {
        run.tau = cfg.tau;
        run.diagnostics = lambda::diagnostics_for_tau(cfg.params, cfg.tau, cfg.tol);
    }

    run.requested_points = cfg.n_points;
    run.requested_t_end = cfg.t_end;

    const double span = cfg.t_end - cfg.t_start;
    long n_slices = static_cast<long>(std::ceil(span / run.tau - 1e-9));
    if (n_slices < 1) n_slices = 1;
    const double t_end = cfg.t_start + n_slices * run.tau;

    int n_points = 0;
    if (cfg.n_points <= n_slices + 1) {
        // stride whole slices: largest divisor of n_slices still dense enough
        long per_step = n_slices / std::max<long>(1, cfg.n_points - 1);
        while (per_step > 1 && n_slices % per_step != 0) --per_step;
        if (per_step < 1) per_step = 1;
        n_points = static_cast<int>(n_slices / per_step) + 1;
        run.dt_slices = static_cast<double>(per_step);
    } else {
        // subdivide each slice uniformly
        const long m = (cfg.n_points - 2) / n_slices + 1;
        n_points = static_cast<int>(n_slices * m) + 1;
        run.dt_slices = 1.0 / static_cast<double>(m);
    }

    run.grid = prop::TimeGrid(cfg.t_start, t_end, n_points);
    run.grid_adjusted = (n_points != cfg.n_points) || (t_end != cfg.t_end);
    return run;
}

// --------------------------- methods and initial state ------------------------

inline HermitianMatrix method_hamiltonian(const ScenarioConfig& cfg, MethodLabel m, double tau) {
    switch (m) {
        case MethodLabel::Exact:
            return lambda::hamiltonian_lab(cfg.params, cfg.tol);
        case MethodLabel::AE:
            return lambda::ae_lab_hamiltonian(cfg.params, cfg.tol);
        case MethodLabel::ME2:
        case MethodLabel::ME24:
        case MethodLabel::ME234: {
            // ME2/ME24 use the coarse-grained (τ-independent) coefficients —
            // the object whose explicit τ-dependence has been averaged out;
            // the third order has no coarse limit, so ME234 evaluates its
            // oscillatory coefficient at the selected slice width.
            lambda::EffHamiltonianSpec spec;
            spec.orders = m == MethodLabel::ME2 ? std::vector<int>{2}
                          : m == MethodLabel::ME24 ? std::vector<int>{2, 4}
                                                   : std::vector<int>{2, 3, 4};
            if (m == MethodLabel::ME234) {
                spec.regime = lambda::EffRegime::FiniteTau;
                spec.tau = tau;
            } else {
                spec.regime = lambda::EffRegime::CoarseGrained;
            }
            return lambda::effective_lab_hamiltonian(cfg.params, spec, cfg.tol);
        }
    }
    throw ConfigError("unreachable method label");
}

inline std::pair<Vec, Vec> initial_states(const ScenarioConfig& cfg) {
    if (cfg.initial == InitialStateKind::Probe) return prop::probe_states(cfg.params);
    Vec psi0(3), psi1(3);
    const double c = std::cos(0.5 * cfg.initial_a), s = std::sin(0.5 * cfg.initial_a);
    psi0[0] = c;
    psi0[1] = std::polar(s, cfg.initial_b);
    psi1[0] = -s;
    psi1[1] = std::polar(c, cfg.initial_b);
    return {psi0, psi1};
}

inline json params_json(const ScenarioConfig& cfg) {
    return json{{"delta", cfg.params.delta},
                {"Delta", cfg.params.Delta},
                {"Omega0_mag", std::abs(cfg.params.Omega0)},
                {"Omega0_phase", std::arg(cfg.params.Omega0)},
                {"Omega1_mag", std::abs(cfg.params.Omega1)},
                {"Omega1_phase", std::arg(cfg.params.Omega1)},
                {"eta", cfg.params.eta},
                {"x", cfg.params.x()}};
}

inline json run_json(const PreparedRun& run) {
    return json{{"tau", run.tau},
                {"tau_auto", run.tau_auto},
                {"tau_multiple_of_fast_period", run.diagnostics.multiple},
                {"ratio_fast", run.diagnostics.ratio_fast},
                {"ratio_slow", run.diagnostics.ratio_slow},
                {"convergence_margin", run.diagnostics.convergence},
                {"grid",
                 {{"t_start", run.grid.t_start},
                  {"t_end", run.grid.t_end},
                  {"n_points", run.grid.n_points},
                  {"dt_in_slices", run.dt_slices},
                  {"adjusted", run.grid_adjusted},
                  {"requested_n_points", run.requested_points},
                  {"requested_t_end", run.requested_t_end}}}};
}

// --------------------------------- simulate ----------------------------------

struct SimulateResult {
    PreparedRun run;
    prop::TimeGrid grid{0.0, 1.0, 2};
    std::vector<std::string> columns; // beyond t
    std::vector<std::vector<double>> data; // data[col][point]
    std::string csv_path;
    std::string summary_path;
};

inline SimulateResult run_simulate(const ScenarioConfig& cfg, bool write_files = true) {
    const PreparedRun run = prepare_run(cfg);
    const auto [psi0, psi1] = initial_states(cfg);
    const Vec two = Vec::basis(3, 2);

    SimulateResult res;
    res.run = run;
    res.grid = run.grid;

    for (MethodLabel m : cfg.methods) {
        const HermitianMatrix h = method_hamiltonian(cfg, m, run.tau);
        const prop::PropagatorSeries series = prop::propagate_static(h, run.grid, m);
        const prop::TimeSeries hist = prop::population_histories(
            series, psi0, {{"pop_psi0", psi0}, {"pop_psi1", psi1}, {"pop_2", two}});
        for (std::size_t c = 0; c < hist.channels.size(); ++c) {
            res.columns.push_back(std::string(prop::method_name(m)) + "_" + hist.channels[c]);
            res.data.push_back(hist.values[c]);
        }
    }

    if (write_files) {
        std::filesystem::create_directories(cfg.out_dir);
        std::string csv = "t";
        for (const std::string& c : res.columns) csv += "," + c;
        csv += "\n";
        for (int k = 0; k < run.grid.n_points; ++k) {
            csv += fmt(run.grid.time(k));
            for (const auto& col : res.data) csv += "," + fmt(col[static_cast<std::size_t>(k)]);
            csv += "\n";
        }
        res.csv_path = cfg.out_dir + "/populations.csv";
        write_text(res.csv_path, csv);

        json summary{{"schema_version", "1"},
                     {"command", "simulate"},
                     {"params", params_json(cfg)},
                     {"run", run_json(run)},
                     {"csv", "populations.csv"}};
        res.summary_path = cfg.out_dir + "/simulate_summary.json";
        write_text(res.summary_path, summary.dump(2) + "\n");
    }
    return res;
}

// --------------------------------- fidelity ----------------------------------

struct MethodFidelity {
    MethodLabel method;
    std::vector<metrics::FidelityReport> reports;
    double min_F = 1.0;
    double max_L_m = 0.0;
    double min_F_prime_m = 1.0;
    std::vector<double> window_min_F; // per Raman-period window
};

struct FidelityResult {
    PreparedRun run;
    prop::TimeGrid grid{0.0, 1.0, 2};
    std::vector<MethodFidelity> methods;
    double raman_period = 0.0;
    std::string csv_path;
    std::string summary_path;
};

inline FidelityResult run_fidelity(const ScenarioConfig& cfg, bool write_files = true) {
    bool has_exact = false;
    for (MethodLabel m : cfg.methods) has_exact |= (m == MethodLabel::Exact);
    if (!has_exact || cfg.methods.size() < 2)
        throw ConfigError("fidelity requires methods = Exact plus at least one effective method");

    const PreparedRun run = prepare_run(cfg);
    const metrics::RelevantSubspace sub = metrics::RelevantSubspace::lambda_default();

    FidelityResult res;
    res.run = run;
    res.grid = run.grid;

    const double omega_tilde = std::abs(lambda::me2_coarse(cfg.params).Omega_tilde);
    res.raman_period = omega_tilde > 0.0 ? 2.0 * M_PI / omega_tilde
                                         : run.grid.t_end - run.grid.t_start;

    const prop::PropagatorSeries exact =
        prop::propagate_static(lambda::hamiltonian_lab(cfg.params, cfg.tol), run.grid);

    bool reference_seen = false;
    for (MethodLabel m : cfg.methods) {
        if (m == MethodLabel::Exact && !reference_seen) {
            reference_seen = true; // first Exact is the reference side
            continue;
        }
        const prop::PropagatorSeries eff =
            prop::propagate_static(method_hamiltonian(cfg, m, run.tau), run.grid, m);
        MethodFidelity mf;
        mf.method = m;
        mf.reports = metrics::fidelity_timeseries(exact, eff, sub, cfg.emit_f_prime_exact, cfg.tol);
        for (const auto& r : mf.reports) {
            mf.min_F = std::min(mf.min_F, r.F);
            mf.max_L_m = std::max(mf.max_L_m, r.L_m);
            mf.min_F_prime_m = std::min(mf.min_F_prime_m, r.F_prime_m);
        }
        const int n_windows =
            std::max(1, static_cast<int>((run.grid.t_end - run.grid.t_start) / res.raman_period));
        mf.window_min_F.assign(static_cast<std::size_t>(n_windows), 1.0);
        for (std::size_t k = 0; k < mf.reports.size(); ++k) {
            const double t = mf.reports[k].t - run.grid.t_start;
            int w = std::min(n_windows - 1, static_cast<int>(t / res.raman_period));
            mf.window_min_F[static_cast<std::size_t>(w)] =
                std::min(mf.window_min_F[static_cast<std::size_t>(w)], mf.reports[k].F);
        }
        res.methods.push_back(std::move(mf));
    }

    if (write_files) {
        std::filesystem::create_directories(cfg.out_dir);
        std::string csv = "t";
        for (const auto& mf : res.methods) {
            const std::string base = prop::method_name(mf.method);
            csv += "," + base + "_F," + base + "_L_m," + base + "_F_prime_m";
            if (cfg.emit_f_prime_exact) csv += "," + base + "_F_prime";
        }
        csv += "\n";
        for (int k = 0; k < run.grid.n_points; ++k) {
            csv += fmt(run.grid.time(k));
            for (const auto& mf : res.methods) {
                const auto& r = mf.reports[static_cast<std::size_t>(k)];
                csv += "," + fmt(r.F) + "," + fmt(r.L_m) + "," + fmt(r.F_prime_m);
                if (cfg.emit_f_prime_exact) csv += "," + fmt(r.F_prime.value_or(-1.0));
            }
            csv += "\n";
        }
        res.csv_path = cfg.out_dir + "/fidelity.csv";
        write_text(res.csv_path, csv);

        json methods_json = json::array();
        for (const auto& mf : res.methods) {
            methods_json.push_back(json{{"method", prop::method_name(mf.method)},
                                        {"min_F", mf.min_F},
                                        {"max_L_m", mf.max_L_m},
                                        {"min_F_prime_m", mf.min_F_prime_m},
                                        {"window_min_F", mf.window_min_F}});
        }
        json summary{{"schema_version", "1"},
                     {"command", "fidelity"},
                     {"params", params_json(cfg)},
                     {"run", run_json(run)},
                     {"raman_period", res.raman_period},
                     {"methods", methods_json},
                     {"csv", "fidelity.csv"}};
        res.summary_path = cfg.out_dir + "/fidelity_summary.json";
        write_text(res.summary_path, summary.dump(2) + "\n");
    }
    return res;
}

// ----------------------------------- sweep -----------------------------------

struct SweepPoint {
    double axis_value = 0.0;
    MethodLabel method;
    double value = 0.0;
    std::string error; // empty on success
};

struct SweepResult {
    std::string axis;
    std::string reduce;
    std::vector<SweepPoint> points; // ordered by axis value then method order
    std::string csv_path;
};

inline ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis, double v) {
    ScenarioConfig cfg = base;
    const double fscale = cfg.units_delta ? std::abs(cfg.params.Delta) : 1.0;
    const double tscale = cfg.units_delta ? 2.0 * M_PI / std::abs(cfg.params.Delta) : 1.0;
    if (axis == "delta") {
        cfg.params.delta = v * fscale;
    } else if (axis == "Delta") {
        cfg.params.Delta = v * (base.units_delta ? std::abs(base.params.Delta) : 1.0);
    } else if (axis == "Omega_mag") {
        cfg.params.Omega0 = std::polar(v * fscale, std::arg(base.params.Omega0));
        cfg.params.Omega1 = std::polar(v * fscale, std::arg(base.params.Omega1));
    } else if (axis == "tau") {
        cfg.tau_auto = false;
        cfg.tau = v * tscale;
    } else {
        throw ConfigError("sweep_axis must be one of delta, Delta, Omega_mag, tau");
    }
    cfg.params.validate();
    return cfg;
}

inline SweepResult run_sweep(const ScenarioConfig& cfg, bool write_files = true) {
    if (cfg.sweep_axis.empty() || cfg.sweep_values.empty())
        throw ConfigError("sweep requires sweep_axis and sweep_values");
    if (cfg.sweep_reduce != "min_F" && cfg.sweep_reduce != "max_L" &&
        cfg.sweep_reduce != "final_F_prime_m")
        throw ConfigError("sweep_reduce must be min_F, max_L, or final_F_prime_m");

    SweepResult res;
    res.axis = cfg.sweep_axis;
    res.reduce = cfg.sweep_reduce;

    auto evaluate_point = [&](double v) {
        std::vector<SweepPoint> points;
        try {
            const ScenarioConfig pt = apply_axis(cfg, cfg.sweep_axis, v);
            const FidelityResult fr = run_fidelity(pt, false);
            for (const auto& mf : fr.methods) {
                SweepPoint sp;
                sp.axis_value = v;
                sp.method = mf.method;
                if (cfg.sweep_reduce == "min_F") sp.value = mf.min_F;
                if (cfg.sweep_reduce == "max_L") sp.value = mf.max_L_m;
                if (cfg.sweep_reduce == "final_F_prime_m")
                    sp.value = mf.reports.back().F_prime_m;
                points.push_back(sp);
            }
        } catch (const std::exception& e) {
            for (MethodLabel m : cfg.methods) {
                if (m == MethodLabel::Exact) continue;
                SweepPoint sp;
                sp.axis_value = v;
                sp.method = m;
                sp.value = std::numeric_limits<double>::quiet_NaN();
                std::string msg = e.what();
                for (char& c : msg)
                    if (c == ',' || c == '\n') c = ';';
                sp.error = msg;
                points.push_back(sp);
            }
        }
        return points;
    };

    // execute up to `jobs` points concurrently; assemble in axis order
    std::vector<std::future<std::vector<SweepPoint>>> futures(cfg.sweep_values.size());
    std::size_t next = 0;
    while (next < cfg.sweep_values.size()) {
        const std::size_t batch =
            std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs),
                                  cfg.sweep_values.size() - next);
        for (std::size_t j = 0; j < batch; ++j)
            futures[next + j] = std::async(std::launch::async, evaluate_point,
                                           cfg.sweep_values[next + j]);
        for (std::size_t j = 0; j < batch; ++j) {
            auto pts = futures[next + j].get();
            res.points.insert(res.points.end(), pts.begin(), pts.end());
        }
        next += batch;
    }

    if (write_files) {
        std::filesystem::create_directories(cfg.out_dir);
        std::string csv = "axis,axis_value,method,metric,value,error\n";
        for (const auto& p : res.points) {
            csv += res.axis + "," + fmt(p.axis_value) + "," + prop::method_name(p.method) + "," +
                   res.reduce + "," + fmt(p.value) + "," + p.error + "\n";
        }
        res.csv_path = cfg.out_dir + "/sweep.csv";
        write_text(res.csv_path, csv);
    }
    return res;
}

// -------------------------------- validate-tau --------------------------------

struct ValidateTauResult {
    lambda::TauDiagnostics diagnostics;
    bool all_pass = false;
    std::string json_path;
};

inline ValidateTauResult run_validate_tau(const ScenarioConfig& cfg, bool write_files = true) {
    ValidateTauResult res;
    res.diagnostics = cfg.tau_auto
                          ? lambda::tau_diagnostics(cfg.params, cfg.tol)
                          : lambda::diagnostics_for_tau(cfg.params, cfg.tau, cfg.tol);
    res.all_pass = res.diagnostics.pass_fast && res.diagnostics.pass_slow &&
                   res.diagnostics.pass_convergence;

    if (write_files) {
        std::filesystem::create_directories(cfg.out_dir);
        json j{{"schema_version", "1"},
               {"command", "validate-tau"},
               {"params", params_json(cfg)},
               {"tau", res.diagnostics.tau},
               {"tau_multiple_of_fast_period", res.diagnostics.multiple},
               {"ratio_fast", res.diagnostics.ratio_fast},
               {"ratio_slow", res.diagnostics.ratio_slow},
               {"convergence_margin", res.diagnostics.convergence},
               {"pass_fast", res.diagnostics.pass_fast},
               {"pass_slow", res.diagnostics.pass_slow},
               {"pass_convergence", res.diagnostics.pass_convergence},
               {"all_pass", res.all_pass}};
        res.json_path = cfg.out_dir + "/validate_tau.json";
        write_text(res.json_path, j.dump(2) + "\n");
    }
    return res;
}

// -------------------------------- oracle-check --------------------------------

struct OracleCheckResult {
    std::vector<lambda::OracleCell> cells;
    double max_deviation = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string json_path;
};

inline OracleCheckResult run_oracle_check(const ScenarioConfig& cfg, bool write_files = true) {
    OracleCheckResult res;
    res.threshold = cfg.oracle.threshold;
    res.cells = lambda::run_oracle_grid(cfg.oracle, cfg.tol);
    for (const auto& c : res.cells) res.max_deviation = std::max(res.max_deviation, c.rel_deviation);
    res.pass = res.max_deviation <= res.threshold;

    if (write_files) {
        std::filesystem::create_directories(cfg.out_dir);
        json cells = json::array();
        for (const auto& c : res.cells)
            cells.push_back(json{{"order", c.order},
                                 {"delta", c.delta},
                                 {"Omega", c.omega},
                                 {"tau_periods", c.tau_periods},
                                 {"rel_deviation", c.rel_deviation},
                                 {"pass", c.pass}});
        json j{{"schema_version", "1"},
               {"command", "oracle-check"},
               {"threshold", res.threshold},
               {"max_deviation", res.max_deviation},
               {"pass", res.pass},
               {"cells", cells}};
        res.json_path = cfg.out_dir + "/oracle_check.json";
        write_text(res.json_path, j.dump(2) + "\n");
    }
    return res;
}

} // namespace magnuseff::scenario
