// magnuseff — coarse-grained effective Hamiltonians for the driven three-level
// Λ system. Subcommands: simulate, fidelity, sweep, validate-tau, oracle-check.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-quality failure
// (oracle threshold exceeded or quadrature budget), 4 regime violation (no
// coarse-graining window for tau = auto).

#include <CLI11.hpp>

#include <iostream>

#include "magnuseff/scenario.hpp"

namespace {

using namespace magnuseff;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int jobs = 0;
    bool emit_f_prime_exact = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override, repeatable: --set key=value");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--jobs", args.jobs, "max concurrent sweep points");
    cmd->add_flag("--emit-f-prime-exact", args.emit_f_prime_exact,
                  "also compute the exact post-selected fidelity");
}

scenario::ScenarioConfig build_config(const CommonArgs& args) {
    scenario::KeyValues kv;
    if (!args.config_path.empty()) kv.load_file(args.config_path);
    for (const std::string& ov : args.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw scenario::ConfigError("--set expects key=value, got: " + ov);
        kv.set(scenario::KeyValues::trim(ov.substr(0, eq)),
               scenario::KeyValues::trim(ov.substr(eq + 1)));
    }
    if (!args.out_dir.empty()) kv.set("out_dir", args.out_dir);
    if (args.jobs > 0) kv.set("jobs", std::to_string(args.jobs));
    if (args.emit_f_prime_exact) kv.set("emit_f_prime_exact", "true");
    return scenario::parse_scenario(kv);
}

void emit_error(const std::string& kind, const std::string& message) {
    scenario::json err{{"error", kind}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coarse-grained effective Hamiltonians for the driven three-level system"};
    app.require_subcommand(1);

    CommonArgs simulate_args, fidelity_args, sweep_args, validate_args, oracle_args;
    CLI::App* simulate = app.add_subcommand("simulate", "population histories per method");
    add_common(simulate, simulate_args);
    CLI::App* fidelity = app.add_subcommand("fidelity", "subspace fidelity and leakage vs Exact");
    add_common(fidelity, fidelity_args);
    CLI::App* sweep = app.add_subcommand("sweep", "reduce fidelity metrics along a parameter axis");
    add_common(sweep, sweep_args);
    CLI::App* validate = app.add_subcommand("validate-tau", "coarse-graining window diagnostics");
    add_common(validate, validate_args);
    CLI::App* oracle =
        app.add_subcommand("oracle-check", "analytic vs quadrature Magnus-term equivalence");
    add_common(oracle, oracle_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const auto res = scenario::run_simulate(build_config(simulate_args));
            std::cout << res.csv_path << "\n" << res.summary_path << "\n";
            return 0;
        }
        if (fidelity->parsed()) {
            const auto res = scenario::run_fidelity(build_config(fidelity_args));
            std::cout << res.csv_path << "\n" << res.summary_path << "\n";
            return 0;
        }
        if (sweep->parsed()) {
            const auto res = scenario::run_sweep(build_config(sweep_args));
            std::cout << res.csv_path << "\n";
            return 0;
        }
        if (validate->parsed()) {
            const auto res = scenario::run_validate_tau(build_config(validate_args));
            std::cout << res.json_path << "\n";
            return 0;
        }
        if (oracle->parsed()) {
            const auto res = scenario::run_oracle_check(build_config(oracle_args));
            std::cout << res.json_path << "\n";
            if (!res.pass) {
                emit_error("oracle-threshold",
                           "max relative deviation " + std::to_string(res.max_deviation) +
                               " exceeds threshold " + std::to_string(res.threshold));
                return 3;
            }
            return 0;
        }
    } catch (const scenario::ConfigError& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const lambda::RegimeError& e) {
        emit_error("regime", e.what());
        return 4;
    } catch (const QuadratureError& e) {
        emit_error("numerical-quality", e.what());
        return 3;
    } catch (const NumericsError& e) {
        emit_error("numerical-quality", e.what());
        return 3;
    }
    return 0;
}
