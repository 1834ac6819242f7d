// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "magnuseff/scenario.hpp"
#include "oracle_helpers.hpp"

using namespace magnuseff;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double ms;
};

std::vector<Criterion> results;

template <typename Fn>
void run_criterion(int id, const std::string& name, Fn&& fn) {
    Criterion c{id, name, false, "", 0.0};
    const auto start = Clock::now();
    try {
        c.pass = fn(c.detail);
    } catch (const std::exception& e) {
        c.pass = false;
        c.detail = std::string("exception: ") + e.what();
    }
    c.ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    std::printf("criterion %2d [%s] %-38s %10.1f ms  %s\n", id, c.pass ? "PASS" : "FAIL",
                name.c_str(), c.ms, c.detail.c_str());
    std::fflush(stdout);
    results.push_back(std::move(c));
}

lambda::LambdaParams symmetric(double delta, double Delta, double omega, double eta = 0.0) {
    lambda::LambdaParams p;
    p.delta = delta;
    p.Delta = Delta;
    p.Omega0 = omega;
    p.Omega1 = omega;
    p.eta = eta;
    return p;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

scenario::ScenarioConfig fig3_regime_config(const char* out_dir) {
    scenario::KeyValues kv;
    kv.set("units", "absolute");
    kv.set("Omega0_mag", "0.3");
    kv.set("Omega1_mag", "0.3");
    kv.set("methods", "Exact,ME2,ME24");
    const auto [e10, e21] = lambda::exact_splittings_delta0(symmetric(0.0, 1.0, 0.3));
    (void)e21;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", 3.1 * 2.0 * M_PI / e10);
    kv.set("t_end", buf);
    kv.set("n_points", "1201");
    kv.set("out_dir", out_dir);
    return scenario::parse_scenario(kv);
}

// ------------------------------- criteria ------------------------------------

bool criterion1(std::string& detail) {
    // warm-up so the timed section measures the computation, not first-touch
    const lambda::LambdaParams p = symmetric(0.0, 1.0, 0.3);
    (void)herm_eig(lambda::hamiltonian_lab(p));

    const auto start = Clock::now();
    const EigResult eig = herm_eig(lambda::hamiltonian_lab(p));
    const auto [e10, e21] = lambda::exact_splittings_delta0(p);
    const double d10 = std::abs((eig.eigenvalues[1] - eig.eigenvalues[0]) - e10);
    const double d21 = std::abs((eig.eigenvalues[2] - eig.eigenvalues[1]) - e21);
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

    detail = "dev " + fmt6(std::max(d10, d21)) + ", " + fmt6(ms) + " ms";
    return d10 <= 1e-12 && d21 <= 1e-12 && ms < 1.0;
}

bool criterion2(std::string& detail) {
    // |split(ME2) − ε₁₀| = ε₁₀·O(x), |split(ME2+ME4) − ε₁₀| = ε₁₀·O(x²),
    // ratio bound 1.5·x as stated. The exact expansion forces the ratio to
    // 2x(1 − 2.5x)/(1 − 2x + 5x²) > 1.5x, so this criterion cannot pass as
    // written; the module-level 3x bound is reported alongside.
    bool pass = true;
    for (double omega : {0.3, 0.15}) {
        const lambda::LambdaParams p = symmetric(0.0, 1.0, omega);
        const double x = p.x();
        const auto [e10, e21] = lambda::exact_splittings_delta0(p);
        (void)e21;
        lambda::EffHamiltonianSpec s2;
        s2.orders = {2};
        lambda::EffHamiltonianSpec s24;
        s24.orders = {2, 4};
        const EigResult g2 = herm_eig(lambda::effective_lab_hamiltonian(p, s2));
        const EigResult g24 = herm_eig(lambda::effective_lab_hamiltonian(p, s24));
        const double err2 = std::abs(g2.eigenvalues[1] - g2.eigenvalues[0] - e10);
        const double err24 = std::abs(g24.eigenvalues[1] - g24.eigenvalues[0] - e10);
        const double ratio = err24 / err2;
        detail += "x=" + fmt6(x) + ": ratio=" + fmt6(ratio) + " vs 1.5x=" + fmt6(1.5 * x) +
                  " (3x=" + fmt6(3.0 * x) + (ratio <= 3.0 * x ? " ok" : " FAIL") + "); ";
        if (!(ratio <= 1.5 * x)) pass = false;
    }
    return pass;
}

bool criterion3(std::string& detail) {
    scenario::KeyValues kv;
    kv.set("Omega0_mag", "0.3");
    kv.set("Omega1_mag", "0.3");
    kv.set("out_dir", "acceptance_out");
    const scenario::ScenarioConfig cfg = scenario::parse_scenario(kv);
    const scenario::OracleCheckResult res = scenario::run_oracle_check(cfg);
    detail = "cells " + std::to_string(res.cells.size()) + ", max dev " +
             fmt6(res.max_deviation) + " vs 1e-6";
    return res.pass && res.cells.size() == 48;
}

bool criterion4(std::string& detail) {
    const scenario::ScenarioConfig cfg = fig3_regime_config("acceptance_out");
    const scenario::FidelityResult res = scenario::run_fidelity(cfg, false);

    const auto [e10, e21] = lambda::exact_splittings_delta0(cfg.params);
    (void)e21;
    const double raman = 2.0 * M_PI / e10;

    double me24_min = 1.0, me24_max = 0.0;
    std::vector<double> me2_window_min;
    for (const auto& mf : res.methods) {
        if (mf.method == prop::MethodLabel::ME24) {
            for (const auto& r : mf.reports) {
                me24_min = std::min(me24_min, r.F);
                me24_max = std::max(me24_max, r.F);
            }
        }
        if (mf.method == prop::MethodLabel::ME2) {
            const int n_windows =
                static_cast<int>((res.grid.t_end - res.grid.t_start) / raman);
            me2_window_min.assign(static_cast<std::size_t>(n_windows), 1.0);
            for (const auto& r : mf.reports) {
                const int w = std::min(n_windows - 1,
                                       static_cast<int>((r.t - res.grid.t_start) / raman));
                me2_window_min[static_cast<std::size_t>(w)] =
                    std::min(me2_window_min[static_cast<std::size_t>(w)], r.F);
            }
        }
    }
    bool decreasing = me2_window_min.size() >= 3;
    for (std::size_t w = 1; w < me2_window_min.size(); ++w)
        decreasing = decreasing && me2_window_min[w] < me2_window_min[w - 1];

    detail = "ME24 min_F=" + fmt6(me24_min) + " in [0.75,0.85], max_F=" + fmt6(me24_max) +
             ", ME2 windows";
    for (double w : me2_window_min) detail += " " + fmt6(w);
    return me24_min >= 0.75 && me24_min <= 0.85 && me24_max >= 0.98 && decreasing;
}

bool criterion5(std::string& detail) {
    const scenario::ScenarioConfig cfg = fig3_regime_config("acceptance_out");
    const scenario::FidelityResult res = scenario::run_fidelity(cfg, false);
    double min_fpm = 1.0;
    for (const auto& mf : res.methods)
        if (mf.method == prop::MethodLabel::ME24) min_fpm = mf.min_F_prime_m;
    // measured at build time: 0.998362; asserted inside a ±0.02 band and the
    // stated 0.97 floor
    const double frozen = 0.998362;
    detail = "ME24 min_F'_m=" + fmt6(min_fpm) + " (frozen " + fmt6(frozen) + " ± 0.02)";
    return min_fpm >= 0.97 && std::abs(min_fpm - frozen) <= 0.02;
}

bool criterion6(std::string& detail) {
    scenario::KeyValues kv;
    kv.set("units", "absolute");
    kv.set("Omega0_mag", "0.3");
    kv.set("Omega1_mag", "0.3");
    kv.set("methods", "Exact,ME24");
    kv.set("t_end", "4700");
    kv.set("n_points", "6001");
    kv.set("sweep_axis", "Omega_mag");
    // values sqrt(|Ω₀Ω₁|/(2Δ²)) ∈ {0.3, 0.15, 0.075, 0.0375} → Ω = s√2
    kv.set("sweep_values",
           "0.42426406871192851,0.21213203435596426,0.10606601717798213,0.05303300858899106");
    kv.set("sweep_reduce", "max_L");
    kv.set("jobs", "2");
    kv.set("out_dir", "acceptance_out");
    const scenario::SweepResult res = scenario::run_sweep(scenario::parse_scenario(kv));

    bool mono = true;
    for (std::size_t i = 1; i < res.points.size(); ++i) {
        if (!res.points[i].error.empty() || !res.points[i - 1].error.empty()) return false;
        mono = mono && res.points[i].value < res.points[i - 1].value;
    }
    const double last = res.points.back().value;
    detail = "max_L:";
    for (const auto& p : res.points) detail += " " + fmt6(p.value);
    return mono && last <= 0.01;
}

bool criterion7(std::string& detail) {
    const metrics::RelevantSubspace sub = metrics::RelevantSubspace::lambda_default();
    const prop::TimeGrid grid(0.0, 40.0, 41);

    double max_heff_dev = 0.0, max_metric_dev = 0.0;
    for (lambda::EffHamiltonianSpec spec :
         {lambda::EffHamiltonianSpec{{2}, lambda::EffRegime::CoarseGrained, lambda::EffFrame::Lab, 0.0},
          lambda::EffHamiltonianSpec{{2, 4}, lambda::EffRegime::CoarseGrained, lambda::EffFrame::Lab,
                                     0.0}}) {
        std::vector<metrics::FidelityReport> base;
        for (double eta : {0.0, 1.0, 10.0}) {
            const lambda::LambdaParams p = symmetric(0.0, 1.0, 0.3, eta);
            const Mat h = lambda::effective_lab_hamiltonian(p, spec).m();
            const Mat h0 =
                lambda::effective_lab_hamiltonian(symmetric(0.0, 1.0, 0.3), spec).m();
            max_heff_dev = std::max(
                max_heff_dev, (h - h0 - cplx(eta, 0.0) * Mat::identity(3)).max_abs());

            const prop::PropagatorSeries ex =
                prop::propagate_static(lambda::hamiltonian_lab(p), grid);
            const prop::PropagatorSeries ef = prop::propagate_static(
                lambda::effective_lab_hamiltonian(p, spec), grid, prop::MethodLabel::ME24);
            const auto reports = metrics::fidelity_timeseries(ex, ef, sub);
            if (eta == 0.0) {
                base = reports;
            } else {
                for (std::size_t k = 0; k < reports.size(); ++k) {
                    max_metric_dev = std::max(max_metric_dev,
                                              std::abs(reports[k].F - base[k].F));
                    max_metric_dev = std::max(max_metric_dev,
                                              std::abs(reports[k].L_m - base[k].L_m));
                    max_metric_dev = std::max(
                        max_metric_dev, std::abs(reports[k].F_prime_m - base[k].F_prime_m));
                }
            }
        }
    }

    // AE is gauge sensitive: the η-shifted elimination changes the coefficients
    const lambda::EffCoefficients ae0 = lambda::ae_effective(symmetric(0.0, 1.0, 0.3, 0.0));
    const lambda::EffCoefficients ae1 = lambda::ae_effective(symmetric(0.0, 1.0, 0.3, 1.0));
    const double ae_gap = std::abs(ae1.S0 - ae0.S0) + std::abs(ae1.Omega_tilde - ae0.Omega_tilde);

    detail = "H_eff dev " + fmt6(max_heff_dev) + ", metric dev " + fmt6(max_metric_dev) +
             ", AE shift " + fmt6(ae_gap);
    return max_heff_dev <= 1e-13 && max_metric_dev <= 1e-10 && ae_gap > 1e-3;
}

bool criterion8(std::string& detail) {
    double worst = 0.0;
    {
        const lambda::LambdaParams p = symmetric(0.0, 1.0, 0.3);
        const TimeSlice slice(0.0, 6.0 * 2.0 * M_PI, SliceMode::Centered);
        const MagnusTerms terms =
            magnus_terms_numeric(lambda::hamiltonian_interaction(p), slice, 4);
        for (int order = 1; order <= 4; ++order)
            worst = std::max(worst, lambda::structural_off_pattern(
                                        terms.F[static_cast<std::size_t>(order - 1)], order));
    }
    {
        const lambda::LambdaParams p = symmetric(0.2, 1.0, 0.3);
        const TimeSlice slice(0.0, 6.0 * 2.0 * M_PI, SliceMode::Centered);
        const MagnusTerms terms =
            magnus_terms_numeric(lambda::hamiltonian_interaction(p), slice, 2);
        for (int order = 1; order <= 2; ++order)
            worst = std::max(worst, lambda::structural_off_pattern(
                                        terms.F[static_cast<std::size_t>(order - 1)], order));
    }
    detail = "max off-pattern mass " + fmt6(worst) + " vs 1e-9";
    return worst <= 1e-9;
}

bool criterion9(std::string& detail) {
    std::mt19937 rng(20240604);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const Mat u = oracle::random_unitary(rng, 3);
        const Mat ueff = oracle::random_unitary(rng, 3);
        const metrics::SubspaceFidelity sf = metrics::subspace_fidelity(u, ueff);
        const double brute = oracle::brute_force_min_fidelity(u.adjoint() * ueff, 1024);
        worst = std::max(worst, std::abs(sf.F - brute));
    }
    detail = "max |production − brute| " + fmt6(worst) + " vs 1e-6";
    return worst <= 1e-6;
}

bool criterion10(std::string& detail) {
    const metrics::RelevantSubspace sub = metrics::RelevantSubspace::lambda_default();
    double worst_herm = 0.0, worst_unit = 0.0, worst_norm = 0.0, worst_block = 0.0,
           worst_res = 0.0;
    for (double dd : {0.0, 0.05, 0.2})
        for (double oo : {0.05, 0.3})
            for (double tp : {6.0, 20.0, 60.0}) {
                const lambda::LambdaParams p = symmetric(dd, 1.0, oo);
                const double tau = tp * 2.0 * M_PI;
                const TimeSlice slice(0.0, tau, SliceMode::Centered);

                // Hermiticity of every computed Magnus term
                const int max_order = dd == 0.0 ? 4 : 2;
                const MagnusTerms terms =
                    magnus_terms_numeric(lambda::hamiltonian_interaction(p), slice, max_order);
                for (const Mat& f : terms.F)
                    worst_herm = std::max(worst_herm,
                                          hermiticity_defect(f) / std::max(1.0, f.max_abs()));

                // resonance continuity: the near-resonant path reproduces the
                // analytic single-frequency limit (e^{iωτ} − 1)/(iω)
                const double w_res = 1e-9;
                const double tiny[] = {w_res};
                const cplx wtau{0.0, w_res * tau};
                const cplx expected =
                    tau * (1.0 + wtau / 2.0 + wtau * wtau / 6.0 + wtau * wtau * wtau / 24.0);
                worst_res = std::max(worst_res,
                                     std::abs(ordered_integral(tiny, tau) - expected) / tau);

                // propagator unitarity, population normalization, block structure
                lambda::EffHamiltonianSpec spec;
                spec.orders = dd == 0.0 ? std::vector<int>{2, 4} : std::vector<int>{2};
                spec.regime = lambda::EffRegime::FiniteTau;
                spec.tau = tau;
                const HermitianMatrix h_eff = lambda::effective_lab_hamiltonian(p, spec);
                worst_block =
                    std::max(worst_block, commutator(h_eff.m(), sub.projector).max_abs());

                const prop::TimeGrid grid(0.0, 6.0 * tau, 13);
                const auto [psi0, psi1] = prop::probe_states(p);
                const Vec two = Vec::basis(3, 2);
                for (const auto& series :
                     {prop::propagate_static(lambda::hamiltonian_lab(p), grid),
                      prop::propagate_static(h_eff, grid, prop::MethodLabel::ME24)}) {
                    for (const Mat& u : series.unitaries)
                        worst_unit = std::max(
                            worst_unit,
                            (u.adjoint() * u - Mat::identity(3)).max_abs());
                    const prop::TimeSeries hist = prop::population_histories(
                        series, psi0, {{"a", psi0}, {"b", psi1}, {"c", two}});
                    for (int k = 0; k < grid.n_points; ++k)
                        worst_norm = std::max(
                            worst_norm, std::abs(hist.values[0][static_cast<std::size_t>(k)] +
                                                 hist.values[1][static_cast<std::size_t>(k)] +
                                                 hist.values[2][static_cast<std::size_t>(k)] -
                                                 1.0));
                }
            }
    detail = "herm " + fmt6(worst_herm) + ", unit " + fmt6(worst_unit) + ", norm " +
             fmt6(worst_norm) + ", block " + fmt6(worst_block) + ", res " + fmt6(worst_res);
    return worst_herm <= 1e-10 && worst_unit <= 1e-10 && worst_norm <= 1e-9 &&
           worst_block <= 1e-14 && worst_res <= 1e-8;
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    run_criterion(1, "exact-splitting reproduction", criterion1);
    run_criterion(2, "order-of-accuracy of splittings", criterion2);
    run_criterion(3, "oracle equivalence grid", criterion3);
    run_criterion(4, "fidelity floor and ME2 decay", criterion4);
    run_criterion(5, "post-selection recovery", criterion5);
    run_criterion(6, "leakage scaling sweep", criterion6);
    run_criterion(7, "gauge invariance suite", criterion7);
    run_criterion(8, "structural algebra masks", criterion8);
    run_criterion(9, "minimizer correctness", criterion9);
    run_criterion(10, "invariant suite on oracle grid", criterion10);

    int failures = 0;
    for (const auto& c : results) failures += c.pass ? 0 : 1;
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures;
}
