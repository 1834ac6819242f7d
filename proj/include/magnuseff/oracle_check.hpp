// oracle_check.hpp — Analytic-vs-quadrature equivalence grid for the Λ model:
// per (order, δ, Ω, τ) cell, the closed-form Magnus term is compared against
// the nested-quadrature evaluation of the same slice. Also the structural
// sparsity masks of F₁…F₄ (odd orders couple relevant ↔ |2⟩ only, even orders
// are block diagonal).

#pragma once

#include <vector>

#include "lambda_model.hpp"

namespace magnuseff::lambda {

struct OracleCell {
    int order = 0;
    double delta = 0.0;
    double omega = 0.0; // |Ω₀| = |Ω₁|
    double tau_periods = 0.0; // τ in units of 2π/Δ
    double rel_deviation = 0.0;
    bool pass = false;
};

// Closed-form F_order(t_j|τ) for the Λ model (analytic route).
inline Mat analytic_magnus_term(const LambdaParams& p, const TimeSlice& slice, int order) {
    switch (order) {
        case 1:
            return cplx(slice.tau, 0.0) * me1_interaction(p, slice);
        case 2:
            return cplx(slice.tau, 0.0) *
                   me2_interaction(me2_coefficients(p, slice.tau), p, slice);
        case 3:
            return cplx(slice.tau, 0.0) * me3_interaction(p, slice);
        case 4:
            return cplx(slice.tau, 0.0) * me4_interaction(p, slice);
        default:
            throw std::invalid_argument("analytic_magnus_term: order 1..4");
    }
}

// ‖analytic − numeric‖ relative to the term size, with an absolute floor so
// exact zeros (sinc nodes) do not divide quadrature noise by zero.
inline double oracle_cell_deviation(const LambdaParams& p, const TimeSlice& slice, int order,
                                    const Tolerances& tol = default_tolerances()) {
    const Mat analytic = analytic_magnus_term(p, slice, order);
    const OscillatoryHamiltonian h = hamiltonian_interaction(p);
    const Mat numeric = h.terms.empty() ? Mat(3) : magnus_numeric(h, slice, order, tol);
    const double floor_scale =
        1e-6 * slice.tau * std::max(std::abs(p.Omega0) + std::abs(p.Omega1), 1e-12);
    const double denom = std::max({numeric.max_abs(), analytic.max_abs(), floor_scale});
    return (analytic - numeric).max_abs() / denom;
}

struct OracleGridConfig {
    std::vector<int> orders{1, 2, 3, 4};
    std::vector<double> delta_over_Delta{0.0, 0.05, 0.2};
    std::vector<double> omega_over_Delta{0.05, 0.3};
    std::vector<double> tau_periods{6.0, 20.0, 60.0};
    double Delta = 1.0;
    double threshold = 1e-6;
    SliceMode mode = SliceMode::Centered;
    double anchor = 0.0;
};

// Orders 3 and 4 run only at δ = 0 (their closed forms are derived there).
inline std::vector<OracleCell> run_oracle_grid(const OracleGridConfig& cfg,
                                               const Tolerances& tol = default_tolerances()) {
    std::vector<OracleCell> cells;
    for (int order : cfg.orders)
        for (double dd : cfg.delta_over_Delta) {
            if (order >= 3 && dd != 0.0) continue;
            for (double oo : cfg.omega_over_Delta)
                for (double tp : cfg.tau_periods) {
                    LambdaParams p;
                    p.delta = dd * cfg.Delta;
                    p.Delta = cfg.Delta;
                    p.Omega0 = oo * cfg.Delta;
                    p.Omega1 = oo * cfg.Delta;
                    const double tau = tp * 2.0 * M_PI / cfg.Delta;
                    const TimeSlice slice(cfg.anchor, tau, cfg.mode);
                    OracleCell cell;
                    cell.order = order;
                    cell.delta = p.delta;
                    cell.omega = oo * cfg.Delta;
                    cell.tau_periods = tp;
                    cell.rel_deviation = oracle_cell_deviation(p, slice, order, tol);
                    cell.pass = cell.rel_deviation <= cfg.threshold;
                    cells.push_back(cell);
                }
        }
    return cells;
}

// Off-pattern mass of a Magnus term relative to its size: odd orders may only
// populate (k,2)/(2,k), even orders only the relevant block and (2,2).
inline double structural_off_pattern(const Mat& f, int order) {
    const bool odd = (order % 2) == 1;
    double off = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const bool coupling = (i == 2) != (j == 2);
            const bool allowed = odd ? coupling : !coupling;
            if (!allowed) off = std::max(off, std::abs(f(i, j)));
        }
    return off / std::max(f.max_abs(), 1e-300);
}

} // namespace magnuseff::lambda
