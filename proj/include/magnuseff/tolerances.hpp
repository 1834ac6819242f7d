// tolerances.hpp — Central numeric tolerance constants shared by the library,
// the CLI quality checks, and the test suites.

#pragma once

#include <algorithm>
#include <cstdlib>

namespace magnuseff {

struct Tolerances {
    // Type invariants checked on construction
    double hermitian_rel = 1e-12;     // ‖M − M†‖ ≤ tol·‖M‖ for HermitianMatrix
    double unitary_abs = 1e-10;       // ‖U†U − 𝟙‖ ≤ tol for UnitaryMatrix
    double state_norm = 1e-12;        // |‖ψ‖₂ − 1| ≤ tol for normalized states

    // numeric-core
    double eig_reconstruction = 1e-12;    // ‖V diag(λ) V† − H‖ ≤ tol·‖H‖
    double spectral_norm_rel = 1e-10;

    // magnus-engine
    double resonance_scale = 1e-8;        // ε_res = scale·max(1, Σ|ωⱼ|)
    double quadrature_scale = 1e-9;       // target = scale·τ^order·‖H‖^order
    double hermitize_residual = 1e-9;     // anti-Hermitian residual of assembled H_eff
    double convergence_quadrature = 1e-8; // ∫‖H̃‖ds accuracy

    // lambda-model / metrics
    double oracle_rel = 1e-6;             // analytic vs quadrature relative deviation
    double block_diag = 1e-14;            // ‖[H_eff, P₀]‖ for block-diagonal orders
    double population_sum = 1e-9;         // Σ populations = 1 band
    // Nelder–Mead parameter tolerance; tight enough that gauge-equivalent
    // inputs land on the same argmin to ~1e-12 (the leakage at the argmin is
    // first-order sensitive to it)
    double minimizer_param = 1e-12;

    // Uniformly scaled copy (used by the CLI for exploratory runs)
    Tolerances scaled(double factor) const {
        Tolerances t = *this;
        t.hermitian_rel *= factor;
        t.unitary_abs *= factor;
        t.state_norm *= factor;
        t.eig_reconstruction *= factor;
        t.spectral_norm_rel *= factor;
        t.quadrature_scale *= factor;
        t.hermitize_residual *= factor;
        t.convergence_quadrature *= factor;
        t.oracle_rel *= factor;
        t.block_diag *= factor;
        t.population_sum *= factor;
        return t;
    }
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

// Scale factor from MAGNUS_EFF_SEED_TOL (default 1.0); only the CLI applies it.
inline double env_tolerance_scale() {
    const char* v = std::getenv("MAGNUS_EFF_SEED_TOL");
    if (v == nullptr) return 1.0;
    const double f = std::atof(v);
    return f > 0.0 ? f : 1.0;
}

} // namespace magnuseff
