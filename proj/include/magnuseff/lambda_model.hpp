// lambda_model.hpp — Closed-form physics of the driven three-level Λ system:
// lab and interaction-picture Hamiltonians, standard adiabatic elimination
// (including its gauge sensitivity), coarse-grained Magnus coefficients at
// orders 2–4, exact level splittings at δ = 0, and coarse-graining-time
// selection with regime diagnostics.
//
// Level layout: |0⟩, |1⟩ span the relevant subspace, |2⟩ is the far-detuned
// excited state. H = −δ/2 |0⟩⟨0| + δ/2 |1⟩⟨1| + Δ |2⟩⟨2| + ½ Σ_k (Ω_k* |k⟩⟨2| + h.c.)
// plus an optional uniform shift η·𝟙.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "magnus_numeric.hpp"

namespace magnuseff::lambda {

struct RegimeError : NumericsError {
    using NumericsError::NumericsError;
};

struct LambdaParams {
    double delta = 0.0;  // two-photon detuning
    double Delta = 1.0;  // average detuning of |2⟩
    cplx Omega0{0.0, 0.0};
    cplx Omega1{0.0, 0.0};
    double eta = 0.0;    // uniform gauge shift

    void validate() const {
        if (!std::isfinite(delta) || !std::isfinite(Delta) || !std::isfinite(eta) ||
            !std::isfinite(Omega0.real()) || !std::isfinite(Omega0.imag()) ||
            !std::isfinite(Omega1.real()) || !std::isfinite(Omega1.imag()))
            throw std::invalid_argument("LambdaParams: non-finite parameter");
        if (Delta == 0.0) throw std::invalid_argument("LambdaParams: Δ must be nonzero");
        if (!(std::abs(Delta) > 0.5 * std::abs(delta)))
            throw std::invalid_argument("LambdaParams: require |Δ| > |δ|/2");
    }

    double eps0() const { return Delta + 0.5 * delta; } // splitting ε₂₀
    double eps1() const { return Delta - 0.5 * delta; } // splitting ε₂₁
    double x() const {
        return (std::norm(Omega0) + std::norm(Omega1)) / (4.0 * Delta * Delta);
    }
};

enum class EffOrderTag { AE, ME2_finite_tau, ME2_coarse, ME4 };

struct EffCoefficients {
    double S0 = 0.0;
    double S1 = 0.0;
    cplx Omega_tilde{0.0, 0.0};
    double S2 = 0.0; // shift of |2⟩ (lab frame adds Δ on top)
    EffOrderTag order = EffOrderTag::ME2_coarse;
    std::optional<double> tau_used;
};

enum class EffRegime { FiniteTau, CoarseGrained };
enum class EffFrame { Lab, Interaction };

struct EffHamiltonianSpec {
    std::vector<int> orders{2}; // subset of {2, 3, 4}
    EffRegime regime = EffRegime::CoarseGrained;
    EffFrame frame = EffFrame::Lab;
    double tau = 0.0; // required for FiniteTau and for order 3

    bool has(int k) const {
        for (int o : orders)
            if (o == k) return true;
        return false;
    }
    void validate() const {
        if (orders.empty()) throw std::invalid_argument("EffHamiltonianSpec: empty order set");
        for (int o : orders)
            if (o < 2 || o > 4) throw std::invalid_argument("EffHamiltonianSpec: orders ⊆ {2,3,4}");
        if (regime == EffRegime::FiniteTau && !(tau > 0.0))
            throw std::invalid_argument("EffHamiltonianSpec: FiniteTau requires τ > 0");
    }
};

// ------------------------------- Hamiltonians --------------------------------

inline HermitianMatrix hamiltonian_lab(const LambdaParams& p,
                                       const Tolerances& tol = default_tolerances()) {
    p.validate();
    Mat h(3);
    h(0, 0) = -0.5 * p.delta + p.eta;
    h(1, 1) = 0.5 * p.delta + p.eta;
    h(2, 2) = p.Delta + p.eta;
    h(0, 2) = 0.5 * std::conj(p.Omega0);
    h(2, 0) = 0.5 * p.Omega0;
    h(1, 2) = 0.5 * std::conj(p.Omega1);
    h(2, 1) = 0.5 * p.Omega1;
    return HermitianMatrix(h, tol);
}

// H̃(t) = U₀†(H − H₀)U₀ with U₀ = e^{−iH₀t}; frequencies ∓ε_k on |k⟩⟨2| / |2⟩⟨k|.
// Independent of η, which cancels in H − H₀.
inline OscillatoryHamiltonian hamiltonian_interaction(const LambdaParams& p) {
    p.validate();
    std::vector<OscTerm> terms;
    auto add_pair = [&](const cplx& omega_k, int k, double eps) {
        if (omega_k == cplx{}) return;
        Mat lower(3);
        lower(k, 2) = 0.5 * std::conj(omega_k);
        terms.push_back(OscTerm{lower, -eps});
        Mat raise(3);
        raise(2, k) = 0.5 * omega_k;
        terms.push_back(OscTerm{raise, +eps});
    };
    add_pair(p.Omega0, 0, p.eps0());
    add_pair(p.Omega1, 1, p.eps1());
    return OscillatoryHamiltonian(3, std::move(terms));
}

// --------------------------- adiabatic elimination ----------------------------

// Standard AE (ċ₂ = 0) applied to H + η𝟙. The η dependence of the coefficients
// is the gauge ambiguity of the method: the elimination denominator becomes
// Δ + η instead of Δ.
inline EffCoefficients ae_effective(const LambdaParams& p) {
    p.validate();
    const double denom = p.Delta + p.eta;
    if (std::abs(denom) < 1e-12 * std::max(1.0, std::abs(p.Delta)))
        throw RegimeError("ae_effective: Δ + η vanishes; elimination undefined");
    EffCoefficients c;
    c.S0 = -std::norm(p.Omega0) / (4.0 * denom);
    c.S1 = -std::norm(p.Omega1) / (4.0 * denom);
    c.Omega_tilde = -p.Omega0 * std::conj(p.Omega1) / (2.0 * denom);
    c.S2 = 0.0; // AE disregards |2⟩ entirely
    c.order = EffOrderTag::AE;
    return c;
}

// 3×3 embedding of the AE result: the 2×2 block plus an untouched (2,2) = Δ+η.
inline HermitianMatrix ae_lab_hamiltonian(const LambdaParams& p,
                                          const Tolerances& tol = default_tolerances()) {
    const EffCoefficients c = ae_effective(p);
    Mat h(3);
    h(0, 0) = -0.5 * p.delta + p.eta + c.S0;
    h(1, 1) = 0.5 * p.delta + p.eta + c.S1;
    h(2, 2) = p.Delta + p.eta;
    h(1, 0) = 0.5 * c.Omega_tilde;
    h(0, 1) = 0.5 * std::conj(c.Omega_tilde);
    return HermitianMatrix(h, tol);
}

// ------------------------- second-order Magnus (F₂/τ) -------------------------

// Exact finite-τ coefficients of H̃(2)_eff = F₂/τ (centered slice):
//   S_k(τ)  = −|Ω_k|²/(4 ε_k) · [1 − sinc(ε_k τ)]
//   Ω̃(τ)   = −(Ω₀Ω₁*/2) · Δ/(Δ² − δ²/4) · [sinc(δτ/2) − φ(τ)]
//   φ(τ)    = [ε₁ e^{−iε₀τ/2} sinc(ε₁τ/2) + ε₀ e^{iε₁τ/2} sinc(ε₀τ/2)] / (ε₀ + ε₁)
// The order-2 quadrature oracle adjudicates these forms (see the oracle tests).
inline EffCoefficients me2_coefficients(const LambdaParams& p, double tau) {
    p.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("me2_coefficients: require τ > 0");
    const double e0 = p.eps0(), e1 = p.eps1();
    EffCoefficients c;
    c.S0 = -std::norm(p.Omega0) / (4.0 * e0) * (1.0 - sinc(e0 * tau));
    c.S1 = -std::norm(p.Omega1) / (4.0 * e1) * (1.0 - sinc(e1 * tau));
    const cplx phi = (e1 * std::polar(1.0, -0.5 * e0 * tau) * sinc(0.5 * e1 * tau) +
                      e0 * std::polar(1.0, +0.5 * e1 * tau) * sinc(0.5 * e0 * tau)) /
                     (e0 + e1);
    const double denom = p.Delta * p.Delta - 0.25 * p.delta * p.delta; // = ε₀ε₁
    c.Omega_tilde = -0.5 * p.Omega0 * std::conj(p.Omega1) * (p.Delta / denom) *
                    (sinc(0.5 * p.delta * tau) - phi);
    c.S2 = -(c.S0 + c.S1);
    c.order = EffOrderTag::ME2_finite_tau;
    c.tau_used = tau;
    return c;
}

// Coarse-grained limit 2π/Δ ≪ τ ≪ 2π/δ: sinc(ε_kτ) → 0, sinc(δτ/2) → 1.
// Reduces to ae_effective exactly at δ = 0 (and η = 0).
inline EffCoefficients me2_coarse(const LambdaParams& p) {
    p.validate();
    EffCoefficients c;
    c.S0 = -std::norm(p.Omega0) / (4.0 * p.eps0());
    c.S1 = -std::norm(p.Omega1) / (4.0 * p.eps1());
    const double denom = p.Delta * p.Delta - 0.25 * p.delta * p.delta;
    c.Omega_tilde = -0.5 * p.Omega0 * std::conj(p.Omega1) * (p.Delta / denom);
    c.S2 = -(c.S0 + c.S1);
    c.order = EffOrderTag::ME2_coarse;
    return c;
}

// F₁/τ on a slice: each coupling averaged to e^{iω t_start} e^{iωτ/2} sinc(ωτ/2).
inline Mat me1_interaction(const LambdaParams& p, const TimeSlice& slice) {
    const OscillatoryHamiltonian h = hamiltonian_interaction(p);
    Mat out(3);
    for (const auto& term : h.terms) {
        const cplx factor = std::polar(1.0, term.omega * (slice.start() + 0.5 * slice.tau)) *
                            sinc(0.5 * term.omega * slice.tau);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out(i, j) += factor * term.coeff(i, j);
    }
    return out;
}

// H̃(2)_eff(t_j|τ) for a slice: diag(S₀, S₁, −S₀−S₁) + (Ω̃/2) e^{iδ·(phase)} |1⟩⟨0| + h.c.
inline Mat me2_interaction(const EffCoefficients& c, const LambdaParams& p,
                           const TimeSlice& slice) {
    Mat out(3);
    out(0, 0) = c.S0;
    out(1, 1) = c.S1;
    out(2, 2) = c.S2;
    // the coupling words sum to frequency δ; Ω̃ is centered-slice intrinsic
    const cplx phase = std::polar(1.0, p.delta * (slice.start() + 0.5 * slice.tau));
    const cplx v = 0.5 * c.Omega_tilde * phase;
    out(1, 0) = v;
    out(0, 1) = std::conj(v);
    return out;
}

// ---------------------- third and fourth order (δ = 0) -----------------------

namespace detail {
inline void require_delta0(const LambdaParams& p, const char* who) {
    if (p.delta != 0.0)
        throw RegimeError(std::string(who) + ": derived only for δ = 0");
}
} // namespace detail

// Centered-slice third-order coefficient: F₃/τ = α(θ)·x·(A + A†) in the lab
// frame with θ = Δτ and A = Σ_k (Ω_k*/2)|k⟩⟨2|. At θ = 2πk, α = 2(−1)^k; the
// value is checked against exp(−iH̃_eff τ) = Ũ(τ) exactly and against the
// order-3 quadrature (see tests).
inline double me3_alpha_centered(double theta) {
    return 2.0 * std::cos(0.5 * theta) - (2.0 / 3.0) * std::cos(0.5 * theta) * sinc(theta) -
           (4.0 / 3.0) * sinc(0.5 * theta);
}

// Slice-intrinsic complex coefficient over [0, τ] (forward-slice convention).
inline cplx me3_coefficient_intrinsic(double theta) {
    return me3_alpha_centered(theta) * std::polar(1.0, -0.5 * theta);
}

inline Mat lambda_lower_coupling(const LambdaParams& p) {
    Mat a(3);
    a(0, 2) = 0.5 * std::conj(p.Omega0);
    a(1, 2) = 0.5 * std::conj(p.Omega1);
    return a;
}

// Lab-frame H(3)_eff(τ) = α(Δτ)·x·(A + A†); block-off-diagonal (relevant ↔ |2⟩).
inline Mat me3_term(const LambdaParams& p, double tau) {
    p.validate();
    detail::require_delta0(p, "me3_term");
    if (!(tau > 0.0)) throw std::invalid_argument("me3_term: require τ > 0");
    const double alpha = me3_alpha_centered(p.Delta * tau);
    const Mat a = lambda_lower_coupling(p);
    return (alpha * p.x()) * (a + a.adjoint());
}

// Interaction-picture F₃(t_j|τ)/τ with the slicing phase made explicit.
inline Mat me3_interaction(const LambdaParams& p, const TimeSlice& slice) {
    p.validate();
    detail::require_delta0(p, "me3_interaction");
    const double freq[] = {-p.Delta};
    const cplx coeff =
        slice_phase(freq, slice) * me3_coefficient_intrinsic(p.Delta * slice.tau) * p.x();
    const Mat a = lambda_lower_coupling(p);
    Mat out = coeff * a;
    return out + out.adjoint();
}

// Rank-one relevant-block structure W = v v† with v_k = Ω_k*/2. Both
// fourth-order objects below are proportional to W − w²|2⟩⟨2|.
inline Mat lambda_w_structure(const LambdaParams& p) {
    Mat w(3);
    const cplx v0 = 0.5 * std::conj(p.Omega0);
    const cplx v1 = 0.5 * std::conj(p.Omega1);
    w(0, 0) = v0 * std::conj(v0);
    w(0, 1) = v0 * std::conj(v1);
    w(1, 0) = v1 * std::conj(v0);
    w(1, 1) = v1 * std::conj(v1);
    return w;
}

inline Mat me4_structure(const LambdaParams& p) {
    const double wsq = 0.25 * (std::norm(p.Omega0) + std::norm(p.Omega1));
    Mat m = lambda_w_structure(p);
    m(2, 2) = -wsq;
    return m;
}

// Two distinct fourth-order scalars:
//
// * me4_beta_magnus — the literal fourth-order Magnus term: F₄/τ =
//   β(Δτ)·(x/Δ)·(W − w²|2⟩⟨2|). β(2πk) = 3. Extracted from the closed-form
//   word expansion and confirmed by quadrature and by the exact slice
//   logarithm (fit residual ~1e-12; see tests).
//
// * me4_beta_block — the block-diagonal spectral correction whose coarse
//   limit is 1. Together with the second order it reproduces the exact
//   splittings through order x²: it equals the Magnus coefficient minus the
//   second-order perturbative weight of the third-order coupling (3 − 2 = 1),
//   so it is the right correction when the off-diagonal third order is
//   dropped from the model.
inline double me4_beta_magnus(double theta) {
    return 5.0 / 3.0 + (4.0 / 3.0) * std::cos(theta) - (8.0 / 3.0) * sinc(theta) -
           (1.0 / 3.0) * sinc(2.0 * theta);
}

inline double me4_beta_block(double theta) {
    return 1.0 - (2.0 / 3.0) * std::cos(0.5 * theta) * sinc(0.5 * theta) -
           (1.0 / 3.0) * std::cos(theta) * sinc(theta);
}

// Block-model fourth-order correction used by the orders-{2,4} effective
// Hamiltonian (lab frame = interaction frame at δ = 0).
inline Mat me4_term(const LambdaParams& p, double tau) {
    p.validate();
    detail::require_delta0(p, "me4_term");
    if (!(tau > 0.0)) throw std::invalid_argument("me4_term: require τ > 0");
    return (me4_beta_block(p.Delta * tau) * p.x() / p.Delta) * me4_structure(p);
}

// Literal F₄(t_j|τ)/τ; independent of the slice anchor and mode (the
// contributing words have zero net frequency).
inline Mat me4_magnus_term(const LambdaParams& p, double tau) {
    p.validate();
    detail::require_delta0(p, "me4_magnus_term");
    if (!(tau > 0.0)) throw std::invalid_argument("me4_magnus_term: require τ > 0");
    return (me4_beta_magnus(p.Delta * tau) * p.x() / p.Delta) * me4_structure(p);
}

inline Mat me4_interaction(const LambdaParams& p, const TimeSlice& slice) {
    return me4_magnus_term(p, slice.tau);
}

// Coarse-grained block-model coefficients: S_k(4) = x|Ω_k|²/(4Δ),
// Ω̃(4) = xΩ₀Ω₁*/(2Δ).
inline EffCoefficients me4_coefficients(const LambdaParams& p) {
    p.validate();
    detail::require_delta0(p, "me4_coefficients");
    EffCoefficients c;
    const double x = p.x();
    c.S0 = x * std::norm(p.Omega0) / (4.0 * p.Delta);
    c.S1 = x * std::norm(p.Omega1) / (4.0 * p.Delta);
    c.Omega_tilde = x * p.Omega0 * std::conj(p.Omega1) / (2.0 * p.Delta);
    c.S2 = -(c.S0 + c.S1);
    c.order = EffOrderTag::ME4;
    return c;
}

// --------------------------- assembled effective H ---------------------------

// Eq.-style lab-frame effective Hamiltonian: diagonal
// (−δ/2 + S₀, δ/2 + S₁, Δ − S₀ − S₁) plus Ω̃/2 coupling, optionally with the
// higher orders (δ = 0 only), plus η·𝟙.
//
// The fourth order always enters through the block model me4_term: as a
// static lab-frame generator the relevant↔|2⟩ coupling of order 3 resums
// against the full gap Δ (an x³ effect on the splittings), so the block
// correction is the right x² term with or without order 3. The literal F₄
// (me4_magnus_term) belongs to the slice generator and is exercised by the
// oracle comparisons instead.
inline HermitianMatrix effective_lab_hamiltonian(const LambdaParams& p,
                                                 const EffHamiltonianSpec& spec,
                                                 const Tolerances& tol = default_tolerances()) {
    p.validate();
    spec.validate();
    if ((spec.has(3) || spec.has(4)) && p.delta != 0.0)
        throw RegimeError("effective_lab_hamiltonian: orders 3,4 require δ = 0");
    if (spec.has(3) && spec.regime != EffRegime::FiniteTau)
        throw RegimeError(
            "effective_lab_hamiltonian: order 3 has no coarse-grained limit; use FiniteTau");

    Mat h(3);
    h(0, 0) = -0.5 * p.delta + p.eta;
    h(1, 1) = 0.5 * p.delta + p.eta;
    h(2, 2) = p.Delta + p.eta;

    if (spec.has(2)) {
        const EffCoefficients c = spec.regime == EffRegime::FiniteTau
                                      ? me2_coefficients(p, spec.tau)
                                      : me2_coarse(p);
        h(0, 0) += c.S0;
        h(1, 1) += c.S1;
        h(2, 2) += c.S2;
        h(1, 0) += 0.5 * c.Omega_tilde;
        h(0, 1) += 0.5 * std::conj(c.Omega_tilde);
    }
    if (spec.has(3)) h += me3_term(p, spec.tau);
    if (spec.has(4)) {
        if (spec.regime == EffRegime::FiniteTau) {
            h += me4_term(p, spec.tau);
        } else {
            const EffCoefficients c = me4_coefficients(p);
            h(0, 0) += c.S0;
            h(1, 1) += c.S1;
            h(2, 2) += c.S2;
            h(1, 0) += 0.5 * c.Omega_tilde;
            h(0, 1) += 0.5 * std::conj(c.Omega_tilde);
        }
    }
    if (spec.frame == EffFrame::Interaction) {
        // static interaction picture exists only when H̃_eff is t-independent:
        // block-diagonal orders at δ = 0; subtract H₀ + η𝟙
        if (p.delta != 0.0 || spec.has(3))
            throw RegimeError(
                "effective_lab_hamiltonian: static interaction frame needs δ = 0 and no order 3");
        h(0, 0) -= -0.5 * p.delta + p.eta;
        h(1, 1) -= 0.5 * p.delta + p.eta;
        h(2, 2) -= p.Delta + p.eta;
    }
    return HermitianMatrix(h, tol);
}

// ------------------------------ exact splittings ------------------------------

// δ = 0, Δ > 0: ε₁₀ = (Δ/2)(√(1+4x) − 1), ε₂₁ = (Δ/2)(√(1+4x) + 1).
inline std::pair<double, double> exact_splittings_delta0(const LambdaParams& p) {
    p.validate();
    detail::require_delta0(p, "exact_splittings_delta0");
    if (!(p.Delta > 0.0))
        throw std::invalid_argument("exact_splittings_delta0: formulas assume Δ > 0");
    const double root = std::sqrt(1.0 + 4.0 * p.x());
    return {0.5 * p.Delta * (root - 1.0), 0.5 * p.Delta * (root + 1.0)};
}

// ------------------------------- τ selection ---------------------------------

struct TauDiagnostics {
    double tau = 0.0;
    int multiple = 0;        // τ = multiple · 2π/|Δ|
    double ratio_fast = 0.0; // τ·|Δ|/(2π), want ≥ 3
    double ratio_slow = 0.0; // τ·max(|δ|, |Ω̃|)/(2π), want ≤ 1/3
    double convergence = 0.0; // π − ∫‖H̃‖ over one slice
    bool pass_fast = false;
    bool pass_slow = false;
    bool pass_convergence = false;
};

// Separation ratios and the convergence margin for a given slice width.
inline TauDiagnostics diagnostics_for_tau(const LambdaParams& p, double tau,
                                          const Tolerances& tol = default_tolerances()) {
    p.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("diagnostics_for_tau: require τ > 0");
    const double fast = std::abs(p.Delta);
    const double slow = std::max(std::abs(p.delta), std::abs(me2_coarse(p).Omega_tilde));

    TauDiagnostics d;
    d.tau = tau;
    d.multiple = static_cast<int>(std::llround(tau * fast / (2.0 * M_PI)));
    d.ratio_fast = tau * fast / (2.0 * M_PI);
    d.ratio_slow = tau * slow / (2.0 * M_PI);
    d.pass_fast = d.ratio_fast >= 3.0;
    d.pass_slow = d.ratio_slow <= 1.0 / 3.0;

    const OscillatoryHamiltonian h = hamiltonian_interaction(p);
    d.convergence = convergence_margin(h, TimeSlice(0.0, tau, SliceMode::Centered), tol);
    d.pass_convergence = d.convergence > 0.0;
    return d;
}

// Diagnostics for the geometric-mean τ, snapped to an integer multiple of
// 2π/|Δ| (making sinc(Δτ/2) vanish exactly). Failures reported as data.
inline TauDiagnostics tau_diagnostics(const LambdaParams& p,
                                      const Tolerances& tol = default_tolerances()) {
    p.validate();
    const double fast = std::abs(p.Delta);
    const double omega_tilde = std::abs(me2_coarse(p).Omega_tilde);
    const double slow = std::max({std::abs(p.delta), omega_tilde, fast * 1e-6});

    const double period_fast = 2.0 * M_PI / fast;
    const double tau_gm = 2.0 * M_PI / std::sqrt(fast * slow);
    const int k = std::max(1, static_cast<int>(std::llround(tau_gm / period_fast)));
    return diagnostics_for_tau(p, k * period_fast, tol);
}

// Throwing variant: the scale-separation ratios are hard requirements.
inline TauDiagnostics select_tau(const LambdaParams& p,
                                 const Tolerances& tol = default_tolerances()) {
    TauDiagnostics d = tau_diagnostics(p, tol);
    if (!d.pass_fast || !d.pass_slow)
        throw RegimeError("select_tau: no coarse-graining window: τ·Δ/2π = " +
                          std::to_string(d.ratio_fast) + ", τ·max(δ,|Ω̃|)/2π = " +
                          std::to_string(d.ratio_slow));
    return d;
}

} // namespace magnuseff::lambda
