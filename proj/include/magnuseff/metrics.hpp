// metrics.hpp — Validation quantifiers: worst-case subspace fidelity
// F = min_ψ |⟨ψ|U†U_eff|ψ⟩|², leakage L = 1 − ‖P₀Uψ‖², post-selected fidelity
// F′ (minimizing the ratio form), and the approximant F′_m = F + L_m evaluated
// at the fidelity argmin and capped at one (F′ itself never exceeds one). Minimization: coarse grid over the Bloch angles of
// the relevant subspace followed by Nelder–Mead refinement.

#pragma once

#include <array>
#include <functional>
#include <optional>

#include "propagation.hpp"

namespace magnuseff::metrics {

using prop::PropagatorSeries;
using prop::TimeSeries;

// Rank-2 projector onto span{|0⟩, |1⟩} plus its orthonormal basis.
struct RelevantSubspace {
    Mat projector;
    std::array<Vec, 2> basis;

    static RelevantSubspace lambda_default() {
        RelevantSubspace s{Mat(3), {Vec::basis(3, 0), Vec::basis(3, 1)}};
        s.projector(0, 0) = 1.0;
        s.projector(1, 1) = 1.0;
        return s;
    }
};

struct FidelityReport {
    double t = 0.0;
    double F = 1.0;
    Vec argmin_state;
    double L_m = 0.0;
    double F_prime_m = 1.0;
    std::optional<double> F_prime;
    double minimizer_residual = 0.0; // grid minimum − refined minimum, ≥ 0
};

namespace detail {

// ψ(a, b) = cos(a/2)|0⟩ + e^{ib} sin(a/2)|1⟩ in the subspace basis
inline Vec bloch_state(double a, double b) {
    Vec v(3);
    v[0] = std::cos(0.5 * a);
    v[1] = std::polar(std::sin(0.5 * a), b);
    return v;
}

// 2×2 relevant block of U†U_eff
inline std::array<cplx, 4> overlap_block(const Mat& u, const Mat& u_eff) {
    const Mat m = u.adjoint() * u_eff;
    return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

inline double fidelity_objective(const std::array<cplx, 4>& m, double a, double b) {
    const double c = std::cos(0.5 * a), s = std::sin(0.5 * a);
    const cplx e = std::polar(1.0, b);
    const cplx amp = c * c * m[0] + c * s * e * m[1] + c * s * std::conj(e) * m[2] + s * s * m[3];
    return std::norm(amp);
}

// Nelder–Mead on ℝ² down to a simplex diameter tolerance.
inline std::array<double, 3> nelder_mead_2d(const std::function<double(double, double)>& f,
                                            double a0, double b0, double step, double param_tol,
                                            int max_iter = 400) {
    struct Pt {
        double a, b, val;
    };
    std::array<Pt, 3> s{Pt{a0, b0, f(a0, b0)}, Pt{a0 + step, b0, f(a0 + step, b0)},
                        Pt{a0, b0 + step, f(a0, b0 + step)}};
    auto sort3 = [&]() {
        std::sort(s.begin(), s.end(), [](const Pt& l, const Pt& r) { return l.val < r.val; });
    };
    sort3();
    for (int it = 0; it < max_iter; ++it) {
        const double diam = std::max(std::hypot(s[1].a - s[0].a, s[1].b - s[0].b),
                                     std::hypot(s[2].a - s[0].a, s[2].b - s[0].b));
        if (diam < param_tol) break;
        const double ca = 0.5 * (s[0].a + s[1].a), cb = 0.5 * (s[0].b + s[1].b);
        auto try_point = [&](double coef) {
            const double a = ca + coef * (ca - s[2].a), b = cb + coef * (cb - s[2].b);
            return Pt{a, b, f(a, b)};
        };
        Pt refl = try_point(1.0);
        if (refl.val < s[0].val) {
            Pt exp = try_point(2.0);
            s[2] = exp.val < refl.val ? exp : refl;
        } else if (refl.val < s[1].val) {
            s[2] = refl;
        } else {
            Pt contr = try_point(refl.val < s[2].val ? 0.5 : -0.5);
            if (contr.val < std::min(refl.val, s[2].val)) {
                s[2] = contr;
            } else {
                for (int i = 1; i < 3; ++i) {
                    s[i].a = 0.5 * (s[i].a + s[0].a);
                    s[i].b = 0.5 * (s[i].b + s[0].b);
                    s[i].val = f(s[i].a, s[i].b);
                }
            }
        }
        sort3();
    }
    return {s[0].a, s[0].b, s[0].val};
}

struct MinimizeResult {
    double value = 1.0;
    double a = 0.0, b = 0.0;
    double grid_value = 1.0;
};

// 64×64 grid over (a, b) ∈ [0, π] × [0, 2π), Nelder–Mead refinement from every
// near-tied grid minimum (and an optional warm start). Symmetric drives have
// exactly degenerate minima at separated angles; refining all ties and
// breaking the final tie by scan order keeps the reported argmin — and the
// leakage evaluated there — deterministic under round-off-level perturbations
// of the objective (e.g. gauge shifts).
inline MinimizeResult minimize_over_states(const std::function<double(double, double)>& f,
                                           const std::optional<std::array<double, 2>>& warm,
                                           double param_tol) {
    constexpr int na = 64, nb = 64;
    constexpr double tie_eps = 1e-10;
    constexpr std::size_t max_candidates = 16;

    double grid_best = 2.0;
    std::vector<std::array<double, 2>> grid(static_cast<std::size_t>(na) * nb);
    std::vector<double> values(static_cast<std::size_t>(na) * nb);
    for (int ia = 0; ia < na; ++ia) {
        const double a = M_PI * ia / (na - 1);
        for (int ib = 0; ib < nb; ++ib) {
            const double b = 2.0 * M_PI * ib / nb;
            const std::size_t idx = static_cast<std::size_t>(ia) * nb + ib;
            grid[idx] = {a, b};
            values[idx] = f(a, b);
            grid_best = std::min(grid_best, values[idx]);
        }
    }

    std::vector<std::array<double, 2>> starts;
    for (std::size_t idx = 0; idx < grid.size() && starts.size() < max_candidates; ++idx)
        if (values[idx] <= grid_best + tie_eps) starts.push_back(grid[idx]);
    if (warm) starts.push_back(*warm);

    MinimizeResult best;
    best.grid_value = grid_best;
    best.value = 2.0;
    const double step = 0.5 * M_PI / (na - 1);
    for (const auto& s : starts) {
        const auto r = nelder_mead_2d(f, s[0], s[1], step, param_tol);
        if (r[2] < best.value - tie_eps) {
            best.value = r[2];
            best.a = r[0];
            best.b = r[1];
        }
    }
    best.value = std::min(best.value, best.grid_value);
    return best;
}

} // namespace detail

namespace detail {

// Newton refinement of the stationary point of f(a, b) = |q(a, b)|² with the
// analytic gradient and Hessian of q = c²m₀₀ + cse^{ib}m₀₁ + cse^{−ib}m₁₀ +
// s²m₁₁. The gradient zero crossing localizes the argmin to ~1e-13 even
// though the objective value carries round-off noise; the leakage evaluated
// at the argmin inherits that stability (gauge-shifted inputs land on the
// same point).
inline std::array<double, 2> newton_polish(const std::array<cplx, 4>& m, double a, double b) {
    for (int it = 0; it < 12; ++it) {
        const double c = std::cos(0.5 * a), s = std::sin(0.5 * a);
        const double u = 0.5 * std::sin(a), v = 0.5 * std::cos(a);
        const cplx e = std::polar(1.0, b);
        const cplx cross = e * m[1] + std::conj(e) * m[2];
        const cplx cross_i = kImag * (e * m[1] - std::conj(e) * m[2]);

        const cplx q = c * c * m[0] + c * s * cross + s * s * m[3];
        const cplx qa = -u * m[0] + v * cross + u * m[3];
        const cplx qb = c * s * cross_i;
        const cplx qaa = -v * m[0] - u * cross + v * m[3];
        const cplx qbb = -c * s * cross;
        const cplx qab = v * cross_i;

        const double fa = 2.0 * std::real(std::conj(q) * qa);
        const double fb = 2.0 * std::real(std::conj(q) * qb);
        const double faa = 2.0 * (std::norm(qa) + std::real(std::conj(q) * qaa));
        const double fbb = 2.0 * (std::norm(qb) + std::real(std::conj(q) * qbb));
        const double fab = 2.0 * (std::real(std::conj(qb) * qa) + std::real(std::conj(q) * qab));

        const double det = faa * fbb - fab * fab;
        if (!(std::abs(det) > 1e-14) || faa <= 0.0) break; // flat or non-convex: keep point
        const double da = -(fbb * fa - fab * fb) / det;
        const double db = -(faa * fb - fab * fa) / det;
        if (std::hypot(da, db) > 0.2) break;
        a += da;
        b += db;
        if (std::hypot(da, db) < 1e-13) break;
    }
    return {a, b};
}

} // namespace detail

struct SubspaceFidelity {
    double F = 1.0;
    Vec argmin;
    double a = 0.0, b = 0.0;
    double residual = 0.0;
};

inline SubspaceFidelity subspace_fidelity(const Mat& u, const Mat& u_eff,
                                          const std::optional<std::array<double, 2>>& warm = {},
                                          const Tolerances& tol = default_tolerances()) {
    const auto block = detail::overlap_block(u, u_eff);
    auto f = [&](double a, double b) { return detail::fidelity_objective(block, a, b); };
    const auto r = detail::minimize_over_states(f, warm, tol.minimizer_param);

    SubspaceFidelity out;
    out.a = r.a;
    out.b = r.b;
    out.F = r.value;
    const auto polished = detail::newton_polish(block, r.a, r.b);
    const double fp = f(polished[0], polished[1]);
    if (fp <= r.value + 1e-12) {
        out.a = polished[0];
        out.b = polished[1];
        out.F = std::min(fp, r.value);
    }
    out.argmin = detail::bloch_state(out.a, out.b);
    out.residual = r.grid_value - out.F;
    return out;
}

// L(ψ) = 1 − ‖P₀Uψ‖² for ψ in the relevant subspace.
inline double leakage(const Mat& u, const Vec& psi, const RelevantSubspace& sub) {
    if (std::abs(psi[2]) > 1e-9)
        throw std::invalid_argument("leakage: state not in the relevant subspace");
    (void)sub;
    const Vec evolved = u * psi;
    const double kept = std::norm(evolved[0]) + std::norm(evolved[1]);
    return std::clamp(1.0 - kept, 0.0, 1.0);
}

struct PostselectFidelity {
    double F_prime = 1.0;
    Vec argmin;
    bool excluded_states = false; // some probe states had L ≈ 1
};

// F′ = min_ψ |⟨ψ|U†P₀U_eff|ψ⟩|² / (1 − L(ψ)); states with L → 1 are skipped.
inline PostselectFidelity postselect_fidelity(const Mat& u, const Mat& u_eff,
                                              const RelevantSubspace& sub,
                                              const Tolerances& tol = default_tolerances()) {
    const Mat m = u.adjoint() * sub.projector * u_eff;
    const std::array<cplx, 4> block{m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
    bool excluded = false;
    auto f = [&](double a, double b) {
        const Vec psi = detail::bloch_state(a, b);
        const double l = leakage(u, psi, sub);
        if (1.0 - l < 1e-12) {
            excluded = true;
            return 2.0; // fully leaked states cannot be post-selected
        }
        return detail::fidelity_objective(block, a, b) / (1.0 - l);
    };
    const auto r = detail::minimize_over_states(f, {}, tol.minimizer_param);
    if (r.value > 1.5)
        throw NumericsError("postselect_fidelity: every probe state fully leaks");
    PostselectFidelity out;
    out.F_prime = r.value;
    out.argmin = detail::bloch_state(r.a, r.b);
    out.excluded_states = excluded;
    return out;
}

inline FidelityReport fidelity_report(const Mat& u, const Mat& u_eff, const RelevantSubspace& sub,
                                      bool emit_f_prime_exact = false, double t = 0.0,
                                      const std::optional<std::array<double, 2>>& warm = {},
                                      const Tolerances& tol = default_tolerances()) {
    const SubspaceFidelity sf = subspace_fidelity(u, u_eff, warm, tol);
    FidelityReport rep;
    rep.t = t;
    rep.F = sf.F;
    rep.argmin_state = sf.argmin;
    rep.L_m = leakage(u, sf.argmin, sub);
    rep.F_prime_m = std::min(sf.F + rep.L_m, 1.0);
    rep.minimizer_residual = sf.residual;
    if (emit_f_prime_exact) rep.F_prime = postselect_fidelity(u, u_eff, sub, tol).F_prime;
    return rep;
}

// Per-point reports with the minimizer warm-started along the series.
inline std::vector<FidelityReport> fidelity_timeseries(const PropagatorSeries& exact,
                                                       const PropagatorSeries& effective,
                                                       const RelevantSubspace& sub,
                                                       bool emit_f_prime_exact = false,
                                                       const Tolerances& tol = default_tolerances()) {
    if (exact.grid.n_points != effective.grid.n_points ||
        exact.grid.t_start != effective.grid.t_start || exact.grid.t_end != effective.grid.t_end)
        throw std::invalid_argument("fidelity_timeseries: grid mismatch");
    std::vector<FidelityReport> out;
    out.reserve(static_cast<std::size_t>(exact.grid.n_points));
    std::optional<std::array<double, 2>> warm;
    for (int k = 0; k < exact.grid.n_points; ++k) {
        const SubspaceFidelity sf =
            subspace_fidelity(exact.unitaries[static_cast<std::size_t>(k)],
                              effective.unitaries[static_cast<std::size_t>(k)], warm, tol);
        FidelityReport rep;
        rep.t = exact.grid.time(k);
        rep.F = sf.F;
        rep.argmin_state = sf.argmin;
        rep.L_m = leakage(exact.unitaries[static_cast<std::size_t>(k)], sf.argmin, sub);
        rep.F_prime_m = std::min(sf.F + rep.L_m, 1.0);
        rep.minimizer_residual = sf.residual;
        if (emit_f_prime_exact)
            rep.F_prime = postselect_fidelity(exact.unitaries[static_cast<std::size_t>(k)],
                                              effective.unitaries[static_cast<std::size_t>(k)],
                                              sub, tol)
                              .F_prime;
        out.push_back(rep);
        warm = std::array<double, 2>{sf.a, sf.b};
    }
    return out;
}

} // namespace magnuseff::metrics
