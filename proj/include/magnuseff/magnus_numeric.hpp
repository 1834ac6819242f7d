// magnus_numeric.hpp — Magnus terms F₁…F₄ for oscillatory Hamiltonians.
//
// Two independent routes:
//  * magnus_numeric: iterated composite Gauss–Legendre quadrature of the
//    time-ordered integrals, organized through cumulative integrals of the
//    Magnus generator recursion (the numeric oracle; never touches the
//    closed-form integrals).
//  * magnus_analytic: expansion of the nested-commutator integrands into
//    frequency words, each word integrated in closed form by ordered_integral.

#pragma once

#include <cmath>
#include <functional>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "eig.hpp"
#include "ordered_integral.hpp"

namespace magnuseff {

struct QuadratureError : NumericsError {
    QuadratureError(const std::string& what, double achieved)
        : NumericsError(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

namespace quad {

struct GaussRule {
    std::vector<double> x; // nodes on [−1, 1]
    std::vector<double> w;
    // S[i*n+j] = ∫_{−1}^{x_i} ℓ_j(y) dy  (cumulative integrals of the Lagrange basis)
    std::vector<double> cum;
};

inline const GaussRule& gauss_rule(int n) {
    static std::mutex mu;
    static std::unordered_map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    // Newton iteration on P_n with Chebyshev starting guesses
    for (int k = 0; k < n; ++k) {
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[static_cast<std::size_t>(n - 1 - k)] = x;
        r.w[static_cast<std::size_t>(n - 1 - k)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }

    // Barycentric weights for the Lagrange basis on the Gauss nodes
    std::vector<double> bary(static_cast<std::size_t>(n), 1.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (k != j) bary[static_cast<std::size_t>(j)] /= (r.x[static_cast<std::size_t>(j)] - r.x[static_cast<std::size_t>(k)]);

    auto lagrange = [&](int j, double y) {
        double prod = 1.0;
        for (int k = 0; k < n; ++k)
            if (k != j) prod *= (y - r.x[static_cast<std::size_t>(k)]);
        return prod * bary[static_cast<std::size_t>(j)];
    };

    // cum[i][j] = ∫_{−1}^{x_i} ℓ_j, evaluated with an n-point Gauss rule on the
    // subinterval (exact: ℓ_j has degree n−1 ≤ 2n−1)
    r.cum.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double a = -1.0, b = r.x[static_cast<std::size_t>(i)];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int m = 0; m < n; ++m)
                s += r.w[static_cast<std::size_t>(m)] * lagrange(j, mid + half * r.x[static_cast<std::size_t>(m)]);
            r.cum[static_cast<std::size_t>(i) * n + j] = half * s;
        }
    }
    auto [pos, inserted] = cache.emplace(n, std::move(r));
    (void)inserted;
    return pos->second;
}

// Composite grid: `panels` equal panels over [0, τ], `n` Gauss nodes per panel.
struct CompositeGrid {
    int panels = 0;
    int n = 0;
    double tau = 0.0;
    std::vector<double> nodes;   // global node positions in [0, τ]
    std::vector<double> weights; // global quadrature weights

    CompositeGrid(int p, int nn, double width) : panels(p), n(nn), tau(width) {
        const GaussRule& rule = gauss_rule(nn);
        const double h = tau / panels;
        nodes.resize(static_cast<std::size_t>(p) * nn);
        weights.resize(static_cast<std::size_t>(p) * nn);
        for (int q = 0; q < p; ++q) {
            const double a = q * h;
            for (int m = 0; m < nn; ++m) {
                nodes[static_cast<std::size_t>(q) * nn + m] = a + 0.5 * h * (rule.x[static_cast<std::size_t>(m)] + 1.0);
                weights[static_cast<std::size_t>(q) * nn + m] = 0.5 * h * rule.w[static_cast<std::size_t>(m)];
            }
        }
    }

    std::size_t size() const { return nodes.size(); }
};

// Cumulative integral of a matrix-valued function sampled on the grid:
// out[g] = ∫₀^{node_g} f, plus the full-interval integral.
inline void cumulative(const CompositeGrid& g, const std::vector<Mat>& f, std::vector<Mat>& out,
                       Mat& total) {
    const GaussRule& rule = gauss_rule(g.n);
    const double h = g.tau / g.panels;
    const int dim = f.front().n;
    out.assign(f.size(), Mat(dim));
    Mat carry(dim); // integral over all previous panels
    for (int q = 0; q < g.panels; ++q) {
        const std::size_t base = static_cast<std::size_t>(q) * g.n;
        for (int i = 0; i < g.n; ++i) {
            Mat partial(dim);
            for (int j = 0; j < g.n; ++j) {
                const double s = 0.5 * h * rule.cum[static_cast<std::size_t>(i) * g.n + j];
                const Mat& fj = f[base + j];
                for (int r = 0; r < dim; ++r)
                    for (int c = 0; c < dim; ++c) partial(r, c) += s * fj(r, c);
            }
            out[base + i] = carry + partial;
        }
        Mat full(dim);
        for (int j = 0; j < g.n; ++j) {
            const double wj = g.weights[base + j];
            const Mat& fj = f[base + j];
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) full(r, c) += wj * fj(r, c);
        }
        carry += full;
    }
    total = carry;
}

} // namespace quad

struct MagnusTerms {
    std::vector<Mat> F; // F[k−1] = F_k, k = 1..order
    TimeSlice slice;
    double error_estimate = 0.0; // max over orders of the last refinement delta
};

namespace detail {

// One evaluation of F₁..F_order on a fixed composite grid via the generator
// recursion  Ω₁' = A,  Ω₂' = −½[Ω₁, A],  Ω₃' = −½[Ω₂, A] + 1/12 [Ω₁,[Ω₁, A]],
// Ω₄' = −½[Ω₃, A] + 1/12 ([Ω₁,[Ω₂, A]] + [Ω₂,[Ω₁, A]])  with A(t) = −iH(t);
// then F_k = i·Ω_k(τ).
inline std::vector<Mat> magnus_pass(const OscillatoryHamiltonian& h, const TimeSlice& slice,
                                    int order, int panels, int nodes) {
    const quad::CompositeGrid grid(panels, nodes, slice.tau);
    const std::size_t G = grid.size();
    const int dim = h.dim;
    const double t0 = slice.start();

    std::vector<Mat> A(G);
    for (std::size_t g = 0; g < G; ++g) A[g] = (-kImag) * h.eval(t0 + grid.nodes[g]);

    std::vector<Mat> omega1, omega2, omega3;
    Mat total(dim);
    std::vector<Mat> F;

    quad::cumulative(grid, A, omega1, total);
    F.push_back(kImag * total);
    if (order >= 2) {
        std::vector<Mat> s2(G);
        for (std::size_t g = 0; g < G; ++g) s2[g] = (-0.5) * commutator(omega1[g], A[g]);
        quad::cumulative(grid, s2, omega2, total);
        F.push_back(kImag * total);
    }
    if (order >= 3) {
        std::vector<Mat> s3(G);
        for (std::size_t g = 0; g < G; ++g)
            s3[g] = (-0.5) * commutator(omega2[g], A[g]) +
                    (1.0 / 12.0) * commutator(omega1[g], commutator(omega1[g], A[g]));
        quad::cumulative(grid, s3, omega3, total);
        F.push_back(kImag * total);
    }
    if (order >= 4) {
        std::vector<Mat> s4(G);
        for (std::size_t g = 0; g < G; ++g)
            s4[g] = (-0.5) * commutator(omega3[g], A[g]) +
                    (1.0 / 12.0) * (commutator(omega1[g], commutator(omega2[g], A[g])) +
                                    commutator(omega2[g], commutator(omega1[g], A[g])));
        std::vector<Mat> omega4;
        quad::cumulative(grid, s4, omega4, total);
        F.push_back(kImag * total);
    }
    return F;
}

} // namespace detail

// All Magnus terms up to `order` by quadrature, refined by panel doubling until
// two successive refinements agree to the accuracy target.
inline MagnusTerms magnus_terms_numeric(const OscillatoryHamiltonian& h, const TimeSlice& slice,
                                        int order,
                                        const Tolerances& tol = default_tolerances()) {
    if (order < 1 || order > 4) throw std::invalid_argument("magnus_terms_numeric: order ∈ 1..4");
    if (h.dim < 1) throw std::invalid_argument("magnus_terms_numeric: empty Hamiltonian");

    const int nodes = 32;
    const double hnorm = std::max(h.coeff_scale(), 1e-300);
    // resolve the fastest oscillation with at least two panels per period
    const double periods = h.max_abs_omega() * slice.tau / (2.0 * M_PI);
    int panels = std::max(2, static_cast<int>(std::ceil(2.0 * periods)));

    // Stopping rule per order: successive refinements agree to
    // max(1e-9·‖F_k‖, 1e-13) but never looser than the absolute scale target
    // tol.quadrature_scale·(τ‖H‖)^k.
    auto target_for = [&](int k, double fnorm) {
        const double cap = tol.quadrature_scale * std::pow(slice.tau * hnorm, k);
        const double want = std::max(1e-9 * fnorm, 1e-13 * std::max(1.0, fnorm));
        return std::min(std::max(want, 1e-15), std::max(cap, 1e-15));
    };

    std::vector<Mat> prev = detail::magnus_pass(h, slice, order, panels, nodes);
    const int max_refinements = 7;
    double worst = 0.0;
    for (int r = 0; r < max_refinements; ++r) {
        panels *= 2;
        std::vector<Mat> next = detail::magnus_pass(h, slice, order, panels, nodes);
        worst = 0.0;
        bool ok = true;
        for (int k = 0; k < order; ++k) {
            const double delta =
                (next[static_cast<std::size_t>(k)] - prev[static_cast<std::size_t>(k)]).max_abs();
            worst = std::max(worst, delta);
            if (delta > target_for(k + 1, next[static_cast<std::size_t>(k)].max_abs())) ok = false;
        }
        prev.swap(next);
        if (ok) return MagnusTerms{std::move(prev), slice, worst};
    }
    throw QuadratureError("magnus_terms_numeric: quadrature budget exceeded", worst);
}

inline Mat magnus_numeric(const OscillatoryHamiltonian& h, const TimeSlice& slice, int order,
                          const Tolerances& tol = default_tolerances()) {
    return magnus_terms_numeric(h, slice, order, tol).F[static_cast<std::size_t>(order - 1)];
}

// ------------------------- closed-form word expansion ------------------------

// F_order assembled term-by-term: every product of oscillatory terms carries a
// pure-exponential phase whose ordered integral has a closed form.
inline Mat magnus_analytic(const OscillatoryHamiltonian& h, const TimeSlice& slice, int order,
                           const Tolerances& tol = default_tolerances()) {
    const int K = static_cast<int>(h.terms.size());
    const int dim = h.dim;
    Mat out(dim);
    if (K == 0) return out;
    const double tau = slice.tau;

    // ordered_integral uses ω_n on the outermost time; the appendix integrands
    // are written with s₁ outermost, so word frequencies are passed reversed.
    auto oi = [&](std::initializer_list<double> freqs_outer_first) {
        std::vector<double> w(freqs_outer_first.begin(), freqs_outer_first.end());
        std::reverse(w.begin(), w.end());
        const cplx base = ordered_integral(w, tau, tol);
        double sum = 0.0;
        for (double f : w) sum += f;
        return base * std::polar(1.0, sum * slice.start());
    };

    if (order == 1) {
        for (const auto& t1 : h.terms) {
            const cplx c = oi({t1.omega});
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) out(i, j) += c * t1.coeff(i, j);
        }
        return out;
    }
    if (order == 2) {
        for (const auto& t1 : h.terms)
            for (const auto& t2 : h.terms) {
                const cplx c = (-kImag * 0.5) * oi({t1.omega, t2.omega});
                out += c * commutator(t1.coeff, t2.coeff);
            }
        return out;
    }
    if (order == 3) {
        for (const auto& t1 : h.terms)
            for (const auto& t2 : h.terms)
                for (const auto& t3 : h.terms) {
                    const cplx c = (-1.0 / 6.0) * oi({t1.omega, t2.omega, t3.omega});
                    out += c * (commutator(t1.coeff, commutator(t2.coeff, t3.coeff)) +
                                commutator(commutator(t1.coeff, t2.coeff), t3.coeff));
                }
        return out;
    }
    if (order == 4) {
        for (const auto& t1 : h.terms)
            for (const auto& t2 : h.terms)
                for (const auto& t3 : h.terms)
                    for (const auto& t4 : h.terms) {
                        const cplx c =
                            (kImag / 12.0) * oi({t1.omega, t2.omega, t3.omega, t4.omega});
                        const Mat& m1 = t1.coeff;
                        const Mat& m2 = t2.coeff;
                        const Mat& m3 = t3.coeff;
                        const Mat& m4 = t4.coeff;
                        out += c * (commutator(commutator(commutator(m1, m2), m3), m4) +
                                    commutator(m1, commutator(commutator(m2, m3), m4)) +
                                    commutator(m1, commutator(m2, commutator(m3, m4))) +
                                    commutator(m2, commutator(m3, commutator(m4, m1))));
                    }
        return out;
    }
    throw std::invalid_argument("magnus_analytic: order ∈ 1..4");
}

// ----------------------------- assembly & bounds -----------------------------

struct AssembledEffective {
    HermitianMatrix h_eff;
    double residual; // anti-Hermitian part removed by symmetrization
};

// H_eff(t_j|τ) = (1/τ) Σ_{i≤n} F_i, Hermitized by (M + M†)/2.
inline AssembledEffective assemble_effective(const MagnusTerms& terms, int truncation,
                                             const Tolerances& tol = default_tolerances()) {
    if (truncation < 1 || truncation > static_cast<int>(terms.F.size()))
        throw std::invalid_argument("assemble_effective: truncation exceeds available orders");
    Mat sum(terms.F.front().n);
    for (int k = 0; k < truncation; ++k) sum += terms.F[static_cast<std::size_t>(k)];
    sum *= cplx(1.0 / terms.slice.tau, 0.0);

    Mat sym = 0.5 * (sum + sum.adjoint());
    Mat anti = 0.5 * (sum - sum.adjoint());
    const double residual = anti.max_abs();
    const double scale = std::max({sym.max_abs(), 1.0});
    if (residual > tol.hermitize_residual * scale)
        throw NumericsError("assemble_effective: anti-Hermitian residual above tolerance");
    return AssembledEffective{HermitianMatrix(sym, tol), residual};
}

// π − ∫_slice ‖H̃(s)‖ ds; positive means the convergence condition holds.
inline double convergence_margin(const OscillatoryHamiltonian& h, const TimeSlice& slice,
                                 const Tolerances& tol = default_tolerances()) {
    if (h.terms.empty()) return M_PI;
    const double t0 = slice.start();
    auto integral_with = [&](int panels) {
        const quad::CompositeGrid grid(panels, 16, slice.tau);
        double s = 0.0;
        for (std::size_t g = 0; g < grid.size(); ++g)
            s += grid.weights[g] * spectral_norm(h.eval(t0 + grid.nodes[g]));
        return s;
    };
    const double periods = h.max_abs_omega() * slice.tau / (2.0 * M_PI);
    int panels = std::max(2, static_cast<int>(std::ceil(periods)));
    double prev = integral_with(panels);
    for (int r = 0; r < 8; ++r) {
        panels *= 2;
        const double next = integral_with(panels);
        if (std::abs(next - prev) <= tol.convergence_quadrature) return M_PI - next;
        prev = next;
    }
    return M_PI - prev; // smooth integrand; refinement loop above is generous
}

} // namespace magnuseff
