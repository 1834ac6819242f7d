// ordered_integral.hpp — Closed forms for time-ordered oscillatory integrals
//
//   I_n(ω₁..ω_n; τ) = ∫₀^τ ds_n ∫₀^{s_n} ds_{n−1} … ∫₀^{s₂} ds₁ e^{i Σ_j ω_j s_j}
//
// with ω_n attached to the outermost (largest) time. The generic case uses the
// recursion A_k^n = A_{k−1}^{n−1}/Ω_{k−1}^n over partial frequency sums; when any
// partial sum is near-resonant the value is evaluated instead through divided
// differences of exp, which is the analytic limit of the recursion.

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "oscillatory.hpp"
#include "tolerances.hpp"

namespace magnuseff {

namespace detail {

// Divided difference Δⁿexp(x₀..x_n) = [exp(Z)]_{0,n} for the upper-bidiagonal
// Z with diagonal x_k and unit superdiagonal (Opitz). Exact at coincident nodes.
inline cplx divided_difference_exp(std::span<const cplx> nodes) {
    const int m = static_cast<int>(nodes.size()); // m = n+1 nodes
    std::vector<cplx> z(static_cast<std::size_t>(m) * m, cplx{});
    auto at = [&](std::vector<cplx>& v, int i, int j) -> cplx& {
        return v[static_cast<std::size_t>(i) * m + j];
    };
    double scale = 0.0;
    for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(nodes[static_cast<std::size_t>(i)]));
    int squarings = 0;
    double fac = 1.0;
    while ((scale + 1.0) * fac > 0.5) {
        fac *= 0.5;
        ++squarings;
    }
    for (int i = 0; i < m; ++i) {
        at(z, i, i) = nodes[static_cast<std::size_t>(i)] * fac;
        if (i + 1 < m) at(z, i, i + 1) = fac;
    }
    // Taylor on the scaled matrix, then repeated squaring
    std::vector<cplx> result(static_cast<std::size_t>(m) * m, cplx{});
    std::vector<cplx> power(static_cast<std::size_t>(m) * m, cplx{});
    for (int i = 0; i < m; ++i) at(result, i, i) = 1.0, at(power, i, i) = 1.0;
    double inv_fact = 1.0;
    std::vector<cplx> tmp(static_cast<std::size_t>(m) * m);
    for (int k = 1; k <= 24; ++k) {
        inv_fact /= k;
        std::fill(tmp.begin(), tmp.end(), cplx{});
        for (int i = 0; i < m; ++i)
            for (int l = 0; l < m; ++l) {
                const cplx p = at(power, i, l);
                if (p == cplx{}) continue;
                for (int j = 0; j < m; ++j) at(tmp, i, j) += p * at(z, l, j);
            }
        power.swap(tmp);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) at(result, i, j) += inv_fact * at(power, i, j);
    }
    for (int s = 0; s < squarings; ++s) {
        std::fill(tmp.begin(), tmp.end(), cplx{});
        for (int i = 0; i < m; ++i)
            for (int l = 0; l < m; ++l) {
                const cplx p = at(result, i, l);
                if (p == cplx{}) continue;
                for (int j = 0; j < m; ++j) at(tmp, i, j) += p * at(result, l, j);
            }
        result.swap(tmp);
    }
    return at(result, 0, m - 1);
}

} // namespace detail

// I_n via divided differences: I_n = τⁿ · Δⁿexp(iμ₀τ, …, iμ_nτ) with μ_k the
// suffix sums μ_k = ω_n + … + ω_{n−k+1}, μ₀ = 0. Valid for any frequencies.
inline cplx ordered_integral_limit(std::span<const double> omegas, double tau) {
    const int n = static_cast<int>(omegas.size());
    std::vector<cplx> nodes(static_cast<std::size_t>(n) + 1);
    double acc = 0.0;
    nodes[0] = cplx{};
    for (int k = 1; k <= n; ++k) {
        acc += omegas[static_cast<std::size_t>(n - k)];
        nodes[static_cast<std::size_t>(k)] = kImag * (acc * tau);
    }
    cplx dd = detail::divided_difference_exp(nodes);
    return std::pow(tau, n) * dd;
}

// Time-ordered integral of e^{iΣω_j s_j} over the ordered simplex of [0, τ].
inline cplx ordered_integral(std::span<const double> omegas, double tau,
                             const Tolerances& tol = default_tolerances()) {
    const int n = static_cast<int>(omegas.size());
    if (n < 1) throw std::invalid_argument("ordered_integral: need n ≥ 1");
    if (!(tau > 0.0)) throw std::invalid_argument("ordered_integral: require τ > 0");

    // Every denominator in the recursion is a contiguous suffix sum of a prefix
    // list ω₁..ω_m: ω_j + … + ω_m for 1 ≤ j ≤ m ≤ n. Below ε_res the limit
    // evaluation is mandatory; the wider stability band avoids cancellation in
    // the recursion (the limit path is exact, so widening only helps).
    double sum_abs = 0.0;
    for (int j = 0; j < n; ++j) sum_abs += std::abs(omegas[static_cast<std::size_t>(j)]);
    const double eps_switch =
        std::max(tol.resonance_scale, 1e-4) * std::max(1.0, sum_abs);
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int j = m; j >= 1; --j) {
            s += omegas[static_cast<std::size_t>(j - 1)];
            if (std::abs(s) < eps_switch) return ordered_integral_limit(omegas, tau);
        }
    }

    // A_k^n = A_{k−1}^{n−1}/Ω_{k−1}^n with Ω_{k−1}^n = Σ_{j=n−(k−1)}^n ω_j,
    // built level by level over the prefix lists; value at level m uses the
    // suffix sums of ω₁..ω_m.
    std::vector<cplx> A{cplx(1.0 / omegas[0], 0.0)}; // A_1^1
    for (int m = 2; m <= n; ++m) {
        std::vector<cplx> next(static_cast<std::size_t>(m));
        cplx a0_prev = 0.0; // A_0^{m−1} = −Σ_k A_k^{m−1}
        for (const cplx& a : A) a0_prev -= a;
        double suffix = 0.0;
        for (int k = 1; k <= m; ++k) {
            suffix += omegas[static_cast<std::size_t>(m - k)];
            const cplx prev = (k == 1) ? a0_prev : A[static_cast<std::size_t>(k - 2)];
            next[static_cast<std::size_t>(k - 1)] = prev / suffix;
        }
        A.swap(next);
    }

    cplx total = 0.0;
    double suffix = 0.0;
    for (int k = 1; k <= n; ++k) {
        suffix += omegas[static_cast<std::size_t>(n - k)];
        total += A[static_cast<std::size_t>(k - 1)] * (std::polar(1.0, suffix * tau) - 1.0);
    }
    cplx prefactor = 1.0;
    for (int j = 0; j < n; ++j) prefactor *= -kImag;
    return prefactor * total;
}

// Phase relating the [0, τ]-normalized ordered integral to the actual slice:
// e^{iΣω(t_j − τ/2)} for Centered, e^{iΣω t_j} for Forward. Modulus one.
inline cplx slice_phase(std::span<const double> omegas, const TimeSlice& slice) {
    double sum = 0.0;
    for (double w : omegas) sum += w;
    return std::polar(1.0, sum * slice.start());
}

} // namespace magnuseff
