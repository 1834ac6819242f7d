// eig.hpp — Cyclic Jacobi eigendecomposition for small Hermitian matrices,
// Hermitian matrix exponential, spectral norm, and a series-protected sinc.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "complex_linalg.hpp"

namespace magnuseff {

// sin(x)/x, unnormalized; 7th-order Taylor series below |x| = 1e-4.
inline double sinc(double x) {
    const double ax = std::abs(x);
    if (ax >= 1e-4) return std::sin(x) / x;
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0;
}

struct EigNonConvergence : NumericsError {
    explicit EigNonConvergence(int sweeps)
        : NumericsError("herm_eig: Jacobi sweep limit reached after " + std::to_string(sweeps) +
                        " sweeps"),
          sweeps_used(sweeps) {}
    int sweeps_used;
};

struct EigResult {
    std::vector<double> eigenvalues; // ascending
    Mat vectors;                     // unitary, eigenvectors in columns
};

// Cyclic complex Jacobi. H = V diag(λ) V† with λ ascending.
inline EigResult herm_eig(const HermitianMatrix& h) {
    const int n = h.dim();
    Mat A = h.m();
    Mat V = Mat::identity(n);

    const double scale = std::max(A.frobenius(), 1e-300);
    const double stop = 1e-15 * scale;
    const int max_sweeps = 60;

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(A(p, q));
        if (std::sqrt(off) <= stop) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = A(p, q);
                const double r = std::abs(apq);
                if (r <= 1e-300) continue;

                // unitary 2×2 rotation G = [[c, s·φ], [−s·φ*, c]] zeroing A(p,q),
                // φ = apq/|apq|
                const cplx phi = apq / r;
                const double beta = (A(q, q).real() - A(p, p).real()) / (2.0 * r);
                const double t = (beta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(beta) + std::sqrt(beta * beta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // columns: col_p' = c·col_p − s·φ*·col_q ; col_q' = s·φ·col_p + c·col_q
                for (int i = 0; i < n; ++i) {
                    const cplx aip = A(i, p), aiq = A(i, q);
                    A(i, p) = c * aip - s * std::conj(phi) * aiq;
                    A(i, q) = s * phi * aip + c * aiq;
                    const cplx vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * std::conj(phi) * viq;
                    V(i, q) = s * phi * vip + c * viq;
                }
                // rows (G† from the left)
                for (int j = 0; j < n; ++j) {
                    const cplx apj = A(p, j), aqj = A(q, j);
                    A(p, j) = c * apj - s * phi * aqj;
                    A(q, j) = s * std::conj(phi) * apj + c * aqj;
                }
            }
        }
    }
    if (sweep >= max_sweeps) throw EigNonConvergence(max_sweeps);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return A(i, i).real() < A(j, j).real(); });

    EigResult out;
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    out.vectors = Mat(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[static_cast<std::size_t>(k)] = A(order[static_cast<std::size_t>(k)],
                                                         order[static_cast<std::size_t>(k)])
                                                           .real();
        for (int i = 0; i < n; ++i) out.vectors(i, k) = V(i, order[static_cast<std::size_t>(k)]);
    }
    return out;
}

// exp(−iHt) = V e^{−iλt} V†, exactly unitary up to the eigensolve accuracy.
inline UnitaryMatrix expm_hermitian(const HermitianMatrix& h, double t,
                                    const Tolerances& tol = default_tolerances()) {
    if (!std::isfinite(t)) throw NumericsError("expm_hermitian: non-finite time");
    const EigResult e = herm_eig(h);
    const int n = h.dim();
    Mat u(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) {
                const double lam = e.eigenvalues[static_cast<std::size_t>(k)];
                const cplx ph = std::polar(1.0, -lam * t);
                s += e.vectors(i, k) * ph * std::conj(e.vectors(j, k));
            }
            u(i, j) = s;
        }
    return UnitaryMatrix(u, tol);
}

// expm variant reusing a precomputed decomposition (static propagation reuses one eig).
inline Mat expm_from_eig(const EigResult& e, double t) {
    const int n = e.vectors.n;
    Mat u(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k)
                s += e.vectors(i, k) * std::polar(1.0, -e.eigenvalues[static_cast<std::size_t>(k)] * t) *
                     std::conj(e.vectors(j, k));
            u(i, j) = s;
        }
    return u;
}

// Largest singular value via the Hermitian eigenproblem of M†M.
inline double spectral_norm(const Mat& m) {
    if (!m.is_finite()) throw NumericsError("spectral_norm: non-finite entries");
    const Mat g = m.adjoint() * m;
    // G is Hermitian positive semidefinite by construction
    const EigResult e = herm_eig(HermitianMatrix(g));
    const double lam = e.eigenvalues.back();
    return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

} // namespace magnuseff
