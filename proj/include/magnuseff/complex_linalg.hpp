// complex_linalg.hpp — Small dense complex matrices and state vectors (n ≤ 8),
// strong wrapper types for Hermitian/unitary operators, commutators and norms.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "tolerances.hpp"

namespace magnuseff {

using cplx = std::complex<double>;
inline constexpr cplx kImag{0.0, 1.0};
inline constexpr int kMaxDim = 8;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------- SquareMatrix -------------------------------

// Row-major dense complex square matrix, fixed capacity kMaxDim.
struct Mat {
    int n = 0;
    std::array<cplx, kMaxDim * kMaxDim> a{};

    Mat() = default;
    explicit Mat(int dim) : n(dim) {
        if (dim < 1 || dim > kMaxDim) throw DimensionError("Mat: dim must be in [1, 8]");
    }

    static Mat zero(int dim) { return Mat(dim); }
    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * kMaxDim + j]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * kMaxDim + j]; }

    bool is_finite() const {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const cplx& z = (*this)(i, j);
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
            }
        return true;
    }

    Mat adjoint() const {
        Mat r(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (int i = 0; i < n; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += std::norm((*this)(i, j));
        return std::sqrt(s);
    }

    Mat& operator+=(const Mat& o) {
        check_same_dim(o);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (*this)(i, j) += o(i, j);
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_same_dim(o);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (*this)(i, j) -= o(i, j);
        return *this;
    }
    Mat& operator*=(cplx s) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (*this)(i, j) *= s;
        return *this;
    }

    void check_same_dim(const Mat& o) const {
        if (n != o.n) throw DimensionError("Mat: dimension mismatch");
    }
};

inline Mat operator+(Mat l, const Mat& r) { return l += r; }
inline Mat operator-(Mat l, const Mat& r) { return l -= r; }
inline Mat operator*(cplx s, Mat m) { return m *= s; }
inline Mat operator*(Mat m, cplx s) { return m *= s; }

inline Mat operator*(const Mat& l, const Mat& r) {
    l.check_same_dim(r);
    Mat out(l.n);
    for (int i = 0; i < l.n; ++i)
        for (int k = 0; k < l.n; ++k) {
            const cplx lik = l(i, k);
            if (lik == cplx{}) continue;
            for (int j = 0; j < l.n; ++j) out(i, j) += lik * r(k, j);
        }
    return out;
}

// AB − BA; antisymmetric in its arguments.
inline Mat commutator(const Mat& a, const Mat& b) {
    a.check_same_dim(b);
    return a * b - b * a;
}

// |i⟩⟨j| in dim-dimensional space
inline Mat ket_bra(int dim, int i, int j) {
    Mat m(dim);
    if (i < 0 || i >= dim || j < 0 || j >= dim) throw DimensionError("ket_bra: index out of range");
    m(i, j) = 1.0;
    return m;
}

inline Mat diag(int dim, const double* entries) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = entries[i];
    return m;
}

// -------------------------------- StateVector --------------------------------

struct Vec {
    int n = 0;
    std::array<cplx, kMaxDim> v{};

    Vec() = default;
    explicit Vec(int dim) : n(dim) {
        if (dim < 1 || dim > kMaxDim) throw DimensionError("Vec: dim must be in [1, 8]");
    }

    static Vec basis(int dim, int i) {
        Vec out(dim);
        if (i < 0 || i >= dim) throw DimensionError("Vec::basis: index out of range");
        out.v[static_cast<std::size_t>(i)] = 1.0;
        return out;
    }

    cplx& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    const cplx& operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

    double norm() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::norm(v[static_cast<std::size_t>(i)]);
        return std::sqrt(s);
    }

    bool is_finite() const {
        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(v[static_cast<std::size_t>(i)].real()) ||
                !std::isfinite(v[static_cast<std::size_t>(i)].imag()))
                return false;
        }
        return true;
    }

    Vec normalized() const {
        const double nn = norm();
        if (nn == 0.0) throw NumericsError("Vec::normalized: zero vector");
        Vec out = *this;
        for (int i = 0; i < n; ++i) out[i] /= nn;
        return out;
    }
};

// ⟨a|b⟩ with the left argument conjugated
inline cplx inner(const Vec& a, const Vec& b) {
    if (a.n != b.n) throw DimensionError("inner: dimension mismatch");
    cplx s = 0.0;
    for (int i = 0; i < a.n; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline Vec operator*(const Mat& m, const Vec& x) {
    if (m.n != x.n) throw DimensionError("Mat*Vec: dimension mismatch");
    Vec out(x.n);
    for (int i = 0; i < m.n; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < m.n; ++j) s += m(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

// ------------------------------ wrapper types --------------------------------

inline double hermiticity_defect(const Mat& m) {
    double d = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = i; j < m.n; ++j) d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
    return d;
}

// Hermitian matrix, checked on construction: ‖M − M†‖ ≤ tol·‖M‖.
struct HermitianMatrix {
    explicit HermitianMatrix(const Mat& m, const Tolerances& tol = default_tolerances()) : m_(m) {
        if (!m.is_finite()) throw NumericsError("HermitianMatrix: non-finite entries");
        const double scale = std::max(m.max_abs(), 1e-300);
        if (hermiticity_defect(m) > tol.hermitian_rel * scale)
            throw NumericsError("HermitianMatrix: Hermiticity defect above tolerance");
        // symmetrize the representation so downstream algebra sees M = M† exactly
        for (int i = 0; i < m_.n; ++i) {
            m_(i, i) = cplx(m_(i, i).real(), 0.0);
            for (int j = i + 1; j < m_.n; ++j) {
                const cplx avg = 0.5 * (m_(i, j) + std::conj(m_(j, i)));
                m_(i, j) = avg;
                m_(j, i) = std::conj(avg);
            }
        }
    }

    const Mat& m() const { return m_; }
    int dim() const { return m_.n; }

  private:
    Mat m_;
};

// Unitary matrix, checked on construction: ‖U†U − 𝟙‖ ≤ tol.
struct UnitaryMatrix {
    explicit UnitaryMatrix(const Mat& m, const Tolerances& tol = default_tolerances()) : m_(m) {
        if (!m.is_finite()) throw NumericsError("UnitaryMatrix: non-finite entries");
        const Mat defect = m.adjoint() * m - Mat::identity(m.n);
        if (defect.max_abs() > tol.unitary_abs)
            throw NumericsError("UnitaryMatrix: unitarity defect above tolerance");
    }

    const Mat& m() const { return m_; }
    int dim() const { return m_.n; }

  private:
    Mat m_;
};

} // namespace magnuseff
