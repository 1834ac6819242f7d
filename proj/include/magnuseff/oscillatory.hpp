// oscillatory.hpp — Hamiltonians of the form H(t) = Σ_k M_k e^{iω_k t} and the
// time slices used for coarse-graining.

#pragma once

#include <cmath>
#include <vector>

#include "complex_linalg.hpp"

namespace magnuseff {

struct OscTerm {
    Mat coeff;
    double omega = 0.0; // angular frequency
};

// H(t) = Σ_k M_k e^{iω_k t}; Hermiticity comes from conjugate-pair terms.
struct OscillatoryHamiltonian {
    int dim = 0;
    std::vector<OscTerm> terms;

    OscillatoryHamiltonian() = default;
    OscillatoryHamiltonian(int d, std::vector<OscTerm> ts) : dim(d), terms(std::move(ts)) {
        if (dim < 1 || dim > kMaxDim) throw DimensionError("OscillatoryHamiltonian: bad dim");
        double wmax = 0.0;
        for (const auto& t : terms) {
            if (t.coeff.n != dim) throw DimensionError("OscillatoryHamiltonian: term dim mismatch");
            if (!t.coeff.is_finite() || !std::isfinite(t.omega))
                throw NumericsError("OscillatoryHamiltonian: non-finite term");
            wmax = std::max(wmax, std::abs(t.omega));
        }
        // Hermiticity probe at t = 0 and one fixed off-grid time
        const double probe = 0.7316221 / std::max(wmax, 1.0);
        for (double t : {0.0, probe}) {
            const Mat h = eval(t);
            const double scale = std::max(h.max_abs(), 1e-300);
            if (hermiticity_defect(h) > 1e-10 * scale)
                throw NumericsError("OscillatoryHamiltonian: not Hermitian");
        }
    }

    Mat eval(double t) const {
        Mat h(dim);
        for (const auto& term : terms) {
            const cplx ph = std::polar(1.0, term.omega * t);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) h(i, j) += term.coeff(i, j) * ph;
        }
        return h;
    }

    // Σ_k ‖M_k‖_max as a cheap uniform bound scale
    double coeff_scale() const {
        double s = 0.0;
        for (const auto& t : terms) s += t.coeff.max_abs();
        return s;
    }

    double max_abs_omega() const {
        double w = 0.0;
        for (const auto& t : terms) w = std::max(w, std::abs(t.omega));
        return w;
    }
};

enum class SliceMode { Centered, Forward };

// Centered integrates over [t − τ/2, t + τ/2], Forward over [t, t + τ].
struct TimeSlice {
    double t = 0.0;   // slice anchor t_j (center for Centered, start for Forward)
    double tau = 0.0; // slice width
    SliceMode mode = SliceMode::Centered;

    TimeSlice(double anchor, double width, SliceMode m = SliceMode::Centered)
        : t(anchor), tau(width), mode(m) {
        if (!(tau > 0.0) || !std::isfinite(tau) || !std::isfinite(t))
            throw std::invalid_argument("TimeSlice: require finite anchor and τ > 0");
    }

    double start() const { return mode == SliceMode::Centered ? t - 0.5 * tau : t; }
    double end() const { return start() + tau; }
};

} // namespace magnuseff
