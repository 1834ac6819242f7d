// propagation.hpp — Time evolution on uniform grids: exact propagators of
// static Hamiltonians, sliced products of effective Hamiltonians, probe-state
// construction, and population histories.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lambda_model.hpp"

namespace magnuseff::prop {

using lambda::LambdaParams;

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    int n_points = 2;

    TimeGrid(double a, double b, int n) : t_start(a), t_end(b), n_points(n) {
        if (!(b > a) || n < 2 || !std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("TimeGrid: require t_end > t_start and n_points ≥ 2");
    }

    double dt() const { return (t_end - t_start) / (n_points - 1); }
    double time(int k) const { return t_start + k * dt(); }
};

enum class MethodLabel { Exact, AE, ME2, ME24, ME234 };

inline const char* method_name(MethodLabel m) {
    switch (m) {
        case MethodLabel::Exact: return "Exact";
        case MethodLabel::AE: return "AE";
        case MethodLabel::ME2: return "ME2";
        case MethodLabel::ME24: return "ME24";
        case MethodLabel::ME234: return "ME234";
    }
    return "?";
}

struct PropagatorSeries {
    TimeGrid grid;
    std::vector<Mat> unitaries; // one per grid point, U(t_start) = 𝟙
    MethodLabel label = MethodLabel::Exact;

    void check_unitarity(const Tolerances& tol = default_tolerances()) const {
        for (const Mat& u : unitaries) (void)UnitaryMatrix(u, tol);
    }
};

struct TimeSeries {
    TimeGrid grid;
    std::vector<std::string> channels;
    std::vector<std::vector<double>> values; // values[channel][point]
};

// U(t_k) = exp(−iH·(t_k − t_start)); one eigendecomposition reused across the
// grid, so the group property holds to round-off.
inline PropagatorSeries propagate_static(const HermitianMatrix& h, const TimeGrid& grid,
                                         MethodLabel label = MethodLabel::Exact) {
    const EigResult eig = herm_eig(h);
    PropagatorSeries out{grid, {}, label};
    out.unitaries.reserve(static_cast<std::size_t>(grid.n_points));
    for (int k = 0; k < grid.n_points; ++k)
        out.unitaries.push_back(expm_from_eig(eig, grid.time(k) - grid.t_start));
    return out;
}

// Ordered product of per-slice exponentials U ≈ Π_j exp(−iH_eff(t_j)τ).
// Grid spacing must be a whole number of slices.
inline PropagatorSeries propagate_sliced(const std::function<HermitianMatrix(double)>& h_eff_at,
                                         const TimeGrid& grid, double tau,
                                         MethodLabel label = MethodLabel::ME2) {
    if (!(tau > 0.0)) throw std::invalid_argument("propagate_sliced: require τ > 0");
    const double steps_per_dt = grid.dt() / tau;
    const double rounded = std::round(steps_per_dt);
    const double remainder = std::abs(steps_per_dt - rounded);
    if (rounded < 1.0 || remainder > 1e-9 * std::max(1.0, rounded))
        throw std::invalid_argument(
            "propagate_sliced: grid spacing is not a whole number of slices (remainder " +
            std::to_string(remainder * tau) + ")");
    const int slices_per_step = static_cast<int>(rounded);

    PropagatorSeries out{grid, {}, label};
    out.unitaries.reserve(static_cast<std::size_t>(grid.n_points));
    Mat u = Mat::identity(3);
    out.unitaries.push_back(u);
    for (int k = 1; k < grid.n_points; ++k) {
        for (int s = 0; s < slices_per_step; ++s) {
            const double center = grid.time(k - 1) + (s + 0.5) * tau;
            u = expm_hermitian(h_eff_at(center), tau).m() * u;
        }
        out.unitaries.push_back(u);
    }
    return out;
}

// Initial probe pair of §-style mixing: θ from the Bloch decomposition of the
// AE block, ψ₀ = cos(θ'/2)|0⟩ + sin(θ'/2)|1⟩ with θ' = θ + π/2.
inline std::pair<Vec, Vec> probe_states(const LambdaParams& p) {
    const lambda::EffCoefficients c = lambda::ae_effective(p);
    // traceless Bloch parts of the AE 2×2 block
    const double hz = -0.5 * (p.delta - c.S0 + c.S1);
    const double hxy = 0.5 * std::abs(c.Omega_tilde);
    if (std::abs(hz) < 1e-300 && hxy < 1e-300)
        throw NumericsError("probe_states: AE block proportional to identity; angle undefined");
    const double theta = std::atan2(hxy, hz);
    const double theta_p = theta + 0.5 * M_PI;

    Vec psi0(3), psi1(3);
    psi0[0] = std::cos(0.5 * theta_p);
    psi0[1] = std::sin(0.5 * theta_p);
    psi1[0] = -std::sin(0.5 * theta_p);
    psi1[1] = std::cos(0.5 * theta_p);
    return {psi0, psi1};
}

// Channels |⟨target|U(t)|ψ₀⟩|² for each target state.
inline TimeSeries population_histories(const PropagatorSeries& series, const Vec& psi0,
                                       const std::vector<std::pair<std::string, Vec>>& targets) {
    TimeSeries out{series.grid, {}, {}};
    for (const auto& [name, target] : targets) {
        (void)target;
        out.channels.push_back(name);
    }
    out.values.assign(targets.size(), std::vector<double>(
                                          static_cast<std::size_t>(series.grid.n_points), 0.0));
    for (int k = 0; k < series.grid.n_points; ++k) {
        const Vec evolved = series.unitaries[static_cast<std::size_t>(k)] * psi0;
        for (std::size_t c = 0; c < targets.size(); ++c)
            out.values[c][static_cast<std::size_t>(k)] =
                std::norm(inner(targets[c].second, evolved));
    }
    return out;
}

} // namespace magnuseff::prop
