// evolution.hpp: the exact zero-temperature two-level map driven by u(t),
//
//     rho_ee(t) = |u|^2 (1 - x),   rho_eg(t) = u y,   rho_gg(t) = 1 - rho_ee(t),
//
// its consistency with the time-local master equation
//
//     d rho/dt = -i [H(t), rho] + Gamma(t) {S+S-, rho} - 2 Gamma(t) S- rho S+,
//     H(t) = Omega(t) S+S-,
//
// and the T1 / T2 timescales.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twolevel/core.hpp"
#include "twolevel/volterra.hpp"

namespace twolevel {

struct Trajectory {
    TimeGrid grid;
    TwoLevelState initial;
    std::vector<TwoLevelState> states;
    std::vector<double> rho_ee;
    std::vector<double> abs_rho_eg;
    std::vector<double> purity;
    std::vector<double> emission;  // 1 - rho_ee(t)/rho_ee(0); zero when rho_ee(0) = 0
};

Trajectory propagate(const Amplitude& amplitude, const TwoLevelState& initial);

/// P(1 -> 0, t) = 1 - |u(t)|^2
std::vector<double> emission_probability(const Amplitude& amplitude);

/// Signs multiplying Gamma(t) and Omega(t) when the master equation is
/// evaluated with Gamma + i Omega = du/u taken literally.
struct MasterEquationConvention {
    int gamma_sign = 1;
    int omega_sign = 1;

    std::string describe() const;
};

/// The sign pair under which the residual vanishes for the free atom and the
/// single resonant mode (both solved in closed form). Computed once.
const MasterEquationConvention& calibrated_convention();

struct ResidualSeries {
    std::vector<double> t;
    std::vector<double> residual;  // max-norm over the 2x2 entries

    double max() const;
};

/// |d rho/dt - RHS| at every unmasked grid point, d rho/dt by central
/// differences (one-sided second order at the ends). Empty if all points are
/// masked.
ResidualSeries master_equation_residual(const Amplitude& amplitude, const Trajectory& trajectory,
                                        const MasterEquationConvention& convention = calibrated_convention());

/// Same, with constant rates (Lindblad form) in place of Gamma(t), Omega(t).
ResidualSeries master_equation_residual_constant(const Trajectory& trajectory, double gamma, double omega,
                                                 const MasterEquationConvention& convention = calibrated_convention());

/// Right-hand side of the master equation for one state.
Eigen::Matrix2cd master_equation_rhs(const Eigen::Matrix2cd& rho, double gamma, double omega,
                                     const MasterEquationConvention& convention);

struct Timescales {
    std::optional<double> t1;  // rho_ee / rho_ee(0) first reaches 1/e
    std::optional<double> t2;  // |rho_eg| / |rho_eg(0)| first reaches 1/e
    double gamma_fit_raw = 0.0;  // -slope of log|u| over the exponential window
    double fit_quality = 0.0;    // R^2 of that fit, clipped to [0, 1]

    /// Only reported when the fit is convincingly exponential.
    std::optional<double> gamma_fit() const;
};

inline constexpr double kFitQualityThreshold = 0.99;

/// Throws NumericalError("insufficient decay in window") when neither the
/// population nor the coherence reaches 1/e.
Timescales extract_timescales(const Trajectory& trajectory);

/// First time a sampled non-negative series drops to `level`, linearly
/// interpolated between grid points.
std::optional<double> first_crossing(const TimeGrid& grid, const std::vector<double>& series, double level);

}  // namespace twolevel
