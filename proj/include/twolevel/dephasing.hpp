// dephasing.hpp: the sigma_z-coupled (pure dephasing) model
//
//     H = omega0 S_z + sum_k omega_k b_k^dag b_k + c sigma_z sum_k g_k (b_k + b_k^dag)
//
// at zero temperature, and its comparison with the sigma_+- model.
// c = z_coupling_scale: 1 for the sigma_z normalization, 1/2 for S_z.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twolevel/core.hpp"
#include "twolevel/evolution.hpp"

namespace twolevel {

struct DephasingOptions {
    double z_coupling_scale = 1.0;
    double omega0 = 0.0;  // adds the free -omega0 t to the phase; 0 reports the bath phase only
};

struct DephasingResult {
    TimeGrid grid;
    std::vector<double> coherence;  // D(t) = |rho_eg(t)| / |rho_eg(0)|
    std::vector<double> phase;      // arg(rho_eg(t) / rho_eg(0)), unwrapped
    double population_drift = 0.0;  // max |rho_ee(t) - rho_ee(0)|
};

/// D(t) = exp[-sum_k 4 c^2 g_k^2 / omega_k^2 (1 - cos omega_k t)], obtained
/// from the overlap of the two displaced-vacuum branches.
DephasingResult dephasing_coherence(const ModeSet& modes, const TimeGrid& grid, const DephasingOptions& options = {});

/// 4 c^2 sum_k g_k^2/omega_k^2 (1 - cos omega_k t), the exponent alone.
double dephasing_exponent(const ModeSet& modes, double t, double z_coupling_scale = 1.0);

struct ModelRow {
    std::string model;
    std::optional<double> t1;  // population 1/e time (none when populations are frozen)
    std::optional<double> t2;  // coherence 1/e time
    bool population_decays = false;
};

struct ComparisonReport {
    ModelRow sigma_pm;
    ModelRow sigma_z;
    std::optional<double> sigma_pm_t1_over_t2;
    std::optional<double> coherence_time_ratio;  // T2(sigma_z) / T2(sigma_pm)
    double sigma_z_population_drift = 0.0;

    std::vector<ModelRow> rows() const { return {sigma_pm, sigma_z}; }
    std::string render() const;
};

/// Both inputs must live on the same grid.
ComparisonReport compare_models(const Trajectory& sigma_pm, const DephasingResult& sigma_z);

}  // namespace twolevel
