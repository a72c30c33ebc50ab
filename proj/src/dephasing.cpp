#include "twolevel/dephasing.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace twolevel {

namespace {

// <bra|ket> for coherent states
cplx coherent_overlap(cplx bra, cplx ket) {
    return std::exp(-0.5 * std::norm(bra) - 0.5 * std::norm(ket) + std::conj(bra) * ket);
}

// Vacuum driven by +-f evolves to |alpha_+-(t)> with alpha_+- = +-(f/omega)(e^{-i omega t} - 1).
// The dynamical phase (f/omega)^2 (omega t - sin omega t) is even in f and
// cancels between the branches.
cplx displacement(double omega, double f, double t) { return (f / omega) * (std::polar(1.0, -omega * t) - 1.0); }

}  // namespace

double dephasing_exponent(const ModeSet& modes, double t, double c) {
    double acc = 0.0;
    for (const auto& m : modes.modes()) acc += 4.0 * c * c * m.g * m.g / (m.omega * m.omega) * (1.0 - std::cos(m.omega * t));
    return acc;
}

DephasingResult dephasing_coherence(const ModeSet& modes, const TimeGrid& grid, const DephasingOptions& opt) {
    for (const auto& m : modes.modes())
        if (m.omega == 0.0) throw std::invalid_argument("zero-frequency mode unsupported");

    DephasingResult r{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()), 0.0};
    double prev = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        cplx overlap(1.0, 0.0), norm_plus(1.0, 0.0);
        for (const auto& m : modes.modes()) {
            const cplx a = displacement(m.omega, opt.z_coupling_scale * m.g, t);
            overlap *= coherent_overlap(-a, a);
            norm_plus *= coherent_overlap(a, a);
        }
        r.coherence[j] = std::abs(overlap);
        // rho_ee(t) = rho_ee(0) <psi_+|psi_+>
        r.population_drift = std::max(r.population_drift, std::abs(1.0 - norm_plus));

        double phase = std::arg(overlap) - opt.omega0 * t;
        if (j > 0) phase = prev + std::remainder(phase - prev, 2.0 * std::numbers::pi);
        r.phase[j] = phase;
        prev = phase;
    }
    return r;
}

ComparisonReport compare_models(const Trajectory& pm, const DephasingResult& z) {
    if (!(pm.grid == z.grid)) throw std::invalid_argument("sigma_pm and sigma_z results are on different grids");

    const double inv_e = std::exp(-1.0);
    ComparisonReport rep;
    rep.sigma_pm.model = "sigma_pm";
    if (pm.rho_ee.front() > 0.0) {
        std::vector<double> pop(pm.rho_ee.size());
        for (std::size_t j = 0; j < pop.size(); ++j) pop[j] = pm.rho_ee[j] / pm.rho_ee.front();
        rep.sigma_pm.t1 = first_crossing(pm.grid, pop, inv_e);
        rep.sigma_pm.population_decays = pop.back() < 1.0 - 1e-9;
    }
    if (pm.abs_rho_eg.front() > 0.0) {
        std::vector<double> coh(pm.abs_rho_eg.size());
        for (std::size_t j = 0; j < coh.size(); ++j) coh[j] = pm.abs_rho_eg[j] / pm.abs_rho_eg.front();
        rep.sigma_pm.t2 = first_crossing(pm.grid, coh, inv_e);
    }

    rep.sigma_z.model = "sigma_z";
    rep.sigma_z.t2 = first_crossing(z.grid, z.coherence, inv_e);
    rep.sigma_z.population_decays = false;
    rep.sigma_z_population_drift = z.population_drift;

    if (rep.sigma_pm.t1 && rep.sigma_pm.t2) rep.sigma_pm_t1_over_t2 = *rep.sigma_pm.t1 / *rep.sigma_pm.t2;
    if (rep.sigma_z.t2 && rep.sigma_pm.t2) rep.coherence_time_ratio = *rep.sigma_z.t2 / *rep.sigma_pm.t2;
    return rep;
}

std::string ComparisonReport::render() const {
    auto fmt = [](const std::optional<double>& v) {
        if (!v) return std::string("-");
        std::ostringstream os;
        os.precision(6);
        os << *v;
        return os.str();
    };
    std::ostringstream os;
    os << "model      T1          T2          T1/T2       population\n";
    for (const auto& row : rows()) {
        std::optional<double> ratio;
        if (row.t1 && row.t2) ratio = *row.t1 / *row.t2;
        os.width(11);
        os << std::left << row.model;
        os.width(12);
        os << fmt(row.t1);
        os.width(12);
        os << fmt(row.t2);
        os.width(12);
        os << fmt(ratio);
        os << (row.population_decays ? "decays" : "frozen") << "\n";
    }
    os << "T2(sigma_z)/T2(sigma_pm): " << fmt(coherence_time_ratio) << "\n";
    os << "sigma_z population drift: " << sigma_z_population_drift << "\n";
    return os.str();
}

}  // namespace twolevel
