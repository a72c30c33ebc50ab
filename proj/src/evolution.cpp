#include "twolevel/evolution.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace twolevel {

Trajectory propagate(const Amplitude& a, const TwoLevelState& s0) {
    const std::size_t n = a.grid().size();
    Trajectory tr{a.grid(), s0, {}, {}, {}, {}, {}};
    tr.states.reserve(n);
    tr.rho_ee.reserve(n);
    tr.abs_rho_eg.reserve(n);
    tr.purity.reserve(n);
    tr.emission.reserve(n);
    const double ee0 = s0.rho_ee();
    for (std::size_t j = 0; j < n; ++j) {
        const cplx u = a.u()[j];
        const double ee = std::norm(u) * ee0;
        const TwoLevelState s{1.0 - ee, u * s0.y};
        tr.states.push_back(s);
        tr.rho_ee.push_back(ee);
        tr.abs_rho_eg.push_back(std::abs(s.y));
        tr.purity.push_back(s.purity());
        tr.emission.push_back(ee0 > 0.0 ? 1.0 - ee / ee0 : 0.0);
    }
    return tr;
}

std::vector<double> emission_probability(const Amplitude& a) {
    std::vector<double> p(a.u().size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = 1.0 - std::norm(a.u()[j]);
    return p;
}

std::string MasterEquationConvention::describe() const {
    std::ostringstream os;
    os << "H(t) = " << (omega_sign > 0 ? "+" : "-") << "Omega(t) S+S-, dissipator rate "
       << (gamma_sign > 0 ? "+" : "-") << "Gamma(t), Gamma + i Omega = du/u";
    return os.str();
}

Eigen::Matrix2cd master_equation_rhs(const Eigen::Matrix2cd& rho, double gamma, double omega,
                                     const MasterEquationConvention& c) {
    const Eigen::Matrix2cd p = spin::splus() * spin::sminus();
    const Eigen::Matrix2cd h = (c.omega_sign * omega) * p;
    const double g = c.gamma_sign * gamma;
    const cplx i(0.0, 1.0);
    return -i * (h * rho - rho * h) + g * (p * rho + rho * p) - 2.0 * g * spin::sminus() * rho * spin::splus();
}

double ResidualSeries::max() const {
    double m = 0.0;
    for (double r : residual) m = std::max(m, r);
    return m;
}

namespace {

Eigen::Matrix2cd time_derivative(const Trajectory& tr, std::size_t j) {
    const std::size_t n = tr.states.size();
    const double h = tr.grid.step();
    auto rho = [&](std::size_t k) { return tr.states[k].matrix(); };
    if (j == 0) return (-3.0 * rho(0) + 4.0 * rho(1) - rho(2)) / (2.0 * h);
    if (j == n - 1) return (3.0 * rho(n - 1) - 4.0 * rho(n - 2) + rho(n - 3)) / (2.0 * h);
    return (rho(j + 1) - rho(j - 1)) / (2.0 * h);
}

double max_abs_entry(const Eigen::Matrix2cd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

ResidualSeries master_equation_residual(const Amplitude& a, const Trajectory& tr,
                                        const MasterEquationConvention& c) {
    if (!(a.grid() == tr.grid)) throw std::invalid_argument("amplitude and trajectory grids differ");
    const RateFunctions rates = rates_from_u(a);
    ResidualSeries out;
    for (std::size_t j = 0; j < tr.states.size(); ++j) {
        if (rates.mask[j]) continue;
        const Eigen::Matrix2cd rhs = master_equation_rhs(tr.states[j].matrix(), rates.gamma[j], rates.omega[j], c);
        out.t.push_back(tr.grid.at(j));
        out.residual.push_back(max_abs_entry(time_derivative(tr, j) - rhs));
    }
    return out;
}

ResidualSeries master_equation_residual_constant(const Trajectory& tr, double gamma, double omega,
                                                 const MasterEquationConvention& c) {
    ResidualSeries out;
    for (std::size_t j = 0; j < tr.states.size(); ++j) {
        const Eigen::Matrix2cd rhs = master_equation_rhs(tr.states[j].matrix(), gamma, omega, c);
        out.t.push_back(tr.grid.at(j));
        out.residual.push_back(max_abs_entry(time_derivative(tr, j) - rhs));
    }
    return out;
}

const MasterEquationConvention& calibrated_convention() {
    static const MasterEquationConvention convention = [] {
        // Reference cases with u and du/dt in closed form: the free atom, and
        // one resonant mode where u = exp(-i w t) cos(g t).
        const double w = 1.3, g = 0.4;
        const TimeGrid grid(3.0, 3000);
        const TwoLevelState s0{0.3, cplx(0.35, 0.2)};
        std::vector<cplx> u_free(grid.size()), du_free(grid.size()), u_jc(grid.size()), du_jc(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double t = grid.at(j);
            const cplx phase = std::polar(1.0, -w * t);
            u_free[j] = phase;
            du_free[j] = cplx(0.0, -w) * phase;
            u_jc[j] = phase * std::cos(g * t);
            du_jc[j] = phase * (cplx(0.0, -w) * std::cos(g * t) - g * std::sin(g * t));
        }
        const std::array<Amplitude, 2> refs{Amplitude(grid, u_free, du_free), Amplitude(grid, u_jc, du_jc)};

        MasterEquationConvention best;
        double best_residual = std::numeric_limits<double>::infinity();
        for (int gs : {1, -1}) {
            for (int os : {1, -1}) {
                const MasterEquationConvention c{gs, os};
                double worst = 0.0;
                for (const auto& a : refs)
                    worst = std::max(worst, master_equation_residual(a, propagate(a, s0), c).max());
                if (worst < best_residual) {
                    best_residual = worst;
                    best = c;
                }
            }
        }
        if (best_residual > 1e-4)
            throw std::logic_error("no sign convention makes the master equation consistent");
        return best;
    }();
    return convention;
}

std::optional<double> Timescales::gamma_fit() const {
    if (fit_quality > kFitQualityThreshold && std::isfinite(gamma_fit_raw)) return gamma_fit_raw;
    return std::nullopt;
}

std::optional<double> first_crossing(const TimeGrid& grid, const std::vector<double>& s, double level) {
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (s[j] > level) continue;
        if (j == 0) return 0.0;
        const double frac = (s[j - 1] - level) / (s[j - 1] - s[j]);
        return grid.at(j - 1) + frac * grid.step();
    }
    return std::nullopt;
}

Timescales extract_timescales(const Trajectory& tr) {
    const std::size_t n = tr.states.size();
    const double ee0 = tr.rho_ee.front();
    const double eg0 = tr.abs_rho_eg.front();
    const double inv_e = std::exp(-1.0);

    Timescales ts;
    std::vector<double> pop, coh;
    if (ee0 > 0.0) {
        pop.resize(n);
        for (std::size_t j = 0; j < n; ++j) pop[j] = tr.rho_ee[j] / ee0;
        ts.t1 = first_crossing(tr.grid, pop, inv_e);
    }
    if (eg0 > 0.0) {
        coh.resize(n);
        for (std::size_t j = 0; j < n; ++j) coh[j] = tr.abs_rho_eg[j] / eg0;
        ts.t2 = first_crossing(tr.grid, coh, inv_e);
    }
    if (!ts.t1 && !ts.t2) throw NumericalError("insufficient decay in window");

    // |u| from whichever channel is populated
    std::vector<double> amp = coh;
    if (amp.empty()) {
        amp.resize(n);
        for (std::size_t j = 0; j < n; ++j) amp[j] = std::sqrt(std::max(pop[j], 0.0));
    }
    std::size_t begin = 0, end = n;
    for (std::size_t j = 0; j < n; ++j)
        if (amp[j] <= std::exp(-0.25)) {
            begin = j;
            break;
        }
    for (std::size_t j = begin; j < n; ++j)
        if (amp[j] <= std::exp(-4.0)) {
            end = j;
            break;
        }

    ts.gamma_fit_raw = std::numeric_limits<double>::quiet_NaN();
    if (end >= begin + 3) {
        double st = 0, sy = 0, stt = 0, sty = 0;
        const double m = static_cast<double>(end - begin);
        for (std::size_t j = begin; j < end; ++j) {
            const double t = tr.grid.at(j), y = std::log(amp[j]);
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        const double slope = (m * sty - st * sy) / (m * stt - st * st);
        const double icpt = (sy - slope * st) / m;
        double ss_res = 0, ss_tot = 0;
        for (std::size_t j = begin; j < end; ++j) {
            const double y = std::log(amp[j]);
            ss_res += std::pow(y - (icpt + slope * tr.grid.at(j)), 2);
            ss_tot += std::pow(y - sy / m, 2);
        }
        ts.gamma_fit_raw = -slope;
        ts.fit_quality = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
    }
    return ts;
}

}  // namespace twolevel
