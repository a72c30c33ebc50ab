#include "twolevel/core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace twolevel {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

TwoLevelParams::TwoLevelParams(double omega0_) : omega0(omega0_) {
    require(finite(omega0) && omega0 > 0.0, "omega0 must be positive");
}

ModeSet::ModeSet(std::vector<Mode> modes) : modes_(std::move(modes)) {
    require(!modes_.empty(), "empty environment");
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        const auto& m = modes_[k];
        require(finite(m.omega) && finite(m.g), "mode " + std::to_string(k) + ": non-finite value");
        require(m.omega != 0.0, "mode " + std::to_string(k) + ": zero-frequency mode unsupported");
        require(m.omega > 0.0, "mode " + std::to_string(k) + ": frequency must be positive");
    }
}

ModeSet ModeSet::from_complex(std::span<const double> omegas, std::span<const cplx> couplings) {
    require(omegas.size() == couplings.size(), "frequency and coupling lists differ in length");
    std::vector<Mode> modes;
    modes.reserve(omegas.size());
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        require(couplings[k].imag() == 0.0,
                "mode " + std::to_string(k) + ": coupling must be real");
        modes.push_back({omegas[k], couplings[k].real()});
    }
    return ModeSet(std::move(modes));
}

double ModeSet::max_omega() const {
    double w = 0.0;
    for (const auto& m : modes_) w = std::max(w, m.omega);
    return w;
}

double ModeSet::coupling_norm_squared() const {
    double s = 0.0;
    for (const auto& m : modes_) s += m.g * m.g;
    return s;
}

SpectralDensity::SpectralDensity(Kind kind) : kind_(kind) {
    struct Check {
        void operator()(const Lorentzian& l) const {
            require(finite(l.center), "lorentzian center must be finite");
            require(finite(l.width) && l.width > 0.0, "lorentzian width must be positive");
            require(finite(l.weight) && l.weight >= 0.0, "lorentzian weight must be non-negative");
        }
        void operator()(const FlatBand& f) const {
            require(finite(f.omega_min) && f.omega_min >= 0.0, "flat band omega_min must be non-negative");
            require(finite(f.omega_max) && f.omega_min < f.omega_max,
                    "flat band requires omega_min < omega_max");
            require(finite(f.density) && f.density >= 0.0, "flat band density must be non-negative");
            require(finite(f.g), "flat band coupling must be finite");
        }
        void operator()(const OhmicFamily& o) const {
            require(finite(o.exponent), "ohmic exponent must be finite");
            require(finite(o.scale) && o.scale >= 0.0, "ohmic scale must be non-negative");
            require(finite(o.cutoff) && o.cutoff > 0.0, "ohmic cutoff must be positive");
        }
    };
    std::visit(Check{}, kind_);
}

double SpectralDensity::operator()(double omega) const {
    struct Eval {
        double w;
        double operator()(const Lorentzian& l) const {
            const double d = w - l.center;
            return l.weight / std::numbers::pi * l.width / (d * d + l.width * l.width);
        }
        double operator()(const FlatBand& f) const {
            return (w >= f.omega_min && w <= f.omega_max) ? f.density * f.g * f.g : 0.0;
        }
        double operator()(const OhmicFamily& o) const {
            if (w <= 0.0) return 0.0;
            return o.scale * std::pow(w, o.exponent) * std::pow(o.cutoff, 1.0 - o.exponent) *
                   std::exp(-w / o.cutoff);
        }
    };
    return std::visit(Eval{omega}, kind_);
}

std::pair<double, double> SpectralDensity::support() const {
    struct Support {
        std::pair<double, double> operator()(const Lorentzian& l) const {
            return {l.center - 40.0 * l.width, l.center + 40.0 * l.width};
        }
        std::pair<double, double> operator()(const FlatBand& f) const { return {f.omega_min, f.omega_max}; }
        std::pair<double, double> operator()(const OhmicFamily& o) const { return {0.0, 40.0 * o.cutoff}; }
    };
    return std::visit(Support{}, kind_);
}

TimeGrid::TimeGrid(double t_max, std::size_t n_steps) : t_max_(t_max), n_steps_(n_steps) {
    require(finite(t_max) && t_max > 0.0, "t_max must be positive");
    require(n_steps >= 2, "n_steps must be at least 2");
}

bool TimeGrid::operator==(const TimeGrid& other) const {
    return n_steps_ == other.n_steps_ &&
           std::abs(t_max_ - other.t_max_) <= 1e-12 * std::max(t_max_, other.t_max_);
}

double TwoLevelState::purity() const {
    const double ee = rho_ee();
    return ee * ee + x * x + 2.0 * std::norm(y);
}

Eigen::Matrix2cd TwoLevelState::matrix() const {
    Eigen::Matrix2cd m;
    m << cplx(1.0 - x, 0.0), y, std::conj(y), cplx(x, 0.0);
    return m;
}

bool validate_state(const TwoLevelState& s) {
    constexpr double tol = 1e-12;
    if (!std::isfinite(s.x) || !std::isfinite(s.y.real()) || !std::isfinite(s.y.imag())) return false;
    if (s.x < -tol || s.x > 1.0 + tol) return false;
    return s.determinant() >= -tol;
}

namespace spin {

Eigen::Matrix2cd sz() {
    Eigen::Matrix2cd m;
    m << 0.5, 0.0, 0.0, -0.5;
    return m;
}

Eigen::Matrix2cd splus() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 0.0, 0.0;
    return m;
}

Eigen::Matrix2cd sminus() {
    Eigen::Matrix2cd m;
    m << 0.0, 0.0, 1.0, 0.0;
    return m;
}

Eigen::Matrix2cd sigma_x() {
    Eigen::Matrix2cd m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Eigen::Matrix2cd sigma_y() {
    Eigen::Matrix2cd m;
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}

Eigen::Matrix2cd sigma_z() {
    Eigen::Matrix2cd m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

}  // namespace spin

}  // namespace twolevel
