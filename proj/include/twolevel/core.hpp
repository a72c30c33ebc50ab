// core.hpp: shared value types for the two-level atom / bosonic field model.
//
// Units: hbar = c = 1. Every frequency and rate is an angular frequency in
// the same (arbitrary) unit; times are in the reciprocal unit.
//
// Basis ordering for every 2x2 object in the library: index 0 is the
// excited level |e>, index 1 is the ground level |g>.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace twolevel {

using cplx = std::complex<double>;

/// Thrown when a solver precondition fails or a numerical quantity cannot be
/// extracted (under-resolved grid, no decay in window, ...). Invalid
/// construction arguments throw std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TwoLevelParams {
    double omega0;  // level splitting omega_21

    explicit TwoLevelParams(double omega0);
};

struct Mode {
    double omega;  // angular frequency, > 0
    double g;      // real coupling
};

/// Discrete field modes. Couplings are real (phase absorbed into the mode
/// functions); construction rejects empty sets and non-positive frequencies.
class ModeSet {
public:
    explicit ModeSet(std::vector<Mode> modes);

    /// Accepts complex couplings only if every imaginary part vanishes.
    static ModeSet from_complex(std::span<const double> omegas, std::span<const cplx> couplings);

    std::span<const Mode> modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    double max_omega() const;
    double coupling_norm_squared() const;  // sum g_k^2 == mu(0)

private:
    std::vector<Mode> modes_;
};

/// J(omega) = (weight/pi) * width / ((omega - center)^2 + width^2)
struct Lorentzian {
    double center;
    double width;
    double weight;  // g^2, integral of J over the real line
};

/// J(omega) = density * g^2 on [omega_min, omega_max], zero elsewhere.
struct FlatBand {
    double omega_min;
    double omega_max;
    double density;
    double g;
};

/// J(omega) = scale * omega^exponent * cutoff^(1 - exponent) * exp(-omega/cutoff), omega > 0.
/// exponent < 1 sub-ohmic, == 1 ohmic, > 1 super-ohmic.
struct OhmicFamily {
    double exponent;
    double scale;
    double cutoff;
};

class SpectralDensity {
public:
    using Kind = std::variant<Lorentzian, FlatBand, OhmicFamily>;

    explicit SpectralDensity(Kind kind);

    const Kind& kind() const { return kind_; }
    double operator()(double omega) const;

    /// Frequency interval carrying the density for quadrature; the Lorentzian
    /// and ohmic tails are cut at 40 widths / cutoffs.
    std::pair<double, double> support() const;

private:
    Kind kind_;
};

/// Uniform grid t_j = j*h, j = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double t_max, std::size_t n_steps);

    double t_max() const { return t_max_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t size() const { return n_steps_ + 1; }
    double step() const { return t_max_ / static_cast<double>(n_steps_); }
    double at(std::size_t j) const { return static_cast<double>(j) * step(); }

    bool operator==(const TimeGrid& other) const;

private:
    double t_max_;
    std::size_t n_steps_;
};

/// rho = [[1 - x, y], [conj(y), x]] in the (e, g) basis.
struct TwoLevelState {
    double x = 1.0;  // ground population
    cplx y{};        // excited-ground coherence rho_eg

    double rho_ee() const { return 1.0 - x; }
    double rho_gg() const { return x; }
    double determinant() const { return x * (1.0 - x) - std::norm(y); }
    double purity() const;
    Eigen::Matrix2cd matrix() const;

    static TwoLevelState excited() { return {0.0, {}}; }
    static TwoLevelState ground() { return {1.0, {}}; }
};

/// 0 <= x <= 1 and x(1-x) - |y|^2 >= 0, both within 1e-12.
bool validate_state(const TwoLevelState& s);

namespace spin {

Eigen::Matrix2cd sz();       // diag(1/2, -1/2)
Eigen::Matrix2cd splus();    // |e><g|
Eigen::Matrix2cd sminus();   // |g><e|
Eigen::Matrix2cd sigma_x();
Eigen::Matrix2cd sigma_y();
Eigen::Matrix2cd sigma_z();  // diag(1, -1)

}  // namespace spin

}  // namespace twolevel
