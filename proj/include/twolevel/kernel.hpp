// kernel.hpp: memory kernels mu(s) = sum_k g_k^2 exp(-i omega_k s) and their
// continuum / cavity counterparts.

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "twolevel/core.hpp"

namespace twolevel {

/// A simple pole term w / (z + a) of the Laplace-transformed kernel.
struct KernelPole {
    cplx weight;
    cplx shift;
};

class MemoryKernel {
public:
    struct Zero {};
    struct Modes {
        std::vector<Mode> modes;
    };
    /// g^2 exp(-width |s| - i center s)
    struct LorentzianForm {
        double center;
        double width;
        double weight;
    };
    /// Values mu(j h) for j = 0..n_steps on a specific grid.
    struct Sampled {
        TimeGrid grid;
        std::vector<cplx> values;
        std::string origin;
    };

    using Representation = std::variant<Zero, Modes, LorentzianForm, Sampled>;

    explicit MemoryKernel(Representation rep);

    static MemoryKernel zero() { return MemoryKernel(Zero{}); }

    const Representation& representation() const { return rep_; }
    bool is_closed() const { return !std::holds_alternative<Sampled>(rep_); }

    /// Closed forms only; valid for negative s as well.
    cplx operator()(double s) const;

    /// mu(t_j) on the grid. Closed forms are evaluated, sampled kernels must
    /// have been built on an identical grid.
    std::vector<cplx> samples(const TimeGrid& grid) const;

    /// mu(0); real and non-negative for kernels built from real couplings.
    cplx at_zero() const;

    /// Pole expansion of the Laplace transform, mu~(z) = sum w_j / (z + a_j).
    /// Empty for Zero. Throws NumericalError for kernels whose transform is
    /// not rational.
    std::vector<KernelPole> laplace_poles() const;

    std::string describe() const;

private:
    Representation rep_;
};

struct CavityConfig {
    double length;    // plate separation L; omega_n = n pi / L
    double x_atom;    // atom position, 0 < x_atom < L
    double lambda;    // coupling scale
    std::size_t n_modes;

    CavityConfig(double length, double x_atom, double lambda, std::size_t n_modes);
};

MemoryKernel kernel_from_modes(const ModeSet& modes);

/// Lorentzian densities yield the closed form; others are sampled on the
/// grid by adaptive Gauss-Kronrod quadrature of J(omega) exp(-i omega s).
MemoryKernel kernel_from_spectral_density(const SpectralDensity& density, const TimeGrid& grid);

/// Quadrature value of int J(omega) exp(-i omega s) d omega at one s (any sign).
cplx spectral_kernel_value(const SpectralDensity& density, double s);

/// 1D Dirichlet cavity: omega_n = n pi/L, g_n = |lambda sin(n pi x/L) / sqrt(omega_n L)|.
ModeSet cavity_mode_set(const CavityConfig& config);

/// K equally spaced midpoint modes on the density support (clipped to
/// omega > 0) with g_k^2 = J(omega_k) d omega.
ModeSet discretize(const SpectralDensity& density, std::size_t n_modes);

}  // namespace twolevel
