// volterra.hpp: the survival amplitude u(t) of the excited level,
//
//     du/dt = -i omega0 u(t) - int_0^t mu(t - s) u(s) ds,    u(0) = 1,
//
// and the rates Gamma(t) + i Omega(t) = (du/dt) / u.

#pragma once

#include <cstdint>
#include <vector>

#include "twolevel/core.hpp"
#include "twolevel/kernel.hpp"

namespace twolevel {

/// u and du/dt on a grid. du/dt is taken from the equation's right-hand side,
/// never from differencing u.
class Amplitude {
public:
    Amplitude(TimeGrid grid, std::vector<cplx> u, std::vector<cplx> du);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<cplx>& u() const { return u_; }
    const std::vector<cplx>& du() const { return du_; }

    Amplitude conjugate() const;

private:
    TimeGrid grid_;
    std::vector<cplx> u_;
    std::vector<cplx> du_;
};

struct RateFunctions {
    TimeGrid grid;
    std::vector<double> gamma;   // Re(du/u); negative while |u| decays
    std::vector<double> omega;   // Im(du/u)
    std::vector<std::uint8_t> mask;  // 1 where |u| < floor and the rates are undefined (NaN)
};

inline constexpr double kDefaultAmplitudeFloor = 1e-8;

/// Trapezoidal product integration in the frame rotating at omega0 with the
/// endpoint term treated implicitly. Global error O(h^2), cost O(N^2).
/// Throws NumericalError("grid under-resolves dynamics") when
/// h * max(omega0, sqrt|mu(0)|) > 0.5.
Amplitude solve_u(const MemoryKernel& kernel, const TwoLevelParams& params, const TimeGrid& grid);

/// The conjugate equation du/dt = +i omega0 u - int mu*(t-s) u(s) ds; its
/// solution is the barred amplitude, equal to conj(u).
Amplitude solve_u_conjugate(const MemoryKernel& kernel, const TwoLevelParams& params, const TimeGrid& grid);

/// Exact pole/residue inversion of 1 / (z + i omega0 + mu~(z)) for kernels
/// with a rational transform. Throws NumericalError("unsupported kernel for
/// Laplace path") otherwise.
Amplitude solve_u_laplace(const MemoryKernel& kernel, const TwoLevelParams& params, const TimeGrid& grid);

RateFunctions rates_from_u(const Amplitude& amplitude, double amplitude_floor = kDefaultAmplitudeFloor);

}  // namespace twolevel
