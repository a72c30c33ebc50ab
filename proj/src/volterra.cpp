#include "twolevel/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twolevel {

Amplitude::Amplitude(TimeGrid grid, std::vector<cplx> u, std::vector<cplx> du)
    : grid_(grid), u_(std::move(u)), du_(std::move(du)) {
    if (u_.size() != grid_.size() || du_.size() != grid_.size())
        throw std::invalid_argument("amplitude series length does not match its grid");
}

Amplitude Amplitude::conjugate() const {
    std::vector<cplx> u(u_.size()), du(du_.size());
    std::transform(u_.begin(), u_.end(), u.begin(), [](cplx z) { return std::conj(z); });
    std::transform(du_.begin(), du_.end(), du.begin(), [](cplx z) { return std::conj(z); });
    return Amplitude(grid_, std::move(u), std::move(du));
}

namespace {

// sign = -1 solves for u, sign = +1 for the barred amplitude (conjugate kernel).
Amplitude solve_rotating_frame(const MemoryKernel& kernel, const TwoLevelParams& params,
                               const TimeGrid& grid, int sign) {
    const double h = grid.step();
    const std::size_t n_pts = grid.size();
    const cplx mu0 = kernel.at_zero();
    if (h * std::max(params.omega0, std::sqrt(std::abs(mu0))) > 0.5)
        throw NumericalError("grid under-resolves dynamics");

    std::vector<cplx> mu = kernel.samples(grid);
    if (sign > 0)
        for (auto& m : mu) m = std::conj(m);

    // Interaction-picture kernel K(t) = mu(t) exp(-sign i omega0 t); with
    // u = exp(sign i omega0 t) v the equation becomes dv/dt = -int K(t-s) v(s) ds.
    // Stored reversed and split into real/imaginary planes so the convolution
    // below is a contiguous dot product.
    const std::size_t n = n_pts - 1;
    std::vector<double> k_re_rev(n_pts), k_im_rev(n_pts);
    for (std::size_t j = 0; j < n_pts; ++j) {
        const cplx kj = mu[j] * std::polar(1.0, -sign * params.omega0 * grid.at(j));
        k_re_rev[n - j] = kj.real();
        k_im_rev[n - j] = kj.imag();
    }
    const cplx k0(k_re_rev[n], k_im_rev[n]);

    std::vector<double> v_re(n_pts, 0.0), v_im(n_pts, 0.0);
    std::vector<cplx> w(n_pts);  // w_n = int_0^{t_n} K(t_n - s) v(s) ds (trapezoid)
    v_re[0] = 1.0;
    const cplx diag = 1.0 + 0.25 * h * h * k0;

    for (std::size_t m = 1; m <= n; ++m) {
        // history part: h [ K_m v_0 / 2 + sum_{j=1}^{m-1} K_{m-j} v_j ]
        double acc_re = 0.0, acc_im = 0.0;
        const double* kr = k_re_rev.data() + (n - m);
        const double* ki = k_im_rev.data() + (n - m);
        for (std::size_t j = 1; j < m; ++j) {
            acc_re += kr[j] * v_re[j] - ki[j] * v_im[j];
            acc_im += kr[j] * v_im[j] + ki[j] * v_re[j];
        }
        const cplx km(kr[0], ki[0]);
        const cplx history = h * (0.5 * km * cplx(v_re[0], v_im[0]) + cplx(acc_re, acc_im));

        const cplx v_prev(v_re[m - 1], v_im[m - 1]);
        const cplx v_new = (v_prev - 0.5 * h * (w[m - 1] + history)) / diag;
        v_re[m] = v_new.real();
        v_im[m] = v_new.imag();
        w[m] = history + 0.5 * h * k0 * v_new;
    }

    std::vector<cplx> u(n_pts), du(n_pts);
    for (std::size_t j = 0; j < n_pts; ++j) {
        const cplx rot = std::polar(1.0, sign * params.omega0 * grid.at(j));
        u[j] = rot * cplx(v_re[j], v_im[j]);
        du[j] = cplx(0.0, sign * params.omega0) * u[j] - rot * w[j];
    }
    return Amplitude(grid, std::move(u), std::move(du));
}

}  // namespace

Amplitude solve_u(const MemoryKernel& kernel, const TwoLevelParams& params, const TimeGrid& grid) {
    return solve_rotating_frame(kernel, params, grid, -1);
}

Amplitude solve_u_conjugate(const MemoryKernel& kernel, const TwoLevelParams& params, const TimeGrid& grid) {
    return solve_rotating_frame(kernel, params, grid, +1);
}

RateFunctions rates_from_u(const Amplitude& a, double amplitude_floor) {
    const std::size_t n = a.grid().size();
    RateFunctions r{a.grid(), std::vector<double>(n), std::vector<double>(n), std::vector<std::uint8_t>(n, 0)};
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(a.u()[j]) < amplitude_floor) {
            r.gamma[j] = nan;
            r.omega[j] = nan;
            r.mask[j] = 1;
            continue;
        }
        const cplx q = a.du()[j] / a.u()[j];
        r.gamma[j] = q.real();
        r.omega[j] = q.imag();
    }
    return r;
}

}  // namespace twolevel
