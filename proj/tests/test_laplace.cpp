#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "twolevel/volterra.hpp"

using namespace twolevel;

TEST_CASE("lorentzian kernel: pole expansion matches the pseudomode formula") {
    const TimeGrid grid(30.0, 300);
    for (const auto& [c, w, g2] : {std::tuple{1.2, 0.5, 0.09}, std::tuple{1.0, 0.05, 0.3}, std::tuple{0.7, 2.0, 1.0}}) {
        const auto a = solve_u_laplace(MemoryKernel(MemoryKernel::LorentzianForm{c, w, g2}), TwoLevelParams(1.0), grid);
        for (std::size_t j = 0; j < grid.size(); ++j)
            CHECK(std::abs(a.u()[j] - oracles::pseudomode_u(1.0, c, w, g2, grid.at(j))) < 1e-12);
    }
}

TEST_CASE("mode kernels: pole expansion matches the Rabi formula") {
    const TimeGrid grid(50.0, 500);
    const auto a = solve_u_laplace(kernel_from_modes(ModeSet({{1.3, 0.25}})), TwoLevelParams(1.0), grid);
    for (std::size_t j = 0; j < grid.size(); ++j)
        CHECK(std::abs(a.u()[j] - oracles::single_mode_u(1.0, 1.3, 0.25, grid.at(j))) < 1e-12);
}

TEST_CASE("derivative is consistent with the amplitude") {
    const TimeGrid grid(10.0, 100000);
    const auto a = solve_u_laplace(MemoryKernel(MemoryKernel::LorentzianForm{1.2, 0.5, 0.09}), TwoLevelParams(1.0), grid);
    const double h = grid.step();
    for (std::size_t j = 1; j + 1 < grid.size(); j += 997) {
        const cplx fd = (a.u()[j + 1] - a.u()[j - 1]) / (2.0 * h);
        CHECK(std::abs(fd - a.du()[j]) < 1e-8);
    }
}

TEST_CASE("degenerate double pole") {
    // atom resonant with a Lorentzian of width 2g: critically damped
    const double g = 0.3;
    const TimeGrid grid(20.0, 200);
    const auto a = solve_u_laplace(MemoryKernel(MemoryKernel::LorentzianForm{1.0, 2.0 * g, g * g}), TwoLevelParams(1.0), grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        const cplx ref = std::polar(1.0, -t) * std::exp(-g * t) * (1.0 + g * t);
        CHECK(std::abs(a.u()[j] - ref) < 1e-9);
    }
}

TEST_CASE("sampled kernels are rejected") {
    const TimeGrid grid(2.0, 20);
    const auto k = kernel_from_spectral_density(SpectralDensity(FlatBand{1.0, 2.0, 0.1, 1.0}), grid);
    CHECK_THROWS_WITH_AS(solve_u_laplace(k, TwoLevelParams(1.0), grid), "unsupported kernel for Laplace path",
                         NumericalError);
}
