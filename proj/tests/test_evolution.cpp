#include <doctest.h>

#include <cmath>

#include "twolevel/evolution.hpp"

using namespace twolevel;

namespace {

Amplitude resonant_mode(double g, const TimeGrid& grid) {
    return solve_u(kernel_from_modes(ModeSet({{1.0, g}})), TwoLevelParams(1.0), grid);
}

}  // namespace

TEST_CASE("ground state is stationary") {
    const TimeGrid grid(10.0, 2000);
    const auto tr = propagate(resonant_mode(0.3, grid), TwoLevelState::ground());
    for (const auto& s : tr.states) {
        CHECK(s.x == 1.0);
        CHECK(s.y == cplx(0.0));
    }
}

TEST_CASE("vacuum Rabi populations and the exact map") {
    const double g = 0.2;
    const TimeGrid grid(20.0, 20000);
    const auto a = resonant_mode(g, grid);
    const TwoLevelState s0{0.4, cplx(0.3, -0.2)};
    const auto tr = propagate(a, s0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double u = std::abs(a.u()[j]);
        // decoherence and relaxation are locked to the same |u|
        CHECK(tr.rho_ee[j] == doctest::Approx(u * u * 0.6).epsilon(1e-14));
        CHECK(tr.abs_rho_eg[j] == doctest::Approx(u * std::abs(s0.y)).epsilon(1e-14));
        CHECK(tr.states[j].x + tr.rho_ee[j] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(tr.states[j].determinant() >= -1e-10);
    }
    const auto excited = propagate(a, TwoLevelState::excited());
    CHECK(excited.emission.front() == 0.0);
    for (std::size_t j = 0; j < grid.size(); j += 100)
        CHECK(excited.rho_ee[j] == doctest::Approx(std::pow(std::cos(g * grid.at(j)), 2)).epsilon(1e-5).scale(1.0));
}

TEST_CASE("emission probability") {
    const double g = 0.2;
    const double t_quarter = M_PI / (2.0 * g);
    const TimeGrid grid(t_quarter, 10000);
    const auto p = emission_probability(resonant_mode(g, grid));
    CHECK(p.front() == doctest::Approx(0.0));
    CHECK(p.back() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sign convention is calibrated once and fixed") {
    const auto& c = calibrated_convention();
    CHECK(c.gamma_sign == 1);
    CHECK(c.omega_sign == -1);
    CHECK(&c == &calibrated_convention());
    CHECK(c.describe().find("-Omega") != std::string::npos);
}

TEST_CASE("master equation residual") {
    SUBCASE("free atom is pure unitary") {
        const TimeGrid grid(0.1, 10000);
        const auto a = solve_u(MemoryKernel::zero(), TwoLevelParams(1.0), grid);
        const auto r = master_equation_residual(a, propagate(a, {0.3, cplx(0.2, 0.3)}));
        CHECK(r.t.size() == grid.size());
        CHECK(r.max() <= 1e-10);
    }
    SUBCASE("lorentzian residual shrinks as h^2") {
        const MemoryKernel k(MemoryKernel::LorentzianForm{1.2, 0.5, 0.09});
        auto res = [&](std::size_t n) {
            const TimeGrid grid(10.0, n);
            const auto a = solve_u(k, TwoLevelParams(1.0), grid);
            return master_equation_residual(a, propagate(a, TwoLevelState::excited())).max();
        };
        const double r1 = res(1000), r2 = res(2000);
        CHECK(std::log2(r1 / r2) >= 1.8);
    }
    SUBCASE("wrong sign is inconsistent") {
        const TimeGrid grid(10.0, 4000);
        const auto a = resonant_mode(0.2, grid);
        const auto tr = propagate(a, {0.3, cplx(0.3, 0.1)});
        const auto good = master_equation_residual(a, tr);
        const auto bad = master_equation_residual(a, tr, {1, 1});
        CHECK(bad.max() > 1e3 * good.max());
    }
    SUBCASE("fully masked region yields an empty series") {
        const TimeGrid grid(1.0, 100);
        std::vector<cplx> zero(grid.size(), 0.0);
        zero[0] = 1e-12;
        const Amplitude a(grid, zero, zero);
        CHECK(master_equation_residual(a, propagate(a, TwoLevelState::excited())).t.empty());
    }
}

TEST_CASE("flat band is Markovian: constant-rate Lindblad form fits") {
    const double rate = M_PI * 0.01;
    const TimeGrid grid(100.0, 4000);
    const auto k = kernel_from_spectral_density(SpectralDensity(FlatBand{5.0, 15.0, 0.01, 1.0}), grid);
    const auto a = solve_u(k, TwoLevelParams(10.0), grid);
    const auto tr = propagate(a, TwoLevelState::excited());
    // amplitude rate Gamma = -pi J, no shift for a band centered on omega0
    const auto r = master_equation_residual_constant(tr, -rate, -10.0);
    double late = 0.0;
    for (std::size_t j = 0; j < r.t.size(); ++j)
        if (r.t[j] > 20.0) late = std::max(late, r.residual[j]);
    CHECK(late < 1e-2 * rate);
}

TEST_CASE("timescales") {
    SUBCASE("exact exponential") {
        const double g0 = 0.05;
        const TimeGrid grid(200.0, 20000);
        std::vector<cplx> u(grid.size()), du(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            u[j] = std::exp(cplx(-g0, -1.0) * grid.at(j));
            du[j] = cplx(-g0, -1.0) * u[j];
        }
        const auto ts = extract_timescales(propagate(Amplitude(grid, u, du), {0.5, 0.5}));
        REQUIRE(ts.t1);
        REQUIRE(ts.t2);
        CHECK(*ts.t1 == doctest::Approx(1.0 / (2.0 * g0)).epsilon(1e-6));
        CHECK(*ts.t2 == doctest::Approx(1.0 / g0).epsilon(1e-6));
        CHECK(*ts.t1 / *ts.t2 == doctest::Approx(0.5).epsilon(1e-6));
        REQUIRE(ts.gamma_fit());
        CHECK(*ts.gamma_fit() == doctest::Approx(g0).epsilon(1e-9));
        CHECK(ts.fit_quality == doctest::Approx(1.0));
    }
    SUBCASE("no decay") {
        const TimeGrid grid(10.0, 1000);
        const auto a = solve_u(MemoryKernel::zero(), TwoLevelParams(1.0), grid);
        CHECK_THROWS_WITH_AS(extract_timescales(propagate(a, TwoLevelState::excited())),
                             "insufficient decay in window", NumericalError);
    }
    SUBCASE("oscillation is not reported as an exponential rate") {
        const TimeGrid grid(20.0, 20000);
        const auto ts = extract_timescales(propagate(resonant_mode(0.2, grid), TwoLevelState::excited()));
        CHECK(ts.t1);
        CHECK(ts.fit_quality >= 0.0);
        CHECK(ts.fit_quality <= 1.0);
        CHECK_FALSE(ts.gamma_fit());
    }
}

TEST_CASE("first crossing interpolates") {
    const TimeGrid grid(1.0, 2);
    CHECK(*first_crossing(grid, {1.0, 0.6, 0.2}, 0.4) == doctest::Approx(0.75));
    CHECK_FALSE(first_crossing(grid, {1.0, 0.9, 0.8}, 0.4));
}
