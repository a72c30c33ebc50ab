#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "twolevel/dephasing.hpp"
#include "twolevel/oracle.hpp"

using namespace twolevel;

TEST_CASE("single-excitation system") {
    const ModeSet m({{0.8, 0.1}, {1.2, 0.2}});
    const SingleExcitationSystem sys(TwoLevelParams(1.0), m);
    CHECK(sys.dimension() == 3);
    const auto& h = sys.hamiltonian();
    CHECK(h(0, 0) == 1.0);
    CHECK(h(2, 2) == 1.2);
    CHECK(h(0, 1) == 0.1);
    CHECK(h(2, 0) == 0.2);
    CHECK((h - h.transpose()).norm() == 0.0);

    for (double t : {0.0, 3.0, 17.0}) CHECK(single_excitation_state(sys, t).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single mode and decoupled modes") {
    const TimeGrid grid(30.0, 300);
    const auto a = single_excitation_evolve(SingleExcitationSystem(TwoLevelParams(1.0), ModeSet({{1.0, 0.3}})), grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        CHECK(std::abs(a.u()[j] - std::polar(1.0, -t) * std::cos(0.3 * t)) < 1e-13);
    }
    const auto free = single_excitation_evolve(SingleExcitationSystem(TwoLevelParams(2.0), ModeSet({{1.0, 0.0}, {3.0, 0.0}})), grid);
    for (std::size_t j = 0; j < grid.size(); ++j) CHECK(std::abs(free.u()[j] - std::polar(1.0, -2.0 * grid.at(j))) < 1e-13);
}

TEST_CASE("jc config invariants") {
    CHECK_THROWS_AS(JCConfig(1.0, 1.0, 1.0, FockState{5}, 5), std::invalid_argument);
    CHECK_NOTHROW(JCConfig(1.0, 1.0, 1.0, FockState{5}, 6));
    CHECK_THROWS_AS(JCConfig(1.0, 1.0, 1.0, CoherentState{20.0}, 50), std::invalid_argument);
    CHECK_NOTHROW(JCConfig(1.0, 1.0, 1.0, CoherentState{20.0}, 56));
    CHECK_THROWS_AS(JCConfig(0.0, 1.0, 1.0, FockState{0}, 3), std::invalid_argument);
}

TEST_CASE("jc vacuum Rabi equals the single-excitation oracle") {
    const double g = 0.4;
    const TimeGrid grid(20.0, 400);
    const auto r = jc_evolve(JCConfig(g, 1.0, 1.0, FockState{0}, 3), grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double c = std::cos(g * grid.at(j));
        CHECK(r.excited_population[j] == doctest::Approx(c * c).epsilon(1e-12).scale(1.0));
        CHECK(r.inversion[j] == doctest::Approx(2.0 * c * c - 1.0).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("jc conserves norm and excitation number") {
    const TimeGrid grid(40.0, 800);
    const auto r = jc_evolve(JCConfig(1.0, 1.0, 1.1, CoherentState{9.0}, 40), grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(std::abs(r.norm[j] - 1.0) < 1e-12);
        CHECK(std::abs(r.excitation_number[j] - r.excitation_number.front()) < 1e-12);
    }
}

TEST_CASE("fock Rabi frequencies") {
    const double g = 0.5;
    for (std::size_t n : {0, 1, 3, 8}) {
        const auto r = jc_evolve(JCConfig(g, 1.0, 1.0, FockState{n}, n + 2), TimeGrid(40.0, 8000));
        CHECK(rabi_frequency(r) == doctest::Approx(g * std::sqrt(n + 1.0)).epsilon(1e-6));
    }
}

TEST_CASE("collapse and revival") {
    const double g = 1.0, nbar = 20.0;
    const auto r = jc_evolve(JCConfig(g, 1.0, 1.0, CoherentState{nbar}, 60), TimeGrid(60.0, 6000));
    const auto cr = analyze_collapse_revival(r, g, nbar);
    CHECK(cr.expected_revival == doctest::Approx(2.0 * M_PI * std::sqrt(nbar)));
    CHECK(std::abs(cr.revival_time / cr.expected_revival - 1.0) < 0.1);
    REQUIRE(cr.collapse_time);
    CHECK(*cr.collapse_time < 0.5 * cr.expected_revival);
    CHECK(cr.envelope.size() == r.inversion.size());
}

TEST_CASE("dephasing oracle") {
    const TimeGrid grid(20.0, 100);
    SUBCASE("weak single mode") {
        const ModeSet m({{1.0, 0.1}});
        const auto o = dephasing_oracle(m, 30, grid);
        const auto d = dephasing_coherence(m, grid);
        for (std::size_t j = 0; j < grid.size(); ++j) CHECK(std::abs(o.abs_rho_eg[j] - d.coherence[j]) < 1e-6);
        CHECK(o.max_norm_error < 1e-12);
    }
    SUBCASE("uncoupled mode keeps the initial coherence") {
        const auto o = dephasing_oracle(ModeSet({{1.0, 0.0}}), 30, grid, cplx(0.3, 0.4));
        for (double v : o.abs_rho_eg) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("two modes factorize") {
        const ModeSet a({{1.0, 0.2}}), b({{1.6, 0.15}}), ab({{1.0, 0.2}, {1.6, 0.15}});
        const auto oa = dephasing_oracle(a, 30, grid), ob = dephasing_oracle(b, 30, grid), oab = dephasing_oracle(ab, 30, grid);
        for (std::size_t j = 0; j < grid.size(); ++j)
            CHECK(oab.abs_rho_eg[j] == doctest::Approx(oa.abs_rho_eg[j] * ob.abs_rho_eg[j]).epsilon(1e-10));
    }
    SUBCASE("limits") {
        const ModeSet four({{1.0, 0.1}, {1.1, 0.1}, {1.2, 0.1}, {1.3, 0.1}});
        CHECK_THROWS_WITH_AS(dephasing_oracle(four, 30, grid), "oracle limited to small environments",
                             std::invalid_argument);
        CHECK_THROWS_AS(dephasing_oracle(ModeSet({{1.0, 0.1}}), 20, grid), std::invalid_argument);
    }
}
