#include <doctest.h>

#include <cmath>

#include "twolevel/dipole.hpp"

using namespace twolevel;
using Eigen::Vector3d;

TEST_CASE("symmetric levels and transverse wave vectors give no sigma_z coupling") {
    const Vector3d q(0.3, -0.1, 0.2);
    const AtomGeometry same(q, q, 1.0, 1.0);
    const Vector3d k(0.0, 0.0, 2.0);
    CHECK(z_couplings(same, k, 2.0).g1k == 0.0);
    CHECK(coupling_ratio_bound(same, k, 2.0).ratio == 0.0);

    const AtomGeometry split(Vector3d(1.0, 0.0, 0.0), Vector3d(-1.0, 0.0, 0.0), 1.0, 1.0);
    CHECK(z_couplings(split, Vector3d(0.0, 1.5, 0.0), 1.5).g1k == 0.0);
    CHECK(coupling_ratio_bound(split, Vector3d(0.0, 1.5, 0.0), 1.5).ratio == 0.0);
}

TEST_CASE("couplings by direct evaluation") {
    const Vector3d q1(0.2, 0.5, -0.3), q2(-0.1, 0.4, 0.6);
    const double m = 2.0, e = 0.7, eps0 = 1.3, vol = 5.0, w = 1.9;
    const AtomGeometry geom(q1, q2, 0.8, m, e, eps0, vol);
    const Vector3d k(w * 0.6, 0.0, w * 0.8);

    const double ck = -(e / m) * std::pow(2.0 * w * eps0 * vol, -0.5);
    const double k_q1 = k[0] * q1[0] + k[1] * q1[1] + k[2] * q1[2];
    const double k_q2 = k[0] * q2[0] + k[1] * q2[1] + k[2] * q2[2];
    const auto z = z_couplings(geom, k, w);
    CHECK(mode_prefactor(geom, w) == doctest::Approx(ck));
    CHECK(z.g1k == doctest::Approx(ck * k_q1 - ck * k_q2));
    CHECK(z.g2k == doctest::Approx(ck * k_q1 + ck * k_q2));

    const auto r = coupling_ratio_bound(geom, k, w);
    CHECK(r.ratio == doctest::Approx(std::abs(k_q1 - k_q2) / (m * w * 0.8)));
    const double dq = std::sqrt(0.09 + 0.01 + 0.81);
    CHECK(r.bound == doctest::Approx(dq * w / (m * w * 0.8)));
    CHECK(r.ratio <= r.bound * (1.0 + 1e-15));
}

TEST_CASE("scaling properties") {
    const Vector3d q1(0.2, 0.5, -0.3), q2(-0.1, 0.4, 0.6), k(0.3, 0.4, 1.2);
    const AtomGeometry geom(q1, q2, 0.8, 2.0);
    const double w = k.norm();
    const auto base = coupling_ratio_bound(geom, k, w);

    // linear in |k| at fixed omega
    CHECK(coupling_ratio_bound(geom, 3.0 * k, w).ratio == doctest::Approx(3.0 * base.ratio));

    // invariant under q -> lambda q, d12 -> lambda d12
    const AtomGeometry scaled(7.0 * q1, 7.0 * q2, 7.0 * 0.8, 2.0);
    CHECK(coupling_ratio_bound(scaled, k, w).ratio == doctest::Approx(base.ratio));
    CHECK(coupling_ratio_bound(scaled, k, w).bound == doctest::Approx(base.bound));
}

TEST_CASE("degenerate dipole") {
    const AtomGeometry geom(Vector3d(1, 0, 0), Vector3d(0, 0, 0), 0.0, 1.0);
    CHECK_THROWS_WITH_AS(coupling_ratio_bound(geom, Vector3d(1, 0, 0), 1.0), "degenerate dipole", std::invalid_argument);
    CHECK_THROWS_AS(AtomGeometry(Vector3d::Zero(), Vector3d::Zero(), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("hydrogen-like scale") {
    // natural units (eV, hbar = c = 1): a0 = 1 / (alpha m_e), e = sqrt(4 pi alpha)
    const double alpha = 1.0 / 137.035999;
    const double me = 0.51099895e6;
    const double a0 = 1.0 / (alpha * me);
    const double e = std::sqrt(4.0 * M_PI * alpha);
    const double w = 10.2;  // Lyman-alpha photon energy, eV
    // q_i ~ a0 (length), d12 ~ e a0
    const AtomGeometry geom(Vector3d(a0, 0, 0), Vector3d(0, 0, 0), e * a0, me, e);
    const auto r = coupling_ratio_bound(geom, Vector3d(w, 0, 0), w);
    // |k.(q1 - q2)| / (m w d12) = 1 / (m e)
    CHECK(r.ratio == doctest::Approx(1.0 / (me * e)).epsilon(1e-12));
    CHECK(r.ratio == doctest::Approx(6.4628e-6).epsilon(1e-4));
    CHECK(r.ratio < 1e-4);
}

TEST_CASE("sigma_z mode set is bounded by the ratio times g") {
    const AtomGeometry geom(Vector3d(0.3, 0, 0), Vector3d(-0.2, 0.1, 0), 0.5, 1.0);
    const ModeSet pm({{1.0, 0.1}, {2.0, 0.05}, {4.0, 0.02}});
    const Vector3d dir(1, 1, 0);
    const ModeSet z = sigma_z_mode_set(geom, pm, dir);
    for (std::size_t i = 0; i < pm.size(); ++i) {
        const auto& src = pm.modes()[i];
        const Vector3d k = src.omega * dir.normalized();
        CHECK(z.modes()[i].omega == src.omega);
        CHECK(z.modes()[i].g <= coupling_ratio_bound(geom, k, src.omega).bound * std::abs(src.g) * (1.0 + 1e-15));
    }
}
