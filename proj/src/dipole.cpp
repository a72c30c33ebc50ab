#include "twolevel/dipole.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace twolevel {

AtomGeometry::AtomGeometry(Eigen::Vector3d q1_, Eigen::Vector3d q2_, double d12_, double m_, double charge_,
                           double eps0_, double volume_)
    : q1(std::move(q1_)), q2(std::move(q2_)), d12(d12_), m(m_), charge(charge_), eps0(eps0_), volume(volume_) {
    if (!q1.allFinite() || !q2.allFinite()) throw std::invalid_argument("q1, q2 must be finite");
    if (!(std::isfinite(d12) && d12 >= 0.0)) throw std::invalid_argument("d12 must be non-negative");
    if (!(std::isfinite(m) && m > 0.0)) throw std::invalid_argument("m must be positive");
    if (!(std::isfinite(eps0) && eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
    if (!(std::isfinite(volume) && volume > 0.0)) throw std::invalid_argument("volume must be positive");
}

double mode_prefactor(const AtomGeometry& geom, double omega_k) {
    if (!(omega_k > 0.0)) throw std::invalid_argument("omega_k must be positive");
    return -(geom.charge / geom.m) / std::sqrt(2.0 * omega_k * geom.eps0 * geom.volume);
}

ZCouplings z_couplings(const AtomGeometry& geom, const Eigen::Vector3d& k_vec, double omega_k) {
    const double c = mode_prefactor(geom, omega_k);
    const double g11 = c * k_vec.dot(geom.q1);
    const double g22 = c * k_vec.dot(geom.q2);
    return {g11 - g22, g11 + g22};
}

CouplingRatio coupling_ratio_bound(const AtomGeometry& geom, const Eigen::Vector3d& k_vec, double omega_k) {
    if (geom.d12 == 0.0) throw std::invalid_argument("degenerate dipole");
    if (!(omega_k > 0.0)) throw std::invalid_argument("omega_k must be positive");
    const Eigen::Vector3d dq = geom.q1 - geom.q2;
    const double denom = geom.m * omega_k * geom.d12;
    return {std::abs(k_vec.dot(dq)) / denom, dq.norm() * k_vec.norm() / denom};
}

ModeSet sigma_z_mode_set(const AtomGeometry& geom, const ModeSet& modes, const Eigen::Vector3d& direction) {
    const double len = direction.norm();
    if (!(len > 0.0)) throw std::invalid_argument("direction must be nonzero");
    std::vector<Mode> out;
    out.reserve(modes.size());
    for (const auto& md : modes.modes()) {
        const Eigen::Vector3d k = (md.omega / len) * direction;
        out.push_back({md.omega, coupling_ratio_bound(geom, k, md.omega).ratio * std::abs(md.g)});
    }
    return ModeSet(std::move(out));
}

}  // namespace twolevel
