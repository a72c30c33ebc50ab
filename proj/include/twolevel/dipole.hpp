// dipole.hpp: sigma_z couplings produced by the first correction to the
// dipole approximation, and the size of that coupling relative to g_k.
//
// All inputs are in one consistent unit system chosen by the caller
// (hbar = c = 1 throughout; |k| = omega_k).

#pragma once

#include <Eigen/Dense>

#include "twolevel/core.hpp"

namespace twolevel {

struct AtomGeometry {
    Eigen::Vector3d q1;   // level-1 matrix element of (x p.e), reduced to a 3-vector
    Eigen::Vector3d q2;
    double d12;           // |dipole matrix element|
    double m;             // electron mass
    double charge = 1.0;  // e
    double eps0 = 1.0;
    double volume = 1.0;  // quantization volume V

    AtomGeometry(Eigen::Vector3d q1, Eigen::Vector3d q2, double d12, double m, double charge = 1.0,
                 double eps0 = 1.0, double volume = 1.0);
};

/// c_k = -(e/m) (2 omega_k eps0 V)^{-1/2}
double mode_prefactor(const AtomGeometry& geom, double omega_k);

struct ZCouplings {
    double g1k;  // g11k - g22k: couples to sigma_z
    double g2k;  // g11k + g22k: couples to the identity
};

/// g_iik = c_k (k . q_i).
ZCouplings z_couplings(const AtomGeometry& geom, const Eigen::Vector3d& k_vec, double omega_k);

struct CouplingRatio {
    double ratio;  // |k.(q1 - q2)| / (m omega_k d12)
    double bound;  // |q1 - q2| |k| / (m omega_k d12)
};

/// Throws std::invalid_argument("degenerate dipole") when d12 = 0.
CouplingRatio coupling_ratio_bound(const AtomGeometry& geom, const Eigen::Vector3d& k_vec, double omega_k);

/// sigma_z mode set: each input mode's g is replaced by |ratio| * g, with the
/// wave vector of mode j given by omega_j * direction.
ModeSet sigma_z_mode_set(const AtomGeometry& geom, const ModeSet& modes, const Eigen::Vector3d& direction);

}  // namespace twolevel
