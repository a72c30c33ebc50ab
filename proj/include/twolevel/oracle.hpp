// oracle.hpp: brute-force evolutions in truncated Hilbert spaces. These share
// no numerics with the Volterra solver and are used to certify it.

#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "twolevel/core.hpp"
#include "twolevel/volterra.hpp"

namespace twolevel {

/// One-excitation sector {|e,0>, |g,1_k>} of the rotating-wave Hamiltonian:
/// H[0,0] = omega0, H[k,k] = omega_k, H[0,k] = H[k,0] = g_k.
class SingleExcitationSystem {
public:
    SingleExcitationSystem(const TwoLevelParams& params, const ModeSet& modes);

    const Eigen::MatrixXd& hamiltonian() const { return h_; }
    std::size_t dimension() const { return static_cast<std::size_t>(h_.rows()); }

private:
    Eigen::MatrixXd h_;
};

/// Amplitude of |e,0> under exp(-iHt) by dense eigendecomposition.
Amplitude single_excitation_evolve(const SingleExcitationSystem& system, const TimeGrid& grid);

/// Full state vector at time t, starting from |e,0>.
Eigen::VectorXcd single_excitation_state(const SingleExcitationSystem& system, double t);

struct FockState {
    std::size_t n;
};
struct CoherentState {
    double n_bar;
};

struct JCConfig {
    double g;
    double omega0;
    double omega_c;
    std::variant<FockState, CoherentState> field;
    std::size_t fock_cutoff;

    JCConfig(double g, double omega0, double omega_c, std::variant<FockState, CoherentState> field,
             std::size_t fock_cutoff);
};

struct JCResult {
    TimeGrid grid;
    std::vector<double> excited_population;  // P_e(t)
    std::vector<double> inversion;           // W(t) = 2 P_e - 1
    std::vector<double> norm;
    std::vector<double> excitation_number;   // <b^dag b + S+S->
};

/// Single-mode Jaynes-Cummings evolution, atom initially excited, exact in
/// the truncated Fock x atom space.
JCResult jc_evolve(const JCConfig& config, const TimeGrid& grid);

/// Omega_R such that W(t) = cos(2 Omega_R t), from the inversion's zero crossings.
double rabi_frequency(const JCResult& result);

struct CollapseRevival {
    double expected_revival;  // 2 pi sqrt(n_bar) / g
    double revival_time;      // argmax of the envelope in [0.5, 1.5] x expected
    std::optional<double> collapse_time;  // envelope first below 10% of |W(0)|
    std::vector<double> envelope;         // moving RMS of W, width 4 pi / g
};

CollapseRevival analyze_collapse_revival(const JCResult& result, double g, double n_bar);

struct DephasingOracleResult {
    std::vector<double> abs_rho_eg;
    double max_norm_error = 0.0;      // max |<psi_+-|psi_+-> - 1|
    double population_drift = 0.0;
};

/// |rho_eg(t)| for the sigma_z model from the two branches H_+- =
/// sum omega_k n_k +- c sum g_k (b_k + b_k^dag), each propagated from the
/// vacuum on a truncated joint oscillator space (Chebyshev expansion of the
/// propagator). K <= 3 modes, cutoff >= 30.
DephasingOracleResult dephasing_oracle(const ModeSet& modes, std::size_t fock_cutoff, const TimeGrid& grid,
                                       cplx initial_coherence = 1.0, double z_coupling_scale = 1.0);

}  // namespace twolevel
