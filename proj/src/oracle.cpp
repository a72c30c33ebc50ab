#include "twolevel/oracle.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

namespace twolevel {

using Eigen::Index;

SingleExcitationSystem::SingleExcitationSystem(const TwoLevelParams& params, const ModeSet& modes) {
    const auto k = static_cast<Index>(modes.size());
    h_ = Eigen::MatrixXd::Zero(k + 1, k + 1);
    h_(0, 0) = params.omega0;
    for (Index j = 0; j < k; ++j) {
        const auto& m = modes.modes()[static_cast<std::size_t>(j)];
        h_(j + 1, j + 1) = m.omega;
        h_(0, j + 1) = m.g;
        h_(j + 1, 0) = m.g;
    }
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> diagonalize(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    return es;
}

}  // namespace

Amplitude single_excitation_evolve(const SingleExcitationSystem& sys, const TimeGrid& grid) {
    const auto es = diagonalize(sys.hamiltonian());
    const Eigen::VectorXd& energies = es.eigenvalues();
    const Eigen::VectorXd weights = es.eigenvectors().row(0).transpose().array().square();

    std::vector<cplx> u(grid.size()), du(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        cplx acc{}, dacc{};
        for (Index k = 0; k < energies.size(); ++k) {
            const cplx term = weights(k) * std::polar(1.0, -energies(k) * t);
            acc += term;
            dacc += cplx(0.0, -energies(k)) * term;
        }
        u[j] = acc;
        du[j] = dacc;
    }
    u[0] = 1.0;
    return Amplitude(grid, std::move(u), std::move(du));
}

Eigen::VectorXcd single_excitation_state(const SingleExcitationSystem& sys, double t) {
    const auto es = diagonalize(sys.hamiltonian());
    const Eigen::MatrixXd& v = es.eigenvectors();
    Eigen::VectorXcd coeff = v.row(0).transpose().cast<cplx>();
    for (Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::polar(1.0, -es.eigenvalues()(k) * t);
    return v.cast<cplx>() * coeff;
}

JCConfig::JCConfig(double g_, double omega0_, double omega_c_, std::variant<FockState, CoherentState> field_,
                   std::size_t fock_cutoff_)
    : g(g_), omega0(omega0_), omega_c(omega_c_), field(field_), fock_cutoff(fock_cutoff_) {
    if (!(std::isfinite(g) && g > 0.0)) throw std::invalid_argument("jc coupling g must be positive");
    if (!(std::isfinite(omega0) && omega0 > 0.0)) throw std::invalid_argument("jc omega0 must be positive");
    if (!(std::isfinite(omega_c) && omega_c > 0.0)) throw std::invalid_argument("jc omega_c must be positive");
    if (const auto* f = std::get_if<FockState>(&field)) {
        if (fock_cutoff < f->n + 1) throw std::invalid_argument("fock_cutoff must be at least n + 1");
    } else {
        const double nb = std::get<CoherentState>(field).n_bar;
        if (!(std::isfinite(nb) && nb >= 0.0)) throw std::invalid_argument("coherent n_bar must be non-negative");
        if (static_cast<double>(fock_cutoff) < nb + 8.0 * std::sqrt(nb))
            throw std::invalid_argument("fock_cutoff must be at least n_bar + 8 sqrt(n_bar)");
    }
}

JCResult jc_evolve(const JCConfig& c, const TimeGrid& grid) {
    // basis: |e,n> -> n, |g,n> -> N+1+n, n = 0..N
    const auto nmax = static_cast<Index>(c.fock_cutoff);
    const Index dim = 2 * (nmax + 1);
    auto e = [](Index n) { return n; };
    auto gr = [nmax](Index n) { return nmax + 1 + n; };

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Index n = 0; n <= nmax; ++n) {
        h(e(n), e(n)) = 0.5 * c.omega0 + c.omega_c * static_cast<double>(n);
        h(gr(n), gr(n)) = -0.5 * c.omega0 + c.omega_c * static_cast<double>(n);
        if (n < nmax) {
            // g S+ b |g,n+1> = g sqrt(n+1) |e,n>
            const double x = c.g * std::sqrt(static_cast<double>(n + 1));
            h(e(n), gr(n + 1)) = x;
            h(gr(n + 1), e(n)) = x;
        }
    }

    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(dim);
    if (const auto* f = std::get_if<FockState>(&c.field)) {
        psi0(e(static_cast<Index>(f->n))) = 1.0;
    } else {
        const double nb = std::get<CoherentState>(c.field).n_bar;
        for (Index n = 0; n <= nmax; ++n) {
            const double dn = static_cast<double>(n);
            const double log_p = nb > 0.0 ? -nb + dn * std::log(nb) - std::lgamma(dn + 1.0) : (n == 0 ? 0.0 : -INFINITY);
            psi0(e(n)) = std::exp(0.5 * log_p);
        }
        psi0.normalize();
    }

    const auto es = diagonalize(h);
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cplx>();
    const Eigen::VectorXcd coeff = v.adjoint() * psi0;

    JCResult r{grid, {}, {}, {}, {}};
    Eigen::VectorXcd phased(dim);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        for (Index k = 0; k < dim; ++k) phased(k) = coeff(k) * std::polar(1.0, -es.eigenvalues()(k) * t);
        const Eigen::VectorXcd psi = v * phased;
        double pe = 0.0, norm = 0.0, exc = 0.0;
        for (Index n = 0; n <= nmax; ++n) {
            const double pen = std::norm(psi(e(n))), pgn = std::norm(psi(gr(n)));
            pe += pen;
            norm += pen + pgn;
            exc += pen * static_cast<double>(n + 1) + pgn * static_cast<double>(n);
        }
        r.excited_population.push_back(pe);
        r.inversion.push_back(2.0 * pe - 1.0);
        r.norm.push_back(norm);
        r.excitation_number.push_back(exc);
    }
    return r;
}

double rabi_frequency(const JCResult& r) {
    const auto& w = r.inversion;
    std::vector<double> crossings;
    for (std::size_t j = 1; j < w.size(); ++j) {
        if ((w[j - 1] > 0.0) != (w[j] > 0.0)) {
            const double frac = w[j - 1] / (w[j - 1] - w[j]);
            crossings.push_back(r.grid.at(j - 1) + frac * r.grid.step());
        }
    }
    if (crossings.size() < 2) throw NumericalError("fewer than two inversion zero crossings");
    // consecutive crossings of cos(2 Omega t) are pi / (2 Omega) apart
    const double m = static_cast<double>(crossings.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < crossings.size(); ++k) {
        const double x = static_cast<double>(k);
        sx += x;
        sy += crossings[k];
        sxx += x * x;
        sxy += x * crossings[k];
    }
    const double spacing = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return std::numbers::pi / (2.0 * spacing);
}

CollapseRevival analyze_collapse_revival(const JCResult& r, double g, double n_bar) {
    CollapseRevival out;
    out.expected_revival = 2.0 * std::numbers::pi * std::sqrt(n_bar) / g;

    const auto& w = r.inversion;
    const std::size_t n = w.size();
    const auto half = static_cast<std::size_t>(std::lround(2.0 * std::numbers::pi / g / r.grid.step()));
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + w[j] * w[j];
    out.envelope.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = j > half ? j - half : 0;
        const std::size_t hi = std::min(n, j + half + 1);
        out.envelope[j] = std::sqrt((prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo));
    }

    double best = -1.0;
    out.revival_time = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < n; ++j) {
        const double t = r.grid.at(j);
        if (t < 0.5 * out.expected_revival || t > 1.5 * out.expected_revival) continue;
        if (out.envelope[j] > best) {
            best = out.envelope[j];
            out.revival_time = t;
        }
    }
    const double threshold = 0.1 * std::abs(w.front());
    for (std::size_t j = 0; j < n; ++j) {
        if (out.envelope[j] < threshold) {
            out.collapse_time = r.grid.at(j);
            break;
        }
    }
    return out;
}

namespace {

using SparseH = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseH branch_hamiltonian(const ModeSet& modes, std::size_t cutoff, double sign, double scale) {
    const std::size_t k = modes.size();
    const std::size_t levels = cutoff + 1;
    std::size_t dim = 1;
    for (std::size_t i = 0; i < k; ++i) dim *= levels;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(dim * (2 * k + 1));
    std::vector<std::size_t> stride(k, 1);
    for (std::size_t i = 1; i < k; ++i) stride[i] = stride[i - 1] * levels;

    for (std::size_t idx = 0; idx < dim; ++idx) {
        double diag = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t n = (idx / stride[i]) % levels;
            const auto& m = modes.modes()[i];
            diag += m.omega * static_cast<double>(n);
            if (n + 1 < levels) {
                const double x = sign * scale * m.g * std::sqrt(static_cast<double>(n + 1));
                const std::size_t up = idx + stride[i];
                entries.emplace_back(static_cast<int>(idx), static_cast<int>(up), x);
                entries.emplace_back(static_cast<int>(up), static_cast<int>(idx), x);
            }
        }
        entries.emplace_back(static_cast<int>(idx), static_cast<int>(idx), diag);
    }
    SparseH h(static_cast<Index>(dim), static_cast<Index>(dim));
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

// exp(-i H dt) psi by Chebyshev expansion on Gershgorin bounds of H.
class ChebyshevPropagator {
public:
    ChebyshevPropagator(const SparseH& h, double dt) : h_(h) {
        double lo = INFINITY, hi = -INFINITY;
        for (Index r = 0; r < h.outerSize(); ++r) {
            double center = 0.0, radius = 0.0;
            for (SparseH::InnerIterator it(h, r); it; ++it) {
                if (it.col() == r)
                    center = it.value();
                else
                    radius += std::abs(it.value());
            }
            lo = std::min(lo, center - radius);
            hi = std::max(hi, center + radius);
        }
        half_width_ = 0.5 * (hi - lo) * (1.0 + 1e-9) + 1e-12;
        mid_ = 0.5 * (hi + lo);
        const double x = half_width_ * dt;
        for (int k = 0;; ++k) {
            const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
            coeff_.push_back((k == 0 ? 1.0 : 2.0) * std::pow(cplx(0.0, -1.0), k) * jk);
            if (k > x + 10.0 && std::abs(jk) < 1e-17) break;
        }
        global_phase_ = std::polar(1.0, -mid_ * dt);
    }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const {
        auto scaled = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
            return (h_ * v - mid_ * v) / half_width_;
        };
        Eigen::VectorXcd prev = psi;
        Eigen::VectorXcd cur = scaled(psi);
        Eigen::VectorXcd out = coeff_[0] * prev + coeff_[1] * cur;
        for (std::size_t k = 2; k < coeff_.size(); ++k) {
            Eigen::VectorXcd next = 2.0 * scaled(cur) - prev;
            out += coeff_[k] * next;
            prev = std::move(cur);
            cur = std::move(next);
        }
        return global_phase_ * out;
    }

private:
    const SparseH& h_;
    double half_width_ = 1.0;
    double mid_ = 0.0;
    std::vector<cplx> coeff_;
    cplx global_phase_{1.0, 0.0};
};

}  // namespace

DephasingOracleResult dephasing_oracle(const ModeSet& modes, std::size_t fock_cutoff, const TimeGrid& grid,
                                       cplx initial_coherence, double z_coupling_scale) {
    if (modes.size() > 3) throw std::invalid_argument("oracle limited to small environments");
    if (fock_cutoff < 30) throw std::invalid_argument("dephasing oracle needs fock_cutoff >= 30");

    const SparseH h_plus = branch_hamiltonian(modes, fock_cutoff, +1.0, z_coupling_scale);
    const SparseH h_minus = branch_hamiltonian(modes, fock_cutoff, -1.0, z_coupling_scale);
    const ChebyshevPropagator step_plus(h_plus, grid.step());
    const ChebyshevPropagator step_minus(h_minus, grid.step());

    Eigen::VectorXcd plus = Eigen::VectorXcd::Zero(h_plus.rows());
    plus(0) = 1.0;
    Eigen::VectorXcd minus = plus;

    DephasingOracleResult r;
    r.abs_rho_eg.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (j > 0) {
            plus = step_plus.apply(plus);
            minus = step_minus.apply(minus);
        }
        const double np = plus.squaredNorm(), nm = minus.squaredNorm();
        r.max_norm_error = std::max({r.max_norm_error, std::abs(np - 1.0), std::abs(nm - 1.0)});
        // rho_ee(t) = rho_ee(0) <psi_+|psi_+>
        r.population_drift = std::max(r.population_drift, std::abs(np - 1.0));
        r.abs_rho_eg.push_back(std::abs(initial_coherence) * std::abs(minus.dot(plus)));
    }
    return r;
}

}  // namespace twolevel
