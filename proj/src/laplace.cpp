// Pole expansion of u(t) = L^{-1}[ 1 / (z + i omega0 + mu~(z)) ] for
// mu~(z) = sum_k w_k / (z + a_k).
//
// Multiplying through by Q(z) = prod_k (z + a_k):
//     u~(z) = Q(z) / P(z),   P(z) = (z + i omega0) Q(z) + sum_k w_k prod_{j != k} (z + a_j).
// deg P = deg Q + 1, so u(t) is the sum of residues of e^{zt} Q/P.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "twolevel/volterra.hpp"

namespace twolevel {

namespace {

using Poly = std::vector<cplx>;  // ascending coefficients

Poly multiply_linear(const Poly& p, cplx a) {  // p(z) * (z + a)
    Poly out(p.size() + 1, cplx{});
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] += a * p[i];
        out[i + 1] += p[i];
    }
    return out;
}

cplx evaluate(const Poly& p, cplx z) {
    cplx acc{};
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Poly derivative(const Poly& p) {
    if (p.size() <= 1) return {cplx{}};
    Poly d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
    return d;
}

// p(z) / (z - r), remainder dropped
Poly deflate(const Poly& p, cplx r) {
    const std::size_t n = p.size() - 1;
    Poly q(n);
    cplx carry = p[n];
    for (std::size_t i = n; i-- > 0;) {
        q[i] = carry;
        carry = p[i] + carry * r;
    }
    return q;
}

// Taylor coefficients of p about z0, first `count` of them.
Poly taylor_shift(Poly p, cplx z0, std::size_t count) {
    Poly coeffs;
    for (std::size_t k = 0; k < count; ++k) {
        if (p.empty()) {
            coeffs.push_back(cplx{});
            continue;
        }
        coeffs.push_back(evaluate(p, z0));
        p = deflate(p, z0);
    }
    return coeffs;
}

std::vector<cplx> polynomial_roots(const Poly& p) {
    const std::size_t n = p.size() - 1;
    if (n == 0) return {};
    if (n == 1) return {-p[0] / p[1]};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i < n; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -p[i] / p[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solve failed");
    std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

    // Newton polish against the original coefficients
    const Poly dp = derivative(p);
    for (auto& r : roots) {
        for (int it = 0; it < 8; ++it) {
            const cplx d = evaluate(dp, r);
            if (std::abs(d) == 0.0) break;
            const cplx step = evaluate(p, r) / d;
            // near a multiple root the step is rounding noise over a tiny derivative
            if (std::abs(evaluate(p, r - step)) >= std::abs(evaluate(p, r))) break;
            r -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(r))) break;
        }
    }
    return roots;
}

struct PoleCluster {
    cplx z;
    std::size_t multiplicity;
};

std::vector<PoleCluster> cluster_roots(std::vector<cplx> roots, double scale) {
    const double tol = 1e-6 * scale;
    std::vector<PoleCluster> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        cplx sum = roots[i];
        std::size_t count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) < tol) {
                used[j] = true;
                sum += roots[j];
                ++count;
            }
        }
        out.push_back({sum / static_cast<double>(count), count});
    }
    return out;
}

// e^{z0 t} sum_k c_k t^k contribution of one pole
struct PoleTerm {
    cplx z;
    std::vector<cplx> poly_in_t;
};

PoleTerm residue_term(const Poly& numer, const Poly& denom, const PoleCluster& pole) {
    const std::size_t m = pole.multiplicity;
    if (m == 1) return {pole.z, {evaluate(numer, pole.z) / evaluate(derivative(denom), pole.z)}};

    Poly rest = denom;
    for (std::size_t k = 0; k < m; ++k) rest = deflate(rest, pole.z);
    const Poly q = taylor_shift(numer, pole.z, m);
    const Poly r = taylor_shift(rest, pole.z, m);
    // Taylor coefficients of f = numer / rest about the pole
    Poly f(m);
    for (std::size_t k = 0; k < m; ++k) {
        cplx acc = q[k];
        for (std::size_t i = 1; i <= k; ++i) acc -= r[i] * f[k - i];
        f[k] = acc / r[0];
    }
    // residue of e^{zt} f(z) / (z - z0)^m = e^{z0 t} sum_k f_k t^{m-1-k} / (m-1-k)!
    std::vector<cplx> coeffs(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t power = m - 1 - k;
        coeffs[power] = f[k] / std::tgamma(static_cast<double>(power) + 1.0);
    }
    return {pole.z, coeffs};
}

}  // namespace

Amplitude solve_u_laplace(const MemoryKernel& kernel, const TwoLevelParams& params, const TimeGrid& grid) {
    const std::vector<KernelPole> poles = kernel.laplace_poles();

    Poly q{cplx(1.0, 0.0)};
    for (const auto& p : poles) q = multiply_linear(q, p.shift);

    Poly denom = multiply_linear(q, cplx(0.0, params.omega0));
    for (std::size_t k = 0; k < poles.size(); ++k) {
        Poly term{poles[k].weight};
        for (std::size_t j = 0; j < poles.size(); ++j)
            if (j != k) term = multiply_linear(term, poles[j].shift);
        for (std::size_t i = 0; i < term.size(); ++i) denom[i] += term[i];
    }

    double scale = params.omega0;
    for (const auto& p : poles) scale = std::max({scale, std::abs(p.shift), std::sqrt(std::abs(p.weight))});

    std::vector<PoleTerm> terms;
    for (const auto& cluster : cluster_roots(polynomial_roots(denom), scale))
        terms.push_back(residue_term(q, denom, cluster));

    std::vector<cplx> u(grid.size()), du(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        cplx val{}, dval{};
        for (const auto& term : terms) {
            // p(t) and p'(t) by Horner
            cplx p{}, dp{};
            for (std::size_t k = term.poly_in_t.size(); k-- > 0;) {
                dp = dp * t + p;
                p = p * t + term.poly_in_t[k];
            }
            const cplx e = std::exp(term.z * t);
            val += e * p;
            dval += e * (term.z * p + dp);
        }
        u[j] = val;
        du[j] = dval;
    }
    if (std::abs(u[0] - 1.0) > 1e-9) throw NumericalError("pole expansion inaccurate: u(0) != 1");
    u[0] = 1.0;
    return Amplitude(grid, std::move(u), std::move(du));
}

}  // namespace twolevel
