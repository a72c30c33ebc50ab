#include "twolevel/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace twolevel {

namespace {

constexpr double kQuadratureTolerance = 1e-9;
constexpr unsigned kQuadratureDepth = 15;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

MemoryKernel::MemoryKernel(Representation rep) : rep_(std::move(rep)) {
    if (const auto* s = std::get_if<Sampled>(&rep_)) {
        if (s->values.size() != s->grid.size())
            throw std::invalid_argument("sampled kernel length does not match its grid");
    }
    if (const auto* l = std::get_if<LorentzianForm>(&rep_)) {
        if (!(l->width > 0.0)) throw std::invalid_argument("lorentzian width must be positive");
    }
}

cplx MemoryKernel::operator()(double s) const {
    return std::visit(
        overloaded{
            [](const Zero&) { return cplx{}; },
            [s](const Modes& m) {
                cplx acc{};
                for (const auto& mode : m.modes)
                    acc += mode.g * mode.g * std::polar(1.0, -mode.omega * s);
                return acc;
            },
            [s](const LorentzianForm& l) {
                return l.weight * std::exp(cplx(-l.width * std::abs(s), -l.center * s));
            },
            [](const Sampled&) -> cplx {
                throw std::logic_error("sampled kernel has no closed-form evaluation");
            },
        },
        rep_);
}

std::vector<cplx> MemoryKernel::samples(const TimeGrid& grid) const {
    if (const auto* s = std::get_if<Sampled>(&rep_)) {
        if (!(s->grid == grid))
            throw NumericalError("sampled kernel grid does not match the solver grid");
        return s->values;
    }
    std::vector<cplx> out(grid.size());
    if (const auto* m = std::get_if<Modes>(&rep_)) {
        for (const auto& mode : m->modes) {
            const double w = mode.g * mode.g;
            for (std::size_t j = 0; j < out.size(); ++j)
                out[j] += w * std::polar(1.0, -mode.omega * grid.at(j));
        }
        return out;
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = (*this)(grid.at(j));
    return out;
}

cplx MemoryKernel::at_zero() const {
    if (const auto* s = std::get_if<Sampled>(&rep_)) return s->values.front();
    return (*this)(0.0);
}

std::vector<KernelPole> MemoryKernel::laplace_poles() const {
    return std::visit(
        overloaded{
            [](const Zero&) { return std::vector<KernelPole>{}; },
            [](const Modes& m) {
                // modes sharing a frequency collapse into one pole
                std::map<double, double> merged;
                for (const auto& mode : m.modes) merged[mode.omega] += mode.g * mode.g;
                std::vector<KernelPole> poles;
                for (const auto& [omega, w] : merged) {
                    if (w == 0.0) continue;
                    poles.push_back({cplx(w, 0.0), cplx(0.0, omega)});
                }
                return poles;
            },
            [](const LorentzianForm& l) {
                if (l.weight == 0.0) return std::vector<KernelPole>{};
                return std::vector<KernelPole>{{cplx(l.weight, 0.0), cplx(l.width, l.center)}};
            },
            [](const Sampled&) -> std::vector<KernelPole> {
                throw NumericalError("unsupported kernel for Laplace path");
            },
        },
        rep_);
}

std::string MemoryKernel::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Zero&) { os << "zero"; },
                   [&](const Modes& m) {
                       os << "modes[" << m.modes.size() << "]";
                       for (const auto& mode : m.modes) os << ";" << mode.omega << "," << mode.g;
                   },
                   [&](const LorentzianForm& l) {
                       os << "lorentzian;" << l.center << "," << l.width << "," << l.weight;
                   },
                   [&](const Sampled& s) {
                       os << "sampled;" << s.origin << ";" << s.grid.t_max() << "," << s.grid.n_steps();
                   },
               },
               rep_);
    return os.str();
}

CavityConfig::CavityConfig(double length_, double x_atom_, double lambda_, std::size_t n_modes_)
    : length(length_), x_atom(x_atom_), lambda(lambda_), n_modes(n_modes_) {
    if (!(std::isfinite(length) && length > 0.0)) throw std::invalid_argument("cavity L must be positive");
    if (!(x_atom > 0.0 && x_atom < length)) throw std::invalid_argument("cavity x_atom must lie in (0, L)");
    if (!std::isfinite(lambda)) throw std::invalid_argument("cavity lambda must be finite");
    if (n_modes < 1) throw std::invalid_argument("cavity n_modes must be at least 1");
}

MemoryKernel kernel_from_modes(const ModeSet& modes) {
    return MemoryKernel(MemoryKernel::Modes{{modes.modes().begin(), modes.modes().end()}});
}

cplx spectral_kernel_value(const SpectralDensity& density, double s) {
    if (const auto* o = std::get_if<OhmicFamily>(&density.kind())) {
        if (!(o->exponent > -1.0))
            throw std::invalid_argument("ohmic exponent must exceed -1 (non-integrable density)");
    }
    const auto [lo, hi] = density.support();
    const double span = hi - lo;
    // about one oscillation per panel, and a minimum split so that the
    // structure of J itself (ohmic peak, band edges) is resolved
    const auto n_panels = static_cast<std::size_t>(
        std::max(8.0, std::ceil(span * std::abs(s) / (2.0 * std::numbers::pi))));
    const double width = span / static_cast<double>(n_panels);

    auto integrand = [&](double w) { return density(w) * std::polar(1.0, -w * s); };
    cplx total{};
    for (std::size_t p = 0; p < n_panels; ++p) {
        const double a = lo + width * static_cast<double>(p);
        const double b = (p + 1 == n_panels) ? hi : a + width;
        total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            integrand, a, b, kQuadratureDepth, kQuadratureTolerance);
    }
    return total;
}

MemoryKernel kernel_from_spectral_density(const SpectralDensity& density, const TimeGrid& grid) {
    if (const auto* l = std::get_if<Lorentzian>(&density.kind()))
        return MemoryKernel(MemoryKernel::LorentzianForm{l->center, l->width, l->weight});

    std::vector<cplx> values(grid.size());
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = spectral_kernel_value(density, grid.at(j));

    std::ostringstream origin;
    origin.precision(17);
    std::visit(overloaded{
                   [&](const Lorentzian&) {},
                   [&](const FlatBand& f) {
                       origin << "flat_band," << f.omega_min << "," << f.omega_max << "," << f.density << ","
                              << f.g;
                   },
                   [&](const OhmicFamily& o) {
                       origin << "ohmic," << o.exponent << "," << o.scale << "," << o.cutoff;
                   },
               },
               density.kind());
    return MemoryKernel(MemoryKernel::Sampled{grid, std::move(values), origin.str()});
}

ModeSet cavity_mode_set(const CavityConfig& c) {
    std::vector<Mode> modes;
    modes.reserve(c.n_modes);
    for (std::size_t n = 1; n <= c.n_modes; ++n) {
        const double k = static_cast<double>(n) * std::numbers::pi / c.length;
        const double g = c.lambda * std::sin(k * c.x_atom) / std::sqrt(k * c.length);
        modes.push_back({k, std::abs(g)});
    }
    return ModeSet(std::move(modes));
}

ModeSet discretize(const SpectralDensity& density, std::size_t n_modes) {
    if (n_modes == 0) throw std::invalid_argument("discretization needs at least one mode");
    auto [lo, hi] = density.support();
    lo = std::max(lo, 0.0);
    if (!(hi > lo)) throw std::invalid_argument("spectral density has no support at positive frequency");
    const double dw = (hi - lo) / static_cast<double>(n_modes);
    std::vector<Mode> modes;
    modes.reserve(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double w = lo + (static_cast<double>(k) + 0.5) * dw;
        modes.push_back({w, std::sqrt(density(w) * dw)});
    }
    return ModeSet(std::move(modes));
}

}  // namespace twolevel
