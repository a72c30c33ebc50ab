#include "support/oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracles {

cplx lorentzian_fourier_quadrature(double center, double width, double weight, double s) {
    const double a = 1000.0 * width;
    const double pi = std::numbers::pi;
    auto f = [&](double x) { return width / (x * x + width * width); };

    // Simpson on x = w - center in [-a, a]
    const long n = 2'000'000;
    const double h = 2.0 * a / static_cast<double>(n);
    cplx acc = 0.0;
    for (long j = 0; j <= n; ++j) {
        const double x = -a + static_cast<double>(j) * h;
        const double wgt = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        acc += wgt * f(x) * std::polar(1.0, -x * s);
    }
    acc *= h / 3.0;

    // both tails, 2 int_a^inf f(x) cos(x s) dx
    double tail;
    if (s == 0.0) {
        tail = 2.0 * std::atan(width / a);
    } else {
        const double f0 = f(a);
        const double f1 = -2.0 * a * width / std::pow(a * a + width * width, 2);
        const double f2 = width * (6.0 * a * a - 2.0 * width * width) / std::pow(a * a + width * width, 3);
        const double as = std::abs(s) * a;
        tail = 2.0 * (-std::sin(as) * f0 / std::abs(s) - std::cos(as) * f1 / (s * s) + std::sin(as) * f2 / std::pow(std::abs(s), 3));
    }
    return (weight / pi) * std::polar(1.0, -center * s) * (acc + tail);
}

cplx flat_band_kernel(double w_min, double w_max, double density, double g, double s) {
    const double c = density * g * g;
    if (s == 0.0) return c * (w_max - w_min);
    return c * (std::polar(1.0, -w_min * s) - std::polar(1.0, -w_max * s)) / cplx(0.0, s);
}

cplx ohmic_kernel(double n, double scale, double wc, double s) {
    return scale * wc * wc * std::tgamma(n + 1.0) * std::pow(cplx(1.0, wc * s), -(n + 1.0));
}

cplx single_mode_u(double w0, double w, double g, double t) {
    const double delta = 0.5 * (w0 - w);
    const double r = std::sqrt(delta * delta + g * g);
    return std::polar(1.0, -0.5 * (w0 + w) * t) * cplx(std::cos(r * t), -delta / r * std::sin(r * t));
}

cplx pseudomode_u(double w0, double center, double width, double weight, double t) {
    const cplx i(0.0, 1.0);
    const cplx sigma = 0.5 * (w0 + center - i * width);
    const cplx delta = 0.5 * (w0 - center + i * width);
    const cplx d = std::sqrt(delta * delta + weight);
    return std::exp(-i * sigma * t) * (std::cos(d * t) - i * delta / d * std::sin(d * t));
}

}  // namespace oracles
