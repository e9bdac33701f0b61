#include "emprobe/profile.hpp"

#include "emprobe/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emprobe {

Complex fourier_time_profile(const Pulse& g, double omega)
{
    if (g.is_zero()) return Complex{0.0, 0.0};
    auto integrand = [&](double t) { return g(t) * std::exp(-kI * (omega * t)); };
    // Split at the pulse centre so the peak sits on a panel edge.
    const double mid = std::clamp(g.centre, g.lo, g.hi);
    const Complex value = integrate_adaptive(integrand, g.lo, mid, 1e-16, 1e-13) +
                          integrate_adaptive(integrand, mid, g.hi, 1e-16, 1e-13);
    return kNorm1 * value;
}

BandwidthCheck verify_bandwidth_condition(const Pulse& g, double b, double delta, int samples)
{
    if (!(b > 1.0)) throw PreconditionError("bandwidth condition needs b > 1");
    if (!(delta > 0.0)) throw PreconditionError("bandwidth condition needs delta > 0");
    if (samples < 2) throw PreconditionError("bandwidth scan needs at least two samples");
    BandwidthCheck check;
    check.min_magnitude = std::numeric_limits<double>::infinity();
    // Open interval: samples sit at interior points b k / (samples + 1).
    for (int k = 1; k <= samples; ++k) {
        const double omega = b * k / (samples + 1.0);
        const double mag = std::abs(fourier_time_profile(g, omega));
        if (mag < check.min_magnitude) {
            check.min_magnitude = mag;
            check.worst_omega = omega;
        }
    }
    check.holds = check.min_magnitude >= delta;
    return check;
}

double RadialBump::value(double r) const
{
    if (r >= radius || amplitude == 0.0) return 0.0;
    const double w = 1.0 - (r * r) / (radius * radius);
    double v = amplitude * std::pow(w, window_power);
    if (sigma > 0.0) v *= std::exp(-r * r / (2.0 * sigma * sigma));
    return v;
}

double RadialBump::derivative(double r) const
{
    if (r >= radius || amplitude == 0.0) return 0.0;
    const double r2 = radius * radius;
    const double w = 1.0 - (r * r) / r2;
    const double gauss = sigma > 0.0 ? std::exp(-r * r / (2.0 * sigma * sigma)) : 1.0;
    const double dgauss = sigma > 0.0 ? -r / (sigma * sigma) : 0.0;
    const double wp = window_power > 0 ? window_power * std::pow(w, window_power - 1) * (-2.0 * r / r2) : 0.0;
    return amplitude * gauss * (wp + std::pow(w, window_power) * dgauss);
}

namespace {

const Rule1D& radial_rule()
{
    static const Rule1D rule = gauss_legendre(96, 0.0, 1.0);
    return rule;
}

Complex sinc(Complex z)
{
    if (std::abs(z) < 1e-4) {
        const Complex z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

// Sum of rule(r) over [0, radius], split into enough panels that each holds
// a bounded number of oscillations of frequency |k|.
template <typename T, typename F>
T radial_sum(double radius, double k_abs, F&& integrand)
{
    const Rule1D& rule = radial_rule();
    const int panels = std::max(1, static_cast<int>(std::ceil(k_abs * radius / 60.0)));
    const double h = 1.0 / panels;
    T acc{};
    for (int p = 0; p < panels; ++p)
        for (std::size_t i = 0; i < rule.size(); ++i)
            acc += (h * rule.weights[i]) * integrand(radius * h * (p + rule.nodes[i]));
    return acc;
}

}  // namespace

Complex RadialBump::spectrum3(Complex k_squared) const
{
    if (amplitude == 0.0) return Complex{0.0, 0.0};
    const Complex k = std::sqrt(k_squared);
    const Complex acc =
        radial_sum<Complex>(radius, std::abs(k.real()), [&](double r) { return value(r) * r * r * sinc(k * r); });
    return kNorm3 * 4.0 * kPi * radius * acc;
}

double RadialBump::spectrum2(double k) const
{
    if (amplitude == 0.0) return 0.0;
    const double acc =
        radial_sum<double>(radius, std::abs(k), [&](double r) { return value(r) * r * std::cyl_bessel_j(0.0, k * r); });
    return radius * acc;
}

double RadialBump::spectrum1(double xi) const
{
    if (amplitude == 0.0) return 0.0;
    const double acc = radial_sum<double>(radius, std::abs(xi), [&](double r) { return value(r) * std::cos(xi * r); });
    return kNorm1 * 2.0 * radius * acc;
}

double RadialBump::norm_squared(int dim) const
{
    const Rule1D& rule = radial_rule();
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double r = radius * rule.nodes[i];
        const double v = value(r);
        acc += rule.weights[i] * v * v * std::pow(r, dim - 1);
    }
    const double area = dim == 1 ? 2.0 : dim == 2 ? kTwoPi : 4.0 * kPi;
    return area * radius * acc;
}

}  // namespace emprobe
