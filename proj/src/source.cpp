#include "emprobe/source.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace emprobe {

std::string to_string(SourceKind kind)
{
    switch (kind) {
    case SourceKind::IP1_separable: return "IP1_separable";
    case SourceKind::IP2_general: return "IP2_general";
    case SourceKind::IP3_x3_separable: return "IP3_x3_separable";
    }
    return "?";
}

namespace {

Vec3 bump_field(const CurlBumpTerm& term, const Vec3& y)
{
    const Vec3 rel = y - term.centre;
    const double r = rel.norm();
    if (r >= term.profile.radius || r == 0.0) return Vec3::Zero();
    return (term.profile.derivative(r) / r) * rel.cross(term.axis);
}

Vec3 planar_gradient_rot(const PlanarCurlTerm& term, double x1, double x2)
{
    const double a = x1 - term.centre.x();
    const double b = x2 - term.centre.y();
    const double rho = std::hypot(a, b);
    if (rho >= term.profile.radius || rho == 0.0) return Vec3::Zero();
    const double s = term.profile.derivative(rho) / rho;
    return Vec3(s * b, -s * a, 0.0);
}

}  // namespace

double SourceModel::support_radius() const
{
    double r = 0.0;
    for (const auto& t : bumps) r = std::max(r, t.centre.norm() + t.profile.radius);
    for (const auto& t : planar) r = std::max(r, std::hypot(t.centre.norm() + t.profile.radius, axial.radius));
    return r;
}

double SourceModel::duration() const
{
    double t0 = 0.0;
    for (std::size_t m = 0; m < term_count(); ++m) t0 = std::max(t0, term_pulse(m).hi);
    return t0;
}

std::pair<Vec3, Vec3> SourceModel::support_box() const
{
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const auto& t : bumps) {
        lo = lo.cwiseMin(t.centre - Vec3::Constant(t.profile.radius));
        hi = hi.cwiseMax(t.centre + Vec3::Constant(t.profile.radius));
    }
    for (const auto& t : planar) {
        const Vec3 c(t.centre.x(), t.centre.y(), 0.0);
        const Vec3 ext(t.profile.radius, t.profile.radius, axial.radius);
        lo = lo.cwiseMin(c - ext);
        hi = hi.cwiseMax(c + ext);
    }
    if (term_count() == 0) return {Vec3::Constant(-1.0), Vec3::Constant(1.0)};
    return {lo, hi};
}

bool SourceModel::is_zero() const
{
    for (const auto& t : bumps)
        if (t.profile.amplitude != 0.0 && !t.pulse.is_zero()) return false;
    for (const auto& t : planar)
        if (t.profile.amplitude != 0.0 && !t.pulse.is_zero() && axial.amplitude != 0.0) return false;
    return true;
}

Vec3 SourceModel::operator()(const Vec3& x, double t) const
{
    Vec3 acc = Vec3::Zero();
    for (std::size_t m = 0; m < term_count(); ++m) {
        const double tau = term_pulse(m)(t);
        if (tau != 0.0) acc += tau * term_spatial(m, x);
    }
    return acc;
}

Vec3 SourceModel::term_spatial(std::size_t m, const Vec3& y) const
{
    if (m < bumps.size()) return bump_field(bumps[m], y);
    const auto& term = planar[m - bumps.size()];
    const double g = axial.value(std::abs(y.z()));
    if (g == 0.0) return Vec3::Zero();
    return g * planar_gradient_rot(term, y.x(), y.y());
}

Vec3 SourceModel::term_centre(std::size_t m) const
{
    if (m < bumps.size()) return bumps[m].centre;
    const auto& c = planar[m - bumps.size()].centre;
    return Vec3(c.x(), c.y(), 0.0);
}

double SourceModel::term_radius(std::size_t m) const
{
    if (m < bumps.size()) return bumps[m].profile.radius;
    return std::hypot(planar[m - bumps.size()].profile.radius, axial.radius);
}

const Pulse& SourceModel::term_pulse(std::size_t m) const
{
    if (m < bumps.size()) return bumps[m].pulse;
    return planar.at(m - bumps.size()).pulse;
}

Vec3 SourceModel::spatial(const Vec3& x) const
{
    Vec3 acc = Vec3::Zero();
    for (std::size_t m = 0; m < term_count(); ++m) acc += term_spatial(m, x);
    return acc;
}

const Pulse& SourceModel::time_profile() const
{
    static const Pulse silent{0.0, 1.0, 0.05, 0.0, 2.0};
    if (term_count() == 0) return silent;
    return term_pulse(0);
}

Vec3c SourceModel::term_spectrum(std::size_t m, const Vec3c& xi) const
{
    if (m < bumps.size()) {
        const auto& t = bumps[m];
        const Complex phase = std::exp(-kI * bdot(xi, t.centre.cast<Complex>()));
        const Vec3c grad = (kI * t.profile.spectrum3(bdot(xi, xi))) * xi;
        return phase * bcross(grad, Vec3c(t.axis.cast<Complex>()));
    }
    // The planar family has a real-only closed form.
    const Vec3 xr = xi.real();
    return planar_term_spectrum(m - bumps.size(), xr.x(), xr.y()) * axial.spectrum1(xr.z());
}

Vec3c SourceModel::planar_term_spectrum(std::size_t j, double xi1, double xi2) const
{
    const auto& t = planar[j];
    const double k = std::hypot(xi1, xi2);
    const Complex phase = std::exp(-kI * (xi1 * t.centre.x() + xi2 * t.centre.y()));
    const Complex chi = t.profile.spectrum2(k) * phase;
    return Vec3c(kI * xi2 * chi, -kI * xi1 * chi, 0.0);
}

Vec3c SourceModel::spatial_spectrum(const Vec3c& xi) const
{
    Vec3c acc = Vec3c::Zero();
    for (std::size_t m = 0; m < term_count(); ++m) acc += term_spectrum(m, xi);
    return acc;
}

Vec3c SourceModel::spacetime_spectrum(const Vec3& xi, double omega) const
{
    Vec3c acc = Vec3c::Zero();
    const Vec3c xic = xi.cast<Complex>();
    for (std::size_t m = 0; m < term_count(); ++m) {
        const Complex ghat = fourier_time_profile(term_pulse(m), omega);
        if (ghat != 0.0) acc += ghat * term_spectrum(m, xic);
    }
    return acc;
}

Vec3c SourceModel::planar_spectrum(double xi1, double xi2, double omega) const
{
    Vec3c acc = Vec3c::Zero();
    for (std::size_t j = 0; j < planar.size(); ++j) {
        const Complex ghat = fourier_time_profile(planar[j].pulse, omega);
        if (ghat != 0.0) acc += ghat * planar_term_spectrum(j, xi1, xi2);
    }
    return acc;
}

Complex SourceModel::axial_spectrum(double xi3) const { return axial.spectrum1(xi3); }

Vec3 SourceModel::planar_field(double x1, double x2, double t) const
{
    Vec3 acc = Vec3::Zero();
    for (const auto& term : planar) {
        const double tau = term.pulse(t);
        if (tau != 0.0) acc += tau * planar_gradient_rot(term, x1, x2);
    }
    return acc;
}

SourceModel gaussian_curl(const GaussianCurlParams& params)
{
    SourceModel s;
    s.kind = SourceKind::IP1_separable;
    s.family = "gaussian_curl";
    CurlBumpTerm term;
    term.profile = RadialBump{params.amplitude, params.sigma, params.radius, params.window_power};
    term.axis = params.axis.normalized();
    term.pulse = params.pulse;
    s.bumps.push_back(term);
    return s;
}

SourceModel ring_current(std::vector<CurlBumpTerm> loops)
{
    SourceModel s;
    s.family = "ring_current";
    s.bumps = std::move(loops);
    bool shared = true;
    for (const auto& l : s.bumps) {
        const Pulse& a = l.pulse;
        const Pulse& b = s.bumps.front().pulse;
        shared = shared && a.amplitude == b.amplitude && a.centre == b.centre && a.eta == b.eta && a.lo == b.lo &&
                 a.hi == b.hi;
    }
    s.kind = shared ? SourceKind::IP1_separable : SourceKind::IP2_general;
    return s;
}

SourceModel separable_x3(std::vector<PlanarCurlTerm> terms, const RadialBump& axial)
{
    SourceModel s;
    s.kind = SourceKind::IP3_x3_separable;
    s.family = "separable_x3";
    s.planar = std::move(terms);
    s.axial = axial;
    return s;
}

SourceModel zero_source()
{
    GaussianCurlParams params;
    params.amplitude = 0.0;
    SourceModel s = gaussian_curl(params);
    s.family = "zero";
    return s;
}

double divergence_probe(const SourceModel& source, int points, std::uint64_t seed, double h)
{
    std::mt19937_64 rng(seed);
    const auto [lo, hi] = source.support_box();
    const double t0 = std::max(source.duration(), 1e-12);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        Vec3 x;
        for (int i = 0; i < 3; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
        const double t = t0 * unit(rng);
        double div = 0.0;
        for (int i = 0; i < 3; ++i) {
            Vec3 e = Vec3::Zero();
            e[i] = h;
            div += (source(x + e, t)[i] - source(x - e, t)[i]) / (2.0 * h);
        }
        worst = std::max(worst, std::abs(div));
    }
    return worst;
}

}  // namespace emprobe
