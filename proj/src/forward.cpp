#include "emprobe/forward.hpp"

#include "emprobe/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>

namespace emprobe {

Vec3c plane_wave_field(const PolarizationProbe& probe, const Vec3& x, double t)
{
    return plane_wave_phase(probe, x, t) * probe.p.cast<Complex>();
}

Vec3c curl_plane_wave(const PolarizationProbe& probe, const Vec3& x, double t)
{
    return (-kI * probe.kappa * plane_wave_phase(probe, x, t)) * probe.d.cross(probe.p).cast<Complex>();
}

namespace {

// Gauss-Legendre rules on [0, 1], cached by node count.
const Rule1D& unit_rule(int count)
{
    static std::mutex mutex;
    static std::map<int, Rule1D> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(count);
    if (it == cache.end()) it = cache.emplace(count, gauss_legendre(count, 0.0, 1.0)).first;
    return it->second;
}

struct ShellMoments {
    Vec3 a = Vec3::Zero();  // (rho / 4 pi) int_cap h dw
    Vec3 b = Vec3::Zero();  // (1 / 4 pi) int_cap w x h dw
};

// Orthonormal frame (e1, e2) completing the unit axis.
std::pair<Vec3, Vec3> frame(const Vec3& axis)
{
    const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = axis.cross(helper).normalized();
    return {e1, axis.cross(e1)};
}

}  // namespace

RetardedSolver::RetardedSolver(const SourceModel& source, const MediumParams& medium, ForwardOptions options)
    : source_(source), medium_(medium), options_(options)
{
    if (!source_.divergence_free)
        throw PreconditionError("retarded-potential solver requires a divergence-free source");
    if (options_.cap_polar < 1 || options_.rho_min < 1) throw PreconditionError("forward quadrature counts must be positive");
}

void RetardedSolver::history(const Vec3& x, const std::vector<double>& times, std::vector<Vec3>& E,
                             std::vector<Vec3>& curlE) const
{
    E.assign(times.size(), Vec3::Zero());
    curlE.assign(times.size(), Vec3::Zero());
    if (times.empty()) return;
    const auto [t_min_it, t_max_it] = std::minmax_element(times.begin(), times.end());
    const double t_min = *t_min_it;
    const double t_max = *t_max_it;
    const double sn = medium_.sqrt_n();
    constexpr double inv4pi = 1.0 / (4.0 * kPi);

    for (std::size_t m = 0; m < source_.term_count(); ++m) {
        const Pulse& pulse = source_.term_pulse(m);
        if (pulse.is_zero()) continue;
        const Vec3 c = source_.term_centre(m);
        const double rs = source_.term_radius(m);
        const Vec3 offset = c - x;
        const double r = offset.norm();
        const Vec3 axis = r > 0.0 ? Vec3(offset / r) : Vec3::UnitZ();
        const auto [e1, e2] = frame(axis);
        const int n_az = options_.cap_azimuth > 0 ? options_.cap_azimuth : (source_.term_is_radial(m) ? 6 : 32);
        const int n_cap = source_.term_is_radial(m) ? options_.cap_polar : std::max(options_.cap_polar, 32);
        const double dpsi = kTwoPi / n_az;
        std::vector<double> cos_psi(n_az), sin_psi(n_az);
        for (int a = 0; a < n_az; ++a) {
            cos_psi[a] = std::cos(dpsi * a);
            sin_psi[a] = std::sin(dpsi * a);
        }

        // Panels in rho split where the cap changes shape.
        std::vector<double> breaks{std::max(0.0, r - rs), r + rs};
        if (r < rs) breaks.push_back(rs - r);
        if (r > breaks.front() && r < breaks[1]) breaks.push_back(r);
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

        double width = std::sqrt(pulse.eta) / sn;
        if (source_.term_is_radial(m)) {
            const RadialBump& prof = source_.bumps[m].profile;
            width = std::min(width, prof.sigma > 0.0 ? prof.sigma : prof.radius / 4.0);
        } else {
            const RadialBump& prof = source_.planar[m - source_.bumps.size()].profile;
            width = std::min({width, prof.sigma > 0.0 ? prof.sigma : prof.radius / 4.0,
                              source_.axial.sigma > 0.0 ? source_.axial.sigma : source_.axial.radius / 4.0});
        }

        const Rule1D& cap_rule = unit_rule(n_cap);
        for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
            const double r0 = breaks[p];
            const double r1 = breaks[p + 1];
            const double len = r1 - r0;
            if (len <= 0.0) continue;
            const int count = options_.rho_min + static_cast<int>(std::ceil(options_.rho_density * len / width));
            const Rule1D& rule = unit_rule(count);
            for (int j = 0; j < count; ++j) {
                const double rho = r0 + len * rule.nodes[j];
                const double wr = len * rule.weights[j];
                if (rho <= 0.0) continue;
                // Skip shells whose retarded times miss the pulse for every requested time.
                if (t_max - sn * rho <= pulse.lo || t_min - sn * rho >= pulse.hi) continue;
                ShellMoments mom;
                const bool full = rho + r <= rs;
                double lo, hi;
                if (full) {
                    lo = -1.0;
                    hi = 1.0;
                } else {
                    lo = std::abs(r - rho);
                    hi = std::min(r + rho, rs);
                    if (hi <= lo) continue;
                }
                for (int i = 0; i < n_cap; ++i) {
                    double cg, wc;
                    if (full) {
                        cg = lo + (hi - lo) * cap_rule.nodes[i];
                        wc = (hi - lo) * cap_rule.weights[i];
                    } else {
                        const double u = lo + (hi - lo) * cap_rule.nodes[i];
                        cg = std::clamp((r * r + rho * rho - u * u) / (2.0 * r * rho), -1.0, 1.0);
                        wc = (hi - lo) * cap_rule.weights[i] * u / (r * rho);
                    }
                    const double sg = std::sqrt(std::max(0.0, 1.0 - cg * cg));
                    for (int a = 0; a < n_az; ++a) {
                        const Vec3 w = cg * axis + sg * (cos_psi[a] * e1 + sin_psi[a] * e2);
                        const Vec3 h = source_.term_spatial(m, x + rho * w);
                        const double weight = wc * dpsi;
                        mom.a += weight * h;
                        mom.b += weight * w.cross(h);
                    }
                }
                mom.a *= rho * inv4pi * wr;
                mom.b *= inv4pi * wr;
                const double delay = sn * rho;
                for (std::size_t k = 0; k < times.size(); ++k) {
                    const double tr = times[k] - delay;
                    if (tr <= pulse.lo || tr >= pulse.hi) continue;
                    const double tau = pulse(tr);
                    const double dtau = pulse.derivative(tr);
                    E[k] += tau * mom.a;
                    curlE[k] += (tau + delay * dtau) * mom.b;
                }
            }
        }
    }
}

FieldSample RetardedSolver::sample(const Vec3& x, double t) const
{
    std::vector<Vec3> E, C;
    history(x, {t}, E, C);
    return FieldSample{x, t, E.front(), C.front()};
}

Vec3 retarded_field(const SourceModel& source, const MediumParams& medium, const Vec3& x, double t,
                    const ForwardOptions& options)
{
    return RetardedSolver(source, medium, options).field(x, t);
}

Vec3 retarded_curl(const SourceModel& source, const MediumParams& medium, const Vec3& x, double t,
                   const ForwardOptions& options)
{
    return RetardedSolver(source, medium, options).curl(x, t);
}

double huygens_horizon(const SourceModel& source, const MediumParams& medium, double radius)
{
    return source.duration() + 2.0 * medium.sqrt_n() * radius;
}

double huygens_residual(const SourceModel& source, const MediumParams& medium, const std::vector<Vec3>& points,
                        double t, double radius, const ForwardOptions& options)
{
    if (radius <= 0.0) {
        radius = source.support_radius();
        for (const auto& x : points) radius = std::max(radius, x.norm());
    }
    const double horizon = huygens_horizon(source, medium, radius);
    if (!(t > horizon))
        throw PreconditionError("huygens_residual: t = " + std::to_string(t) + " is not past the horizon " +
                                std::to_string(horizon));
    const RetardedSolver solver(source, medium, options);
    double worst = 0.0;
    for (const auto& x : points) worst = std::max(worst, solver.field(x, t).norm());
    return worst;
}

HuygensReport huygens_check(const SourceModel& source, const MediumParams& medium, double R, int points,
                            std::uint64_t seed, double margin, int peak_times, const ForwardOptions& options)
{
    if (!(margin > 0.0)) throw PreconditionError("huygens_check needs a positive margin");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Vec3> xs;
    while (static_cast<int>(xs.size()) < points) {
        const Vec3 x(uni(rng), uni(rng), uni(rng));
        if (x.squaredNorm() < 1.0) xs.push_back(R * x);
    }
    HuygensReport report;
    const double horizon = huygens_horizon(source, medium, R);
    report.time = horizon + margin;
    std::vector<double> times;
    for (int k = 1; k <= peak_times; ++k) times.push_back(horizon * k / (peak_times + 1));
    times.push_back(report.time);
    const RetardedSolver solver(source, medium, options);
    std::vector<double> peak(xs.size(), 0.0), tail(xs.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(xs.size()); ++i) {
        std::vector<Vec3> E, C;
        solver.history(xs[i], times, E, C);
        for (int k = 0; k < peak_times; ++k) peak[i] = std::max(peak[i], E[k].norm());
        tail[i] = E.back().norm();
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        report.peak = std::max(report.peak, peak[i]);
        report.residual = std::max(report.residual, tail[i]);
    }
    return report;
}

}  // namespace emprobe
