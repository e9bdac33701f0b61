#include "emprobe/stability.hpp"

#include "emprobe/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emprobe {

std::string to_string(TheoremTag tag)
{
    switch (tag) {
    case TheoremTag::TH1: return "TH1";
    case TheoremTag::TH2: return "TH2";
    case TheoremTag::TH3: return "TH3";
    }
    return "?";
}

TheoremTag theorem_for(ProblemKind problem)
{
    switch (problem) {
    case ProblemKind::IP1: return TheoremTag::TH1;
    case ProblemKind::IP2: return TheoremTag::TH2;
    case ProblemKind::IP3: return TheoremTag::TH3;
    }
    return TheoremTag::TH1;
}

std::string to_string(TailRegion region)
{
    switch (region) {
    case TailRegion::IP1_ball: return "IP1_ball";
    case TailRegion::IP2_E1: return "IP2_E1";
    case TailRegion::IP2_E2: return "IP2_E2";
    case TailRegion::IP3_E1: return "IP3_E1";
    case TailRegion::IP3_E23: return "IP3_E23";
    }
    return "?";
}

bool in_sector(Complex s)
{
    return std::abs(s) > 0.0 && std::abs(std::arg(s)) < kPi / 4.0;
}

double lowpass_energy(const SpectralSamples& samples, double s)
{
    if (samples.problem != ProblemKind::IP1) throw PreconditionError("sampled I(s) is defined for IP1 samples");
    if (s < 0.0) throw DomainError("I(s) needs s >= 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& node = samples.nodes.nodes[i];
        if (node.xi().norm() <= std::sqrt(node.n) * s * (1.0 + 1e-12))
            acc += node.weight * std::norm(samples.p_component[i]);
    }
    return acc;
}

Complex lowpass_energy(const SourceModel& source, const MediumParams& medium, Complex s, const LowpassOptions& options)
{
    if (s == 0.0) return 0.0;
    if (!in_sector(s)) throw DomainError("I(s) continuation needs |arg s| < pi/4");
    const SphereGrid dirs = make_sphere_grid(1.0, options.polar, 2 * options.polar);
    const Rule1D rule = gauss_legendre(options.radial, 0.0, 1.0);
    const Complex scale = medium.sqrt_n() * s;
    const Complex scale3 = scale * scale * scale;
    std::vector<Complex> per_dir(dirs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(dirs.size()); ++k) {
        const Vec3& theta = dirs.nodes[k];
        const Vec3c p = polarization_for(theta).cast<Complex>();
        Complex acc = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const double l = rule.nodes[j];
            const Vec3c xi = (scale * l) * theta.cast<Complex>();
            const Vec3c a = source.spatial_spectrum(xi);
            const Vec3c b = source.spatial_spectrum(Vec3c(-xi));
            const Complex pair = options.component == Component::P ? bdot(p, a) * bdot(p, b) : bdot(a, b);
            acc += rule.weights[j] * l * l * pair;
        }
        per_dir[k] = dirs.weights[k] * acc;
    }
    Complex total = 0.0;
    for (const auto& v : per_dir) total += v;
    return scale3 * total;
}

double lemma1_bound(Complex s, double R, double n, double f_norm_sq)
{
    const double c = 4.0 * kPi / 3.0;
    const double a = std::abs(s);
    return c * c * R * R * R * std::pow(n, 1.5) * a * a * a * std::exp(2.0 * R * std::sqrt(n) * std::abs(s.imag())) *
           f_norm_sq;
}

double mu_exponent(double z, const ContinuationParams& params)
{
    if (!(params.L > 0.0)) throw DomainError("continuation band L must be positive");
    if (!(z > params.L)) throw DomainError("mu(z) is defined for z > L");
    const double ratio = z / params.L;
    // Closed at 2^{1/4} up to rounding in z = 2^{1/4} L.
    if (ratio <= std::pow(2.0, 0.25) * (1.0 + 1e-12)) return 0.5;
    return 1.0 / (kPi * std::sqrt(std::pow(ratio, 4) - 1.0));
}

ContinuationReport continuation_bound_check(const std::vector<ContinuationSample>& band,
                                            const std::vector<ContinuationSample>& beyond, double V, double eps,
                                            const ContinuationParams& params)
{
    ContinuationReport report;
    for (const auto& smp : band)
        if (smp.J > eps) report.band_certified = false;
    for (const auto& smp : beyond) {
        if (!(smp.z > params.L)) continue;
        ContinuationPoint pt;
        pt.z = smp.z;
        pt.J = smp.J;
        pt.bound = V * std::pow(eps, mu_exponent(smp.z, params));
        pt.ok = smp.J <= pt.bound;
        if (!pt.ok) ++report.violations;
        report.points.push_back(pt);
    }
    report.holds = report.violations == 0;
    return report;
}

Lemma32Result lemma32_check(const SourceModel& source, const MediumParams& medium, double R, double b, double eps,
                            const Lemma32Options& options)
{
    if (!(b > 0.0) || !(eps > 0.0) || !(eps < 1.0)) throw DomainError("lemma check needs b > 0 and 0 < eps < 1");
    const double decay = 2.0 * R * medium.sqrt_n() + 1.0;
    auto J = [&](Complex s) { return lowpass_energy(source, medium, s, options.lowpass) * std::exp(-decay * s) / (b * b); };

    Lemma32Result out;
    double band_sup = 0.0;
    for (int k = 1; k <= options.band_samples; ++k) {
        const double z = b * k / options.band_samples;
        const double v = std::abs(J(z));
        out.band.push_back({z, v});
        band_sup = std::max(band_sup, v);
    }
    double sup = band_sup;
    for (int k = 1; k <= options.beyond_samples; ++k) {
        const double z = b + 3.0 * b * k / options.beyond_samples;
        const double v = std::abs(J(z));
        sup = std::max(sup, v);
        out.beyond.push_back({z, v * options.corruption});
    }
    const double max_arg = 0.24 * kPi;
    for (int i = 1; i <= options.sector_radii; ++i) {
        const double r = 6.0 * b * i / options.sector_radii;
        for (int j = 0; j < options.sector_angles; ++j) {
            const double phi =
                options.sector_angles == 1 ? 0.0 : -max_arg + 2.0 * max_arg * j / (options.sector_angles - 1);
            sup = std::max(sup, std::abs(J(std::polar(r, phi))));
        }
    }
    out.sector_sup = sup;
    const double eps2 = eps * eps;
    out.band_constant = band_sup / eps2;
    // Two-constants form: |J| <= sup^{1-mu} (c eps^2)^mu <= max(1, sup) max(1, c) eps^{2 mu}.
    out.V = std::max(1.0, sup) * std::max(1.0, out.band_constant);
    std::vector<ContinuationSample> band_scaled;
    for (const auto& smp : out.band) band_scaled.push_back({smp.z, smp.J / std::max(1.0, out.band_constant)});
    ContinuationParams params{b};
    out.report = continuation_bound_check(band_scaled, out.beyond, out.V, eps2, params);
    return out;
}

namespace {

// Geometric panels covering [r0, r1]: the first panel has length min(r1 - r0, max(r0, 1)).
std::vector<std::pair<double, double>> panels(double r0, double r1)
{
    std::vector<std::pair<double, double>> out;
    double a = r0;
    double len = std::max(r0, 1.0);
    while (a < r1) {
        const double b = std::min(r1, a + len);
        out.emplace_back(a, b);
        a = b;
        len *= 2.0;
    }
    return out;
}

// Nodes and weights of Gauss-Legendre rules on the panels of [r0, r1].
Rule1D paneled_rule(double r0, double r1, int per_panel)
{
    Rule1D rule;
    for (const auto& [a, b] : panels(r0, r1)) {
        const Rule1D g = gauss_legendre(per_panel, a, b);
        rule.nodes.insert(rule.nodes.end(), g.nodes.begin(), g.nodes.end());
        rule.weights.insert(rule.weights.end(), g.weights.begin(), g.weights.end());
    }
    return rule;
}

double projected_norm(const Vec3c& v, const Vec3& dir, Component component)
{
    if (component == Component::Full) return v.squaredNorm();
    return std::norm(bdot(polarization_for(dir).cast<Complex>(), v));
}

// int_{r0 <= |xi| <= r1} of |f^|^2 (3D spatial spectrum).
double spatial_shell(const SourceModel& source, double r0, double r1, const SphereGrid& dirs, int radial,
                     Component component)
{
    if (!(r1 > r0)) return 0.0;
    const Rule1D rule = paneled_rule(r0, r1, radial);
    std::vector<double> per_node(rule.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(rule.size()); ++j) {
        const double r = rule.nodes[j];
        double acc = 0.0;
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            const Vec3 xi = r * dirs.nodes[k];
            acc += dirs.weights[k] * projected_norm(source.spatial_spectrum(xi.cast<Complex>()), dirs.nodes[k], component);
        }
        per_node[j] = rule.weights[j] * r * r * acc;
    }
    return ordered_sum(per_node);
}

// Per-term temporal transforms at omega.
std::vector<Complex> term_ghat(const SourceModel& source, double omega)
{
    std::vector<Complex> g(source.term_count());
    for (std::size_t m = 0; m < g.size(); ++m) g[m] = fourier_time_profile(source.term_pulse(m), omega);
    return g;
}

Vec3c spacetime_from(const SourceModel& source, const std::vector<Complex>& ghat, const Vec3& xi)
{
    Vec3c acc = Vec3c::Zero();
    const Vec3c xic = xi.cast<Complex>();
    for (std::size_t m = 0; m < ghat.size(); ++m)
        if (ghat[m] != 0.0) acc += ghat[m] * source.term_spectrum(m, xic);
    return acc;
}

Vec3c planar_from(const SourceModel& source, const std::vector<Complex>& ghat, double xi1, double xi2)
{
    Vec3c acc = Vec3c::Zero();
    const std::size_t offset = source.bumps.size();
    for (std::size_t j = 0; j < source.planar.size(); ++j)
        if (ghat[offset + j] != 0.0) acc += ghat[offset + j] * source.planar_term_spectrum(j, xi1, xi2);
    return acc;
}

// 2 int_{w0}^{w1} d omega int_{lo(omega) <= |xi| <= hi(omega)} |F^(xi, omega)|^2 over R^3 in xi.
template <typename Lo, typename Hi>
double spacetime_region(const SourceModel& source, double w0, double w1, Lo lo, Hi hi, const SphereGrid& dirs,
                        const TailOptions& options)
{
    if (!(w1 > w0)) return 0.0;
    const Rule1D wr = paneled_rule(w0, w1, options.omega);
    std::vector<double> per_omega(wr.size());
    for (std::size_t i = 0; i < wr.size(); ++i) {
        const double omega = wr.nodes[i];
        const double r0 = lo(omega);
        const double r1 = hi(omega);
        if (!(r1 > r0)) continue;
        const auto ghat = term_ghat(source, omega);
        const Rule1D rr = paneled_rule(r0, r1, options.radial);
        std::vector<double> per_r(rr.size());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(rr.size()); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dirs.size(); ++k)
                acc += dirs.weights[k] *
                       projected_norm(spacetime_from(source, ghat, rr.nodes[j] * dirs.nodes[k]), dirs.nodes[k], options.component);
            per_r[j] = rr.weights[j] * rr.nodes[j] * rr.nodes[j] * acc;
        }
        per_omega[i] = 2.0 * wr.weights[i] * ordered_sum(per_r);
    }
    return ordered_sum(per_omega);
}

// 2 int_{w0}^{w1} d omega int_{lo <= |xi~| <= hi} |f^(xi~, omega)|^2 in the plane.
template <typename Lo, typename Hi>
double planar_region(const SourceModel& source, double w0, double w1, Lo lo, Hi hi, const TailOptions& options)
{
    if (!(w1 > w0)) return 0.0;
    const Rule1D wr = paneled_rule(w0, w1, options.omega);
    const int n_theta = 2 * options.polar;
    const double dtheta = kTwoPi / n_theta;
    std::vector<double> per_omega(wr.size());
    for (std::size_t i = 0; i < wr.size(); ++i) {
        const double omega = wr.nodes[i];
        const double r0 = lo(omega);
        const double r1 = hi(omega);
        if (!(r1 > r0)) continue;
        const auto ghat = term_ghat(source, omega);
        const Rule1D rr = paneled_rule(r0, r1, options.radial);
        std::vector<double> per_r(rr.size());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(rr.size()); ++j) {
            double acc = 0.0;
            for (int a = 0; a < n_theta; ++a) {
                const double th = dtheta * a;
                acc += planar_from(source, ghat, rr.nodes[j] * std::cos(th), rr.nodes[j] * std::sin(th)).squaredNorm();
            }
            per_r[j] = rr.weights[j] * rr.nodes[j] * dtheta * acc;
        }
        per_omega[i] = 2.0 * wr.weights[i] * ordered_sum(per_r);
    }
    return ordered_sum(per_omega);
}

}  // namespace

TailEstimate tail_energy(const SourceModel& source, const MediumParams& medium, double s, TailRegion region,
                         const TailOptions& options)
{
    if (!(s > 0.0)) throw DomainError("tail energy needs s > 0");
    if (!(options.outer_factor > 1.0)) throw PreconditionError("tail outer factor must exceed 1");
    const SphereGrid dirs = make_sphere_grid(1.0, options.polar, 2 * options.polar);
    const double sn = medium.sqrt_n();
    const double f = options.outer_factor;
    TailEstimate est;
    switch (region) {
    case TailRegion::IP1_ball: {
        est.inner = sn * s;
        est.outer = f * est.inner;
        est.value = spatial_shell(source, est.inner, est.outer, dirs, options.radial, options.component);
        est.truncation_estimate = spatial_shell(source, est.outer, 2.0 * est.outer, dirs, options.radial, options.component);
        break;
    }
    case TailRegion::IP2_E1: {
        est.inner = s;
        est.outer = f * s;
        auto lo = [](double) { return 0.0; };
        auto hi = [s](double w) { return s * w; };
        est.value = spacetime_region(source, s, est.outer, lo, hi, dirs, options);
        est.truncation_estimate = spacetime_region(source, est.outer, 2.0 * est.outer, lo, hi, dirs, options);
        break;
    }
    case TailRegion::IP2_E2: {
        // |xi| >= s |omega|, cut at |xi| <= outer.
        est.inner = s;
        est.outer = f * s;
        const double K = est.outer;
        auto lo = [s](double w) { return s * w; };
        est.value = spacetime_region(source, 0.0, K / s, lo, [K](double) { return K; }, dirs, options);
        est.truncation_estimate = spacetime_region(
            source, 0.0, 2.0 * K / s, [s, K](double w) { return std::max(s * w, K); }, [K](double) { return 2.0 * K; }, dirs,
            options);
        break;
    }
    case TailRegion::IP3_E1: {
        est.inner = s / sn;
        est.outer = f * est.inner;
        auto lo = [](double) { return 0.0; };
        auto hi = [sn](double w) { return sn * w; };
        est.value = planar_region(source, est.inner, est.outer, lo, hi, options);
        est.truncation_estimate = planar_region(source, est.outer, 2.0 * est.outer, lo, hi, options);
        break;
    }
    case TailRegion::IP3_E23: {
        // |xi~| >= sqrt(n) |omega|, cut at |xi~| <= outer.
        est.inner = s / sn;
        est.outer = f * est.inner;
        const double K = est.outer;
        auto lo = [sn](double w) { return sn * w; };
        est.value = planar_region(source, 0.0, K / sn, lo, [K](double) { return K; }, options);
        est.truncation_estimate = planar_region(
            source, 0.0, 2.0 * K / sn, [sn, K](double w) { return std::max(sn * w, K); },
            [K](double) { return 2.0 * K; }, options);
        break;
    }
    }
    if (est.truncation_estimate > options.rel_tolerance * est.value + options.abs_tolerance)
        throw AccuracyError("tail truncation estimate " + std::to_string(est.truncation_estimate) +
                            " exceeds tolerance for tail value " + std::to_string(est.value) + " in region " +
                            to_string(region));
    return est;
}

double source_norm_squared(const SourceModel& source, int resolution)
{
    const auto [lo, hi] = source.support_box();
    const Vec3 h = (hi - lo) / resolution;
    std::vector<double> slab(resolution, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < resolution; ++i) {
        double acc = 0.0;
        for (int j = 0; j < resolution; ++j)
            for (int k = 0; k < resolution; ++k) {
                const Vec3 x = lo + Vec3((i + 0.5) * h.x(), (j + 0.5) * h.y(), (k + 0.5) * h.z());
                acc += source.spatial(x).squaredNorm();
            }
        slab[i] = acc;
    }
    return ordered_sum(slab) * h.prod();
}

namespace {

template <int D, typename Field>
double grid_h1(const Eigen::Matrix<double, D, 1>& lo, const Eigen::Matrix<double, D, 1>& hi, int res, Field field)
{
    using Point = Eigen::Matrix<double, D, 1>;
    const Point h = (hi - lo) / res;
    const double fd = 1e-5;
    std::size_t total = 1;
    for (int a = 0; a < D; ++a) total *= static_cast<std::size_t>(res);
    const std::size_t outer = static_cast<std::size_t>(res);
    const std::size_t inner = total / outer;
    std::vector<double> slab(outer, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i0 = 0; i0 < static_cast<std::ptrdiff_t>(outer); ++i0) {
        double acc = 0.0;
        for (std::size_t rest = 0; rest < inner; ++rest) {
            Point x;
            std::size_t idx = rest;
            x(0) = lo(0) + (i0 + 0.5) * h(0);
            for (int a = D - 1; a >= 1; --a) {
                x(a) = lo(a) + (static_cast<double>(idx % outer) + 0.5) * h(a);
                idx /= outer;
            }
            acc += field(x).squaredNorm();
            for (int a = 0; a < D; ++a) {
                Point xp = x, xm = x;
                xp(a) += fd;
                xm(a) -= fd;
                acc += ((field(xp) - field(xm)) / (2.0 * fd)).squaredNorm();
            }
        }
        slab[i0] = acc;
    }
    return std::sqrt(ordered_sum(slab) * h.prod());
}

}  // namespace

double source_h1_norm(const SourceModel& source, ProblemKind problem, int resolution)
{
    const auto [lo, hi] = source.support_box();
    switch (problem) {
    case ProblemKind::IP1:
        return grid_h1<3>(lo, hi, resolution, [&](const Vec3& x) { return source.spatial(x); });
    case ProblemKind::IP2: {
        const Eigen::Vector4d lo4(lo.x(), lo.y(), lo.z(), 0.0);
        const Eigen::Vector4d hi4(hi.x(), hi.y(), hi.z(), source.duration());
        return grid_h1<4>(lo4, hi4, std::max(16, resolution / 2), [&](const Eigen::Vector4d& x) {
            return source(Vec3(x(0), x(1), x(2)), x(3));
        });
    }
    case ProblemKind::IP3:
        return grid_h1<3>(Vec3(lo.x(), lo.y(), 0.0), Vec3(hi.x(), hi.y(), source.duration()), resolution,
                          [&](const Vec3& x) { return source.planar_field(x(0), x(1), x(2)); });
    }
    return 0.0;
}

namespace {

void check_envelope_domain(double b, double eps)
{
    if (!(eps > 0.0) || !(eps < std::exp(-1.0))) throw DomainError("envelopes need 0 < eps < 1/e");
    if (!(b > 1.0)) throw DomainError("envelopes need b > 1");
}

}  // namespace

EnvelopeTerms envelope(TheoremTag theorem, double b, double eps, double M, std::optional<double> alpha)
{
    check_envelope_domain(b, eps);
    const double L = std::abs(std::log(eps));
    const double e2 = eps * eps;
    EnvelopeTerms out;
    switch (theorem) {
    case TheoremTag::TH1:
        out.data = std::pow(b, 5) * e2;
        out.tail = M * M / (std::pow(b, 4.0 / 3.0) * std::sqrt(L));
        break;
    case TheoremTag::TH2:
        out.data = std::pow(b, 11) * e2;
        out.tail = M * M / (b * std::pow(L, 0.4));
        break;
    case TheoremTag::TH3: {
        if (!alpha || !(*alpha > 0.0) || !(*alpha < 1.0)) throw DomainError("TH3 envelope needs alpha in (0, 1)");
        const double a = *alpha;
        out.data = std::pow(b, 7) * e2;
        out.mid = std::pow(b, 5) * std::exp(2.0 * b * (1.0 - a)) * std::pow(eps, 2.0 * a);
        out.tail = M * M / (std::pow(b, 4.0 / 3.0) * std::sqrt(a * L));
        break;
    }
    }
    return out;
}

SChoice choose_s(TheoremTag theorem, double b, double eps, const EnvelopeGeometry& geometry, double alpha)
{
    if (!(eps > 0.0) || !(eps < std::exp(-1.0))) throw DomainError("choose_s needs 0 < eps < 1/e");
    double L = std::abs(std::log(eps));
    SChoice out;
    switch (theorem) {
    case TheoremTag::TH1:
    case TheoremTag::TH3: {
        double K = (2.0 * geometry.R * std::sqrt(geometry.n) + 3.0) * kPi;
        if (theorem == TheoremTag::TH3) {
            K = ((geometry.R + geometry.T / std::sqrt(geometry.n)) + 3.0) * kPi;
            L *= alpha;
        }
        if (std::pow(L, 0.25) > std::pow(2.0, 0.25) * std::cbrt(K) * std::cbrt(b)) {
            out.s = std::pow(b, 2.0 / 3.0) * std::pow(L, 0.25) / std::cbrt(K);
            out.case_tag = "i";
        } else {
            out.s = b;
            out.case_tag = "ii";
        }
        break;
    }
    case TheoremTag::TH2: {
        const double delta = std::max(2.0 * geometry.R, geometry.T);
        const double K = 2.0 * (delta + 2.0) * kPi;
        if (std::pow(L, 0.2) > std::pow(2.0, 0.25) * std::sqrt(b) * std::pow(K, 0.25)) {
            out.s = std::sqrt(b) * std::pow(L, 0.2) / std::pow(K, 0.25);
            out.case_tag = "i";
        } else {
            out.s = b;
            out.case_tag = "ii";
        }
        break;
    }
    }
    return out;
}

ContinuationEstimate ball_continuation_estimate(double M0, double eta, double region_measure, int d)
{
    if (d < 2) throw PreconditionError("ball continuation needs d >= 2");
    if (!(eta > 0.0) || !(region_measure > 0.0) || !(M0 > 0.0))
        throw PreconditionError("ball continuation needs positive M0, eta and |O|");
    const double ball = std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    if (region_measure > ball * (1.0 + 1e-12)) throw PreconditionError("|O| exceeds the unit ball");
    const double r_o = std::pow(std::min(region_measure / ball, 1.0), 1.0 / d);
    const double gap = 1.0 - r_o;
    ContinuationEstimate out;
    if (gap <= 1e-14) return out;
    // Cramer: |He_m(x) e^{-x^2/2}| <= K sqrt(m!), so a width-w Gaussian has
    // |d^gamma G| <= K^d sqrt(|gamma|!) w^{-|gamma|} <= M0_G |gamma|! eta^{-|gamma|}.
    constexpr double kCramer = 1.086435;
    constexpr int widths = 16;
    for (int k = 0; k < widths; ++k) {
        const double w = 0.05 * std::pow(40.0, static_cast<double>(k) / (widths - 1));
        const double c = 1.0 / (w * eta);
        double log_m0 = 0.0;
        const int m_max = std::max(200, static_cast<int>(4.0 * c * c) + 10);
        for (int m = 0; m <= m_max; ++m) log_m0 = std::max(log_m0, m * std::log(c) - 0.5 * std::lgamma(m + 1.0));
        log_m0 += d * std::log(kCramer);
        // Centred on the unit sphere: sup over B is 1, sup over O is exp(-gap^2 / 2 w^2).
        const double mu = log_m0 / (log_m0 + gap * gap / (2.0 * w * w));
        out.mu = std::min(out.mu, mu);
    }
    return out;
}

EnvelopeFit fit_envelope(const std::vector<double>& errors, const std::vector<double>& envelopes)
{
    if (errors.size() != envelopes.size() || errors.size() < 2)
        throw PreconditionError("envelope fit needs matching error and envelope lists of length >= 2");
    EnvelopeFit fit;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(envelopes[i] > 0.0)) throw PreconditionError("envelope values must be positive");
        const double ratio = errors[i] * errors[i] / envelopes[i];
        fit.C_all = std::max(fit.C_all, ratio);
        if (i % 2 == 0)
            fit.C_first = std::max(fit.C_first, ratio);
        else
            fit.C_second = std::max(fit.C_second, ratio);
    }
    const double lo = std::min(fit.C_first, fit.C_second);
    const double hi = std::max(fit.C_first, fit.C_second);
    fit.stable = lo > 0.0 && hi <= 2.0 * lo;
    return fit;
}

}  // namespace emprobe
