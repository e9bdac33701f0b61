#include "emprobe/quadrature.hpp"

#include <cmath>

namespace emprobe {

std::string to_string(ProblemKind kind)
{
    switch (kind) {
    case ProblemKind::IP1: return "IP1";
    case ProblemKind::IP2: return "IP2";
    case ProblemKind::IP3: return "IP3";
    }
    return "?";
}

ProblemKind problem_from_string(const std::string& name)
{
    if (name == "IP1") return ProblemKind::IP1;
    if (name == "IP2") return ProblemKind::IP2;
    if (name == "IP3") return ProblemKind::IP3;
    throw ConfigError("unknown problem '" + name + "' (expected IP1, IP2 or IP3)");
}

Rule1D gauss_legendre(int count, double a, double b)
{
    if (count < 1) throw PreconditionError("gauss_legendre: count must be positive");
    Rule1D rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    const int m = (count + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration from the Tricomi initial guess.
        double x = std::cos(kPi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= count; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (count == 1) p1 = x, p0 = 1.0;
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= count; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (count == 1) {
            dp = 1.0;
        } else {
            dp = count * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Ascending order: node i from the left is -x.
        rule.nodes[i] = mid - half * x;
        rule.nodes[count - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[count - 1 - i] = half * w;
    }
    if (count % 2 == 1) rule.nodes[count / 2] = mid;
    return rule;
}

Rule1D composite_simpson(int count, double a, double b)
{
    if (count < 3) throw PreconditionError("composite_simpson: need at least 3 nodes");
    Rule1D rule;
    rule.nodes.resize(count);
    rule.weights.assign(count, 0.0);
    const int intervals = count - 1;
    const double h = (b - a) / intervals;
    for (int i = 0; i < count; ++i) rule.nodes[i] = a + h * i;
    int simpson_intervals = intervals;
    if (intervals % 2 == 1) simpson_intervals = intervals - 3;
    for (int i = 0; i < simpson_intervals; i += 2) {
        rule.weights[i] += h / 3.0;
        rule.weights[i + 1] += 4.0 * h / 3.0;
        rule.weights[i + 2] += h / 3.0;
    }
    if (intervals % 2 == 1) {
        const int s = simpson_intervals;
        rule.weights[s] += 3.0 * h / 8.0;
        rule.weights[s + 1] += 9.0 * h / 8.0;
        rule.weights[s + 2] += 9.0 * h / 8.0;
        rule.weights[s + 3] += 3.0 * h / 8.0;
    }
    return rule;
}

double SphereGrid::area() const
{
    double total = 0.0;
    for (double w : weights) total += w;
    return total;
}

std::size_t SphereGrid::antipode(std::size_t index) const
{
    if (azimuth_count % 2 != 0) throw PreconditionError("antipode: azimuth count must be even");
    const std::size_t i = index / azimuth_count;
    const std::size_t j = index % azimuth_count;
    const std::size_t ia = polar_count - 1 - i;
    const std::size_t ja = (j + azimuth_count / 2) % azimuth_count;
    return ia * azimuth_count + ja;
}

SphereGrid make_sphere_grid(double radius, int polar_count, int azimuth_count)
{
    if (radius <= 0.0) throw PreconditionError("sphere radius must be positive");
    if (polar_count < 1 || azimuth_count < 1) throw PreconditionError("sphere grid counts must be positive");
    SphereGrid grid;
    grid.radius = radius;
    grid.polar_count = polar_count;
    grid.azimuth_count = azimuth_count;
    const Rule1D polar = gauss_legendre(polar_count, -1.0, 1.0);
    const double dphi = kTwoPi / azimuth_count;
    grid.nodes.reserve(static_cast<std::size_t>(polar_count) * azimuth_count);
    for (int i = 0; i < polar_count; ++i) {
        const double ct = polar.nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < azimuth_count; ++j) {
            const double phi = dphi * j;
            Vec3 nu(st * std::cos(phi), st * std::sin(phi), ct);
            nu.normalize();
            grid.normals.push_back(nu);
            grid.nodes.push_back(radius * nu);
            grid.weights.push_back(radius * radius * polar.weights[i] * dphi);
        }
    }
    return grid;
}

TimeGrid make_time_grid(double horizon, int count)
{
    if (horizon <= 0.0) throw PreconditionError("time horizon must be positive");
    const Rule1D rule = composite_simpson(count, 0.0, horizon);
    TimeGrid grid;
    grid.horizon = horizon;
    grid.count = count;
    grid.nodes = rule.nodes;
    grid.weights = rule.weights;
    return grid;
}

namespace {

// Kronrod 15 / Gauss 7 abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    Complex kronrod;
    double error;
};

Panel gk15(const std::function<Complex(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const Complex fc = f(c);
    Complex rk = fc * kWgk[7];
    Complex rg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const Complex f1 = f(c - dx);
        const Complex f2 = f(c + dx);
        rk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
    }
    return {rk * h, std::abs((rk - rg) * h)};
}

Complex adapt(const std::function<Complex(double)>& f, double a, double b, double tol, int depth)
{
    const Panel whole = gk15(f, a, b);
    if (whole.error <= tol || depth <= 0) return whole.kronrod;
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace

Complex integrate_adaptive(const std::function<Complex(double)>& f, double a, double b, double abs_tol,
                           double rel_tol, int max_depth)
{
    if (b <= a) return Complex{0.0, 0.0};
    // Seed the relative tolerance with a coarse panel sweep.
    Complex coarse{0.0, 0.0};
    constexpr int kSeedPanels = 8;
    const double w = (b - a) / kSeedPanels;
    for (int i = 0; i < kSeedPanels; ++i) coarse += gk15(f, a + i * w, a + (i + 1) * w).kronrod;
    const double tol = std::max(abs_tol, rel_tol * std::abs(coarse));
    Complex total{0.0, 0.0};
    for (int i = 0; i < kSeedPanels; ++i) total += adapt(f, a + i * w, a + (i + 1) * w, tol / kSeedPanels, max_depth);
    return total;
}

}  // namespace emprobe
