#include "emprobe/spectral_nodes.hpp"

#include "emprobe/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace emprobe {

std::string to_string(RegionTag tag)
{
    switch (tag) {
    case RegionTag::IP1_ball: return "IP1_ball";
    case RegionTag::IP2_Eb: return "IP2_Eb";
    case RegionTag::IP3_Eb: return "IP3_Eb";
    }
    return "?";
}

double SpectralNodeSet::region_residual() const
{
    double worst = 0.0;
    for (const auto& node : nodes) {
        const auto& pr = node.probe;
        const Vec3 xi = node.xi();
        const double om = std::abs(pr.omega);
        const double scale = std::max(1.0, node.n * om * om);
        switch (region) {
        case RegionTag::IP1_ball:
            worst = std::max(worst, std::max(0.0, xi.norm() - std::sqrt(node.n) * band));
            worst = std::max(worst, std::abs(xi.squaredNorm() - node.n * om * om) / scale);
            break;
        case RegionTag::IP2_Eb:
            worst = std::max(worst, std::abs(xi.squaredNorm() - node.n * om * om) / scale);
            if (!(om < band) || !(node.n > 0.0 && node.n < band * band)) worst = std::max(worst, 1.0);
            break;
        case RegionTag::IP3_Eb:
            worst = std::max(worst, std::abs(node.n * om * om - xi.x() * xi.x() - xi.y() * xi.y() - xi.z() * xi.z()) / scale);
            if (om > band / std::sqrt(node.n) * (1.0 + 1e-14) || std::abs(xi.z()) > band * (1.0 + 1e-14))
                worst = std::max(worst, 1.0);
            break;
        }
    }
    return worst;
}

SpectralNodeSet make_ball_nodes(double b, const MediumParams& medium, int polar, int radial)
{
    if (!(b > 0.0)) throw PreconditionError("band must be positive");
    const SphereGrid dirs = make_sphere_grid(1.0, polar, 2 * polar);
    const Rule1D omegas = gauss_legendre(radial, 0.0, b);
    SpectralNodeSet set;
    set.region = RegionTag::IP1_ball;
    set.band = b;
    set.nodes.reserve(dirs.size() * omegas.size());
    const double n32 = medium.n * medium.sqrt_n();
    for (std::size_t s = 0; s < dirs.size(); ++s) {
        const std::size_t anti = dirs.antipode(s);
        for (std::size_t k = 0; k < omegas.size(); ++k) {
            SpectralNode node;
            const double om = omegas.nodes[k];
            node.probe = make_probe(dirs.normals[s], om, medium);
            node.weight = dirs.weights[s] * omegas.weights[k] * n32 * om * om;
            node.n = medium.n;
            node.mirror = anti * omegas.size() + k;
            node.primary = s * omegas.size() + k <= node.mirror;
            set.nodes.push_back(node);
        }
    }
    return set;
}

std::vector<double> ip2_n_grid(double b, int count)
{
    if (!(b * b > 0.05)) throw PreconditionError("n-grid needs b^2 > 0.05");
    if (count < 1) throw PreconditionError("n-grid count must be positive");
    const double lo = std::log(0.05);
    const double step = (std::log(b * b) - lo) / count;
    std::vector<double> grid(count);
    for (int k = 0; k < count; ++k) grid[k] = std::exp(lo + (k + 0.5) * step);
    return grid;
}

SpectralNodeSet make_ip2_nodes(double b, const std::vector<double>& n_grid, int polar, int radial)
{
    if (n_grid.empty()) throw PreconditionError("IP2 node set needs a nonempty n-grid");
    const SphereGrid dirs = make_sphere_grid(1.0, polar, 2 * polar);
    const Rule1D omegas = gauss_legendre(radial, 0.0, b);
    // d(ln n) weight of a log-midpoint grid, inferred from the grid spacing.
    const double step = n_grid.size() > 1 ? std::log(n_grid[1] / n_grid[0]) : std::log(b * b / 0.05);
    SpectralNodeSet set;
    set.region = RegionTag::IP2_Eb;
    set.band = b;
    for (double n : n_grid) {
        const MediumParams medium = make_medium(n);
        for (std::size_t s = 0; s < dirs.size(); ++s)
            for (std::size_t k = 0; k < omegas.size(); ++k) {
                SpectralNode node;
                const double om = omegas.nodes[k];
                node.probe = make_probe(dirs.normals[s], om, medium);
                node.n = n;
                // d xi d omega = (sqrt(n) |omega|^3 / 2) dn dOmega d omega; doubled for omega < 0.
                node.weight = 2.0 * (step * n) * dirs.weights[s] * omegas.weights[k] * 0.5 * std::sqrt(n) * om * om * om;
                node.mirror = set.nodes.size();
                set.nodes.push_back(node);
            }
    }
    return set;
}

SpectralNodeSet make_ip3_nodes(double b, const MediumParams& medium, int radial, int angular, int omega_count)
{
    if (!(b > 0.0)) throw PreconditionError("band must be positive");
    const double sn = medium.sqrt_n();
    const Rule1D omegas = gauss_legendre(omega_count, 0.0, b / sn);
    const Rule1D unit = gauss_legendre(radial, 0.0, 1.0);
    const double dtheta = kTwoPi / angular;
    SpectralNodeSet set;
    set.region = RegionTag::IP3_Eb;
    set.band = b;
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double om = omegas.nodes[k];
        const double kappa = sn * om;
        for (std::size_t r = 0; r < unit.size(); ++r) {
            const double rho = kappa * unit.nodes[r];
            const double xi3 = std::sqrt(std::max(0.0, kappa * kappa - rho * rho));
            for (int a = 0; a < angular; ++a) {
                const double th = dtheta * a;
                Vec3 d(rho * std::cos(th), rho * std::sin(th), xi3);
                d /= kappa;
                SpectralNode node;
                node.probe = make_probe(d.normalized(), om, medium);
                node.n = medium.n;
                node.weight = 2.0 * omegas.weights[k] * (kappa * unit.weights[r]) * rho * dtheta;
                node.mirror = set.nodes.size();
                set.nodes.push_back(node);
            }
        }
    }
    return set;
}

}  // namespace emprobe
