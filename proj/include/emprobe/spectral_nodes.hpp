#pragma once

#include "emprobe/probe.hpp"

#include <string>
#include <vector>

namespace emprobe {

enum class RegionTag { IP1_ball, IP2_Eb, IP3_Eb };

std::string to_string(RegionTag tag);

struct SpectralNode {
    PolarizationProbe probe;
    double weight = 0.0;
    double n = 1.0;          // medium of the dispersion sheet the node sits on
    std::size_t mirror = 0;  // index of the node at -(xi, omega)
    bool primary = true;     // false when the value is filled from its mirror

    /// (xi1, xi2, xi3); for IP3 the third entry is xi3 = kappa d3.
    Vec3 xi() const { return probe.wavevector(); }
};

struct SpectralNodeSet {
    RegionTag region = RegionTag::IP1_ball;
    double band = 0.0;
    std::vector<SpectralNode> nodes;

    std::size_t size() const { return nodes.size(); }
    /// Largest violation of the region's defining relations over all nodes.
    double region_residual() const;
};

/// Ball |xi| <= sqrt(n) b: direction design (polar x 2 polar azimuths) times
/// Gauss-Legendre omega on (0, b), mirrored to -xi.
SpectralNodeSet make_ball_nodes(double b, const MediumParams& medium, int polar = 16, int radial = 24);

/// Log-midpoint grid of `count` values of n in (0.05, b^2).
std::vector<double> ip2_n_grid(double b, int count = 16);

/// Set E_b: dispersion sheets |xi|^2 = n omega^2, |omega| < b, over the n-grid.
SpectralNodeSet make_ip2_nodes(double b, const std::vector<double>& n_grid, int polar = 8, int radial = 12);

/// IP3 set E_b in (xi1, xi2, omega): |xi~| <= sqrt(n) omega, omega <= b / sqrt(n),
/// with xi3 = sqrt(n omega^2 - |xi~|^2).
SpectralNodeSet make_ip3_nodes(double b, const MediumParams& medium, int radial = 16, int angular = 32, int omega_count = 16);

}  // namespace emprobe
