#pragma once

#include "emprobe/core.hpp"

#include <functional>
#include <vector>

namespace emprobe {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule with `count` nodes mapped to [a, b].
Rule1D gauss_legendre(int count, double a = -1.0, double b = 1.0);

/// Composite Simpson rule on `count` uniform nodes spanning [a, b]. An odd
/// number of intervals is closed with a Simpson 3/8 panel.
Rule1D composite_simpson(int count, double a, double b);

/// Sphere of radius R sampled by a polar Gauss-Legendre x azimuthal trapezoid
/// product rule. Node (i, j) has polar index i and azimuth index j and is
/// stored at i * azimuth_count + j.
struct SphereGrid {
    double radius = 1.0;
    int polar_count = 0;
    int azimuth_count = 0;
    std::vector<Vec3> nodes;    // points on |x| = R
    std::vector<Vec3> normals;  // outward unit normals
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double area() const;
    /// Index of the antipodal node; requires an even azimuth count.
    std::size_t antipode(std::size_t index) const;
};

SphereGrid make_sphere_grid(double radius, int polar_count = 32, int azimuth_count = 64);

struct TimeGrid {
    double horizon = 0.0;
    int count = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

TimeGrid make_time_grid(double horizon, int count = 512);

/// Adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand.
Complex integrate_adaptive(const std::function<Complex(double)>& f, double a, double b,
                           double abs_tol = 1e-14, double rel_tol = 1e-13, int max_depth = 40);

/// Deterministic ordered sum (no reassociation by the caller's threading).
template <typename T>
T ordered_sum(const std::vector<T>& values, T zero = T(0))
{
    T acc = zero;
    for (const auto& v : values) acc += v;
    return acc;
}

}  // namespace emprobe
