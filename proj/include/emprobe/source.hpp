#pragma once

#include "emprobe/profile.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace emprobe {

enum class SourceKind { IP1_separable, IP2_general, IP3_x3_separable };

std::string to_string(SourceKind kind);

/// Ring current h(y) = grad phi(|y - c|) x a, switched on by its own pulse.
struct CurlBumpTerm {
    RadialBump profile;
    Vec3 centre = Vec3::Zero();
    Vec3 axis = Vec3::UnitZ();
    Pulse pulse;
};

/// In-plane current (d2 chi, -d1 chi, 0) with chi radial about `centre` in (x1, x2).
struct PlanarCurlTerm {
    RadialBump profile;
    Eigen::Vector2d centre = Eigen::Vector2d::Zero();
    Pulse pulse;
};

/// Closed-form divergence-free source F(x, t) = sum_m h_m(x) tau_m(t). For
/// the x3-separable family every h_m carries the common axial factor g(x3).
class SourceModel {
public:
    SourceKind kind = SourceKind::IP1_separable;
    std::string family;
    bool divergence_free = true;
    std::vector<CurlBumpTerm> bumps;
    std::vector<PlanarCurlTerm> planar;
    RadialBump axial;  // g(x3), used by the planar terms only

    /// Declared radius of a ball about the origin containing the spatial support.
    double support_radius() const;
    /// Declared duration T0: every pulse vanishes outside (0, T0).
    double duration() const;
    /// Axis-aligned box containing the spatial support.
    std::pair<Vec3, Vec3> support_box() const;
    bool is_zero() const;

    Vec3 operator()(const Vec3& x, double t) const;

    std::size_t term_count() const { return bumps.size() + planar.size(); }
    Vec3 term_spatial(std::size_t m, const Vec3& y) const;
    Vec3 term_centre(std::size_t m) const;
    double term_radius(std::size_t m) const;
    const Pulse& term_pulse(std::size_t m) const;
    /// True when h_m is the gradient-cross form of a radial profile, which a
    /// low-order azimuthal rule integrates exactly on spheres about the centre.
    bool term_is_radial(std::size_t m) const { return m < bumps.size(); }

    /// Spatial factor f of an IP1 source F = f g (all pulses shared).
    Vec3 spatial(const Vec3& x) const;
    /// Shared time profile g of an IP1 source.
    const Pulse& time_profile() const;

    /// 3D transform of h_m; xi may be complex for the gradient-cross terms.
    Vec3c term_spectrum(std::size_t m, const Vec3c& xi) const;
    /// 2D transform of the in-plane part of planar term j (no axial factor).
    Vec3c planar_term_spectrum(std::size_t j, double xi1, double xi2) const;

    /// Closed-form f^(xi) of the spatial factor; xi may be complex.
    Vec3c spatial_spectrum(const Vec3c& xi) const;
    /// Closed-form F^(xi, omega) = (2 pi)^{-2} int F exp(-i(xi.x + omega t)).
    Vec3c spacetime_spectrum(const Vec3& xi, double omega) const;
    /// Closed-form f^(xi1, xi2, omega) of the in-plane factor of an IP3 source.
    Vec3c planar_spectrum(double xi1, double xi2, double omega) const;
    /// g^(xi3) of the axial factor.
    Complex axial_spectrum(double xi3) const;
    /// In-plane factor f(x1, x2, t) of an IP3 source.
    Vec3 planar_field(double x1, double x2, double t) const;
};

struct GaussianCurlParams {
    double amplitude = 1.0;
    double radius = 0.5;
    double sigma = 0.5 / 3.5;
    int window_power = 6;
    Vec3 axis = Vec3::UnitZ();
    Pulse pulse;
};

SourceModel gaussian_curl(const GaussianCurlParams& params);
SourceModel ring_current(std::vector<CurlBumpTerm> loops);
SourceModel separable_x3(std::vector<PlanarCurlTerm> terms, const RadialBump& axial);
SourceModel zero_source();

/// Maximum central-difference divergence over random interior points.
double divergence_probe(const SourceModel& source, int points, std::uint64_t seed, double h = 1e-5);

}  // namespace emprobe
