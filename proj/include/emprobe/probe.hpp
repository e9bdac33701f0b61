#pragma once

#include "emprobe/core.hpp"

namespace emprobe {

struct MediumParams {
    double n = 1.0;
    double wave_speed = 1.0;

    double sqrt_n() const { return std::sqrt(n); }
};

MediumParams make_medium(double n);

/// Plane-wave probe E^inc = p exp(-i(kappa x.d + omega t)) with q = d x p.
struct PolarizationProbe {
    Vec3 d = Vec3::UnitZ();
    Vec3 p = Vec3::UnitX();
    Vec3 q = Vec3::UnitY();
    double omega = 0.0;
    double kappa = 0.0;

    Vec3 wavevector() const { return kappa * d; }
};

/// Deterministic polarization orthogonal to a unit direction.
Vec3 polarization_for(const Vec3& d);

PolarizationProbe make_probe(const Vec3& d, double omega, const MediumParams& medium);

/// Probe whose plane wave is the complex conjugate of `probe`'s: d -> -d,
/// omega -> -omega, same p.
PolarizationProbe conjugate(const PolarizationProbe& probe);

/// Probe with polarization roles exchanged (p' = q, q' = -p). Probing with it
/// recovers the q-component.
PolarizationProbe swap_polarization(const PolarizationProbe& probe);

template <typename Derived>
Complex plane_wave_phase(const PolarizationProbe& probe, const Eigen::MatrixBase<Derived>& x, double t)
{
    return std::exp(-kI * (probe.kappa * probe.d.dot(x) + probe.omega * t));
}

}  // namespace emprobe
