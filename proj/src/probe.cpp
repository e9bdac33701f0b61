#include "emprobe/probe.hpp"

#include <cmath>

namespace emprobe {

MediumParams make_medium(double n)
{
    if (!(n > 0.0) || !std::isfinite(n)) throw PreconditionError("medium parameter n must be positive");
    return MediumParams{n, 1.0 / std::sqrt(n)};
}

Vec3 polarization_for(const Vec3& d)
{
    // Azimuthal unit vector; smooth in polar coordinates away from the poles.
    const Vec3 e = Vec3::UnitZ().cross(d);
    if (e.norm() > 1e-6) return e.normalized();
    return Vec3::UnitX().cross(d).normalized();
}

PolarizationProbe make_probe(const Vec3& d, double omega, const MediumParams& medium)
{
    if (!d.allFinite() || std::abs(d.norm() - 1.0) > 1e-10) throw InvalidDirectionError("probe direction must be a unit vector");
    if (!(omega >= 0.0)) throw PreconditionError("probe frequency must be nonnegative");
    PolarizationProbe probe;
    probe.d = d.normalized();
    probe.p = polarization_for(probe.d);
    probe.q = probe.d.cross(probe.p);
    probe.omega = omega;
    probe.kappa = medium.sqrt_n() * omega;
    return probe;
}

PolarizationProbe conjugate(const PolarizationProbe& probe)
{
    PolarizationProbe c = probe;
    c.d = -probe.d;
    c.q = c.d.cross(c.p);
    c.omega = -probe.omega;
    return c;
}

PolarizationProbe swap_polarization(const PolarizationProbe& probe)
{
    PolarizationProbe s = probe;
    s.p = probe.q;
    s.q = -probe.p;
    return s;
}

}  // namespace emprobe
