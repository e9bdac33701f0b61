#pragma once

#include "emprobe/probe.hpp"
#include "emprobe/source.hpp"

#include <cstdint>
#include <vector>

namespace emprobe {

/// p exp(-i(kappa x.d + omega t)).
Vec3c plane_wave_field(const PolarizationProbe& probe, const Vec3& x, double t);
/// -i kappa (d x p) exp(-i(kappa x.d + omega t)).
Vec3c curl_plane_wave(const PolarizationProbe& probe, const Vec3& x, double t);

struct FieldSample {
    Vec3 position = Vec3::Zero();
    double time = 0.0;
    Vec3 E = Vec3::Zero();
    Vec3 curlE = Vec3::Zero();
};

struct ForwardOptions {
    /// Gauss-Legendre nodes across the part of a sphere |y - x| = rho inside a term's support.
    int cap_polar = 24;
    /// Azimuthal trapezoid nodes; 0 selects 6 for radial terms and 32 otherwise.
    int cap_azimuth = 0;
    /// Gauss-Legendre nodes in rho: rho_min + rho_density * (panel length / resolved width).
    int rho_min = 16;
    double rho_density = 8.0;
};

/// Retarded-potential evaluation in spherical shells about the observation
/// point, E = (1/4 pi) int rho d rho int F(x + rho w, t - sqrt(n) rho) dw, and
/// curl E = (1/4 pi) int d rho int w x [F + sqrt(n) rho dF/dt] dw. Only the
/// caps of each shell inside a term's support ball are integrated.
class RetardedSolver {
public:
    RetardedSolver(const SourceModel& source, const MediumParams& medium, ForwardOptions options = {});

    FieldSample sample(const Vec3& x, double t) const;
    Vec3 field(const Vec3& x, double t) const { return sample(x, t).E; }
    Vec3 curl(const Vec3& x, double t) const { return sample(x, t).curlE; }

    /// E and curl E at one point for a list of times (shell weights shared across times).
    void history(const Vec3& x, const std::vector<double>& times, std::vector<Vec3>& E, std::vector<Vec3>& curlE) const;

    const SourceModel& source() const { return source_; }
    const MediumParams& medium() const { return medium_; }

private:
    SourceModel source_;
    MediumParams medium_;
    ForwardOptions options_;
};

Vec3 retarded_field(const SourceModel& source, const MediumParams& medium, const Vec3& x, double t,
                    const ForwardOptions& options = {});
Vec3 retarded_curl(const SourceModel& source, const MediumParams& medium, const Vec3& x, double t,
                   const ForwardOptions& options = {});

/// T0 + 2 sqrt(n) R, after which E vanishes inside B_R.
double huygens_horizon(const SourceModel& source, const MediumParams& medium, double radius);

/// max |E(x, t)| over the points. `radius` defaults to the largest of the
/// point norms and the source support radius.
double huygens_residual(const SourceModel& source, const MediumParams& medium, const std::vector<Vec3>& points,
                        double t, double radius = 0.0, const ForwardOptions& options = {});

struct HuygensReport {
    double time = 0.0;      // T0 + 2 sqrt(n) R + margin
    double residual = 0.0;  // max |E| over the points at `time`
    double peak = 0.0;      // max |E| over the points on a time grid of (0, T0 + 2 sqrt(n) R)
    double relative() const { return peak > 0.0 ? residual / peak : residual; }
};

/// Uniform random points in B_R, checked at T0 + 2 sqrt(n) R + margin.
HuygensReport huygens_check(const SourceModel& source, const MediumParams& medium, double R, int points = 100,
                            std::uint64_t seed = 0, double margin = 0.5, int peak_times = 64,
                            const ForwardOptions& options = {});

}  // namespace emprobe
