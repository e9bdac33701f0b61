#pragma once

#include "emprobe/source.hpp"

#include <deque>
#include <vector>

namespace emprobe {

struct OracleOptions {
    int resolution = 64;
    int refined_resolution = 96;
    /// Relative to max(|value|, (2 pi)^{-d/2} int |F|).
    double tolerance = 1e-8;
    bool check = true;
};

struct OracleValue {
    Vec3c value = Vec3c::Zero();
    double error_estimate = 0.0;
};

/// Brute-force transforms by tensor-product midpoint quadrature over the
/// support box. Field samples are tabulated once per resolution; the phase
/// factors are contracted one axis at a time.
class DirectFourierOracle {
public:
    explicit DirectFourierOracle(const SourceModel& source, OracleOptions options = {});

    /// f^(xi) of an IP1 spatial factor; xi may be complex.
    OracleValue spatial(const Vec3c& xi) const;
    std::vector<OracleValue> spatial(const std::vector<Vec3c>& xis) const;

    /// f^ on the tensor grid xs x ys x zs; entry (a, b, c) at (a * ny + b) * nz + c.
    std::vector<Vec3c> spatial_tensor(const std::vector<double>& xs, const std::vector<double>& ys,
                                      const std::vector<double>& zs, int resolution) const;

    /// F^(xi, omega) in the 4D convention.
    std::vector<OracleValue> spacetime(const std::vector<Vec3>& xis, const std::vector<double>& omegas) const;

    /// f^(xi1, xi2, omega) of the in-plane factor of an IP3 source.
    std::vector<OracleValue> planar(const std::vector<Vec3>& nodes) const;

    /// (2 pi)^{-3/2} int |f|, the scale used by the relative tolerance.
    double spatial_scale() const;
    const OracleOptions& options() const { return options_; }

private:
    struct Table {
        int count = 0;
        Vec3 lo, h;
        std::vector<Vec3> values;  // (i * count + j) * count + k
    };

    const Table& spatial_table(int resolution) const;
    std::vector<Vec3c> spatial_raw(const std::vector<Vec3c>& xis, int resolution) const;
    std::vector<Vec3c> spacetime_raw(const std::vector<Vec3>& xis, const std::vector<double>& omegas,
                                     int resolution) const;
    std::vector<Vec3c> planar_raw(const std::vector<Vec3>& nodes, int resolution) const;
    std::vector<OracleValue> finish(const std::vector<Vec3c>& coarse, const std::vector<Vec3c>& fine,
                                    double scale) const;

    SourceModel source_;
    OracleOptions options_;
    mutable std::deque<Table> tables_;  // lazily filled; not safe to share across threads
};

/// Convenience wrapper for a single point, matching the free-function form.
OracleValue direct_fourier_oracle(const SourceModel& source, const Vec3c& xi, OracleOptions options = {});
OracleValue direct_fourier_oracle(const SourceModel& source, const Vec3& xi, double omega, OracleOptions options = {});

}  // namespace emprobe
