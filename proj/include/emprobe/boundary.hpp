#pragma once

#include "emprobe/forward.hpp"
#include "emprobe/quadrature.hpp"

#include <cstdint>
#include <string>

namespace emprobe {

struct Provenance {
    std::string source_id;
    std::uint64_t noise_seed = 0;
    double noise_level = 0.0;
};

/// Tangential traces on the sphere x time grid. Column s * time.size() + k
/// holds node s at time k.
struct BoundaryRecord {
    SphereGrid sphere;
    TimeGrid time;
    MediumParams medium;
    Eigen::Matrix3Xd exnu;     // E x nu
    Eigen::Matrix3Xd t_trace;  // (curl E) x nu
    Provenance provenance;

    std::size_t column(std::size_t node, std::size_t k) const { return node * time.size() + k; }
    /// Largest |v . nu| over both traces.
    double tangential_residual() const;
};

struct NoiseSpec {
    double target_epsilon = 0.0;
    std::uint64_t seed = 0;
};

/// Rejects horizons T <= T0 + 2 sqrt(n) R and sources reaching outside B_R.
BoundaryRecord record_boundary_data(const SourceModel& source, const MediumParams& medium, const SphereGrid& sphere,
                                    const TimeGrid& time, const ForwardOptions& options = {});

/// (int_0^T int_{dB_R} |T(E x nu)|^2 + |E x nu|^2)^{1/2} by the grid rules.
double measurement_epsilon(const BoundaryRecord& record);

/// Tangential Gaussian noise rescaled so that epsilon(noisy - clean) hits the target.
BoundaryRecord add_noise(const BoundaryRecord& record, const NoiseSpec& spec);

BoundaryRecord scaled(const BoundaryRecord& record, double factor);
BoundaryRecord difference(const BoundaryRecord& a, const BoundaryRecord& b);
BoundaryRecord sum(const BoundaryRecord& a, const BoundaryRecord& b);

/// Records of one source for a grid of media n (the IP2 data).
struct RecordFamily {
    double band = 0.0;
    std::vector<double> n_values;
    std::vector<BoundaryRecord> records;

    /// sup over the n-grid of the per-record epsilon.
    double epsilon() const;
};

RecordFamily record_family(const SourceModel& source, double band, const std::vector<double>& n_values,
                           const SphereGrid& sphere, double horizon_margin, int time_count,
                           const ForwardOptions& options = {});

}  // namespace emprobe
