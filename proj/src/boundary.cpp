#include "emprobe/boundary.hpp"

#include <cmath>
#include <random>

namespace emprobe {

double BoundaryRecord::tangential_residual() const
{
    double worst = 0.0;
    for (std::size_t s = 0; s < sphere.size(); ++s) {
        const Vec3& nu = sphere.normals[s];
        for (std::size_t k = 0; k < time.size(); ++k) {
            const std::size_t c = column(s, k);
            worst = std::max({worst, std::abs(exnu.col(c).dot(nu)), std::abs(t_trace.col(c).dot(nu))});
        }
    }
    return worst;
}

BoundaryRecord record_boundary_data(const SourceModel& source, const MediumParams& medium, const SphereGrid& sphere,
                                    const TimeGrid& time, const ForwardOptions& options)
{
    if (source.support_radius() > sphere.radius)
        throw PreconditionError("source support must lie inside the measurement sphere");
    const double horizon = huygens_horizon(source, medium, sphere.radius);
    if (!(time.horizon > horizon))
        throw PreconditionError("measurement horizon T = " + std::to_string(time.horizon) +
                                " must exceed T0 + 2 sqrt(n) R = " + std::to_string(horizon));
    BoundaryRecord record;
    record.sphere = sphere;
    record.time = time;
    record.medium = medium;
    record.provenance.source_id = source.family;
    const std::size_t nt = time.size();
    record.exnu.setZero(3, static_cast<Eigen::Index>(sphere.size() * nt));
    record.t_trace.setZero(3, static_cast<Eigen::Index>(sphere.size() * nt));
    if (source.is_zero()) return record;
    const RetardedSolver solver(source, medium, options);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(sphere.size()); ++s) {
        std::vector<Vec3> E, C;
        solver.history(sphere.nodes[s], time.nodes, E, C);
        const Vec3& nu = sphere.normals[s];
        for (std::size_t k = 0; k < nt; ++k) {
            const auto col = static_cast<Eigen::Index>(s * nt + k);
            record.exnu.col(col) = E[k].cross(nu);
            record.t_trace.col(col) = C[k].cross(nu);
        }
    }
    return record;
}

double measurement_epsilon(const BoundaryRecord& record)
{
    double acc = 0.0;
    const std::size_t nt = record.time.size();
    for (std::size_t s = 0; s < record.sphere.size(); ++s) {
        double inner = 0.0;
        for (std::size_t k = 0; k < nt; ++k) {
            const auto col = static_cast<Eigen::Index>(s * nt + k);
            inner += record.time.weights[k] * (record.t_trace.col(col).squaredNorm() + record.exnu.col(col).squaredNorm());
        }
        acc += record.sphere.weights[s] * inner;
    }
    return std::sqrt(acc);
}

BoundaryRecord scaled(const BoundaryRecord& record, double factor)
{
    BoundaryRecord out = record;
    out.exnu *= factor;
    out.t_trace *= factor;
    return out;
}

namespace {

void check_compatible(const BoundaryRecord& a, const BoundaryRecord& b)
{
    if (a.exnu.cols() != b.exnu.cols() || a.sphere.size() != b.sphere.size() || a.time.size() != b.time.size())
        throw PreconditionError("records live on different grids");
}

}  // namespace

BoundaryRecord difference(const BoundaryRecord& a, const BoundaryRecord& b)
{
    check_compatible(a, b);
    BoundaryRecord out = a;
    out.exnu -= b.exnu;
    out.t_trace -= b.t_trace;
    return out;
}

BoundaryRecord sum(const BoundaryRecord& a, const BoundaryRecord& b)
{
    check_compatible(a, b);
    BoundaryRecord out = a;
    out.exnu += b.exnu;
    out.t_trace += b.t_trace;
    return out;
}

BoundaryRecord add_noise(const BoundaryRecord& record, const NoiseSpec& spec)
{
    if (!(spec.target_epsilon > 0.0)) throw PreconditionError("noise target epsilon must be positive");
    BoundaryRecord noise = record;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t nt = record.time.size();
    // Sequential draw keeps the realization independent of the thread count.
    for (std::size_t s = 0; s < record.sphere.size(); ++s) {
        const Vec3& nu = record.sphere.normals[s];
        for (std::size_t k = 0; k < nt; ++k) {
            const auto col = static_cast<Eigen::Index>(s * nt + k);
            Vec3 a(normal(rng), normal(rng), normal(rng));
            Vec3 b(normal(rng), normal(rng), normal(rng));
            noise.exnu.col(col) = a - a.dot(nu) * nu;
            noise.t_trace.col(col) = b - b.dot(nu) * nu;
        }
    }
    const double eps = measurement_epsilon(noise);
    BoundaryRecord out = sum(record, scaled(noise, spec.target_epsilon / eps));
    out.provenance.noise_seed = spec.seed;
    out.provenance.noise_level = spec.target_epsilon;
    return out;
}

double RecordFamily::epsilon() const
{
    double worst = 0.0;
    for (const auto& r : records) worst = std::max(worst, measurement_epsilon(r));
    return worst;
}

RecordFamily record_family(const SourceModel& source, double band, const std::vector<double>& n_values,
                           const SphereGrid& sphere, double horizon_margin, int time_count,
                           const ForwardOptions& options)
{
    RecordFamily family;
    family.band = band;
    family.n_values = n_values;
    for (double n : n_values) {
        const MediumParams medium = make_medium(n);
        const double horizon = huygens_horizon(source, medium, sphere.radius) + horizon_margin;
        family.records.push_back(record_boundary_data(source, medium, sphere, make_time_grid(horizon, time_count), options));
    }
    return family;
}

}  // namespace emprobe
