#include "emprobe/fourier_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emprobe {

namespace {

std::vector<double> midpoints(double lo, double h, int count)
{
    std::vector<double> x(count);
    for (int i = 0; i < count; ++i) x[i] = lo + (i + 0.5) * h;
    return x;
}

template <typename Scalar>
std::vector<Complex> phases(Scalar xi, const std::vector<double>& x)
{
    std::vector<Complex> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(-kI * (xi * x[i]));
    return out;
}

// sum_{ijk} a_i b_j c_k v_{ijk} over a cubic table.
Vec3c contract(const std::vector<Vec3>& v, int n, const std::vector<Complex>& a, const std::vector<Complex>& b,
               const std::vector<Complex>& c)
{
    Vec3c total = Vec3c::Zero();
    for (int i = 0; i < n; ++i) {
        Vec3c plane = Vec3c::Zero();
        for (int j = 0; j < n; ++j) {
            const Vec3* row = v.data() + (static_cast<std::size_t>(i) * n + j) * n;
            Complex sx{0.0, 0.0}, sy{0.0, 0.0}, sz{0.0, 0.0};
            for (int k = 0; k < n; ++k) {
                sx += c[k] * row[k].x();
                sy += c[k] * row[k].y();
                sz += c[k] * row[k].z();
            }
            plane += b[j] * Vec3c(sx, sy, sz);
        }
        total += a[i] * plane;
    }
    return total;
}

std::pair<double, double> time_window(const SourceModel& source)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t m = 0; m < source.term_count(); ++m) {
        lo = std::min(lo, source.term_pulse(m).lo);
        hi = std::max(hi, source.term_pulse(m).hi);
    }
    if (!(hi > lo)) return {0.0, 1.0};
    return {lo, hi};
}

}  // namespace

DirectFourierOracle::DirectFourierOracle(const SourceModel& source, OracleOptions options)
    : source_(source), options_(options)
{
    if (options_.resolution < 2 || options_.refined_resolution < 2) throw PreconditionError("oracle resolution too small");
}

const DirectFourierOracle::Table& DirectFourierOracle::spatial_table(int resolution) const
{
    for (const auto& t : tables_)
        if (t.count == resolution) return t;
    Table table;
    table.count = resolution;
    const auto [lo, hi] = source_.support_box();
    table.lo = lo;
    table.h = (hi - lo) / resolution;
    table.values.resize(static_cast<std::size_t>(resolution) * resolution * resolution);
    const auto xs = midpoints(lo.x(), table.h.x(), resolution);
    const auto ys = midpoints(lo.y(), table.h.y(), resolution);
    const auto zs = midpoints(lo.z(), table.h.z(), resolution);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j)
            for (int k = 0; k < resolution; ++k)
                table.values[(static_cast<std::size_t>(i) * resolution + j) * resolution + k] =
                    source_.spatial(Vec3(xs[i], ys[j], zs[k]));
    tables_.push_back(std::move(table));
    return tables_.back();
}

std::vector<Vec3c> DirectFourierOracle::spatial_raw(const std::vector<Vec3c>& xis, int resolution) const
{
    const Table& table = spatial_table(resolution);
    const auto xs = midpoints(table.lo.x(), table.h.x(), resolution);
    const auto ys = midpoints(table.lo.y(), table.h.y(), resolution);
    const auto zs = midpoints(table.lo.z(), table.h.z(), resolution);
    const double cell = table.h.prod();
    std::vector<Vec3c> out(xis.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(xis.size()); ++q) {
        const Vec3c& xi = xis[q];
        out[q] = (kNorm3 * cell) * contract(table.values, resolution, phases(xi.x(), xs), phases(xi.y(), ys),
                                            phases(xi.z(), zs));
    }
    return out;
}

double DirectFourierOracle::spatial_scale() const
{
    const Table& table = spatial_table(options_.refined_resolution);
    double acc = 0.0;
    for (const auto& v : table.values) acc += v.norm();
    return kNorm3 * table.h.prod() * acc;
}

std::vector<OracleValue> DirectFourierOracle::finish(const std::vector<Vec3c>& coarse, const std::vector<Vec3c>& fine,
                                                     double scale) const
{
    std::vector<OracleValue> out(fine.size());
    for (std::size_t q = 0; q < fine.size(); ++q) {
        out[q].value = fine[q];
        out[q].error_estimate = (fine[q] - coarse[q]).norm();
        if (options_.check) {
            const double ref = std::max(fine[q].norm(), scale);
            if (out[q].error_estimate > options_.tolerance * ref)
                throw AccuracyError("direct Fourier oracle: refinement estimate " + std::to_string(out[q].error_estimate) +
                                    " exceeds tolerance; raise the resolution");
        }
    }
    return out;
}

OracleValue DirectFourierOracle::spatial(const Vec3c& xi) const { return spatial(std::vector<Vec3c>{xi}).front(); }

std::vector<OracleValue> DirectFourierOracle::spatial(const std::vector<Vec3c>& xis) const
{
    const auto fine = spatial_raw(xis, options_.refined_resolution);
    const auto coarse = spatial_raw(xis, options_.resolution);
    return finish(coarse, fine, spatial_scale());
}

std::vector<Vec3c> DirectFourierOracle::spatial_tensor(const std::vector<double>& kx, const std::vector<double>& ky,
                                                       const std::vector<double>& kz, int resolution) const
{
    const Table& table = spatial_table(resolution);
    const int n = resolution;
    const auto xs = midpoints(table.lo.x(), table.h.x(), n);
    const auto ys = midpoints(table.lo.y(), table.h.y(), n);
    const auto zs = midpoints(table.lo.z(), table.h.z(), n);
    const std::size_t nx = kx.size(), ny = ky.size(), nz = kz.size();
    // Contract z, then y, then x: cost n^3 nz + n^2 nz ny + n nz ny nx.
    std::vector<Vec3c> s1(static_cast<std::size_t>(n) * n * nz);
    std::vector<std::vector<Complex>> pz(nz), py(ny), px(nx);
    for (std::size_t c = 0; c < nz; ++c) pz[c] = phases(kz[c], zs);
    for (std::size_t b = 0; b < ny; ++b) py[b] = phases(ky[b], ys);
    for (std::size_t a = 0; a < nx; ++a) px[a] = phases(kx[a], xs);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec3* row = table.values.data() + (static_cast<std::size_t>(i) * n + j) * n;
            for (std::size_t c = 0; c < nz; ++c) {
                Vec3c acc = Vec3c::Zero();
                for (int k = 0; k < n; ++k) acc += pz[c][k] * row[k].cast<Complex>();
                s1[(static_cast<std::size_t>(i) * n + j) * nz + c] = acc;
            }
        }
    std::vector<Vec3c> s2(static_cast<std::size_t>(n) * ny * nz);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (std::size_t b = 0; b < ny; ++b)
            for (std::size_t c = 0; c < nz; ++c) {
                Vec3c acc = Vec3c::Zero();
                for (int j = 0; j < n; ++j) acc += py[b][j] * s1[(static_cast<std::size_t>(i) * n + j) * nz + c];
                s2[(i * ny + b) * nz + c] = acc;
            }
    std::vector<Vec3c> out(nx * ny * nz);
    const double norm = kNorm3 * table.h.prod();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(nx); ++a)
        for (std::size_t b = 0; b < ny; ++b)
            for (std::size_t c = 0; c < nz; ++c) {
                Vec3c acc = Vec3c::Zero();
                for (int i = 0; i < n; ++i) acc += px[a][i] * s2[(i * ny + b) * nz + c];
                out[(a * ny + b) * nz + c] = norm * acc;
            }
    return out;
}

std::vector<Vec3c> DirectFourierOracle::spacetime_raw(const std::vector<Vec3>& xis, const std::vector<double>& omegas,
                                                      int resolution) const
{
    const int n = resolution;
    const auto [lo, hi] = source_.support_box();
    const Vec3 h = (hi - lo) / n;
    const auto [t_lo, t_hi] = time_window(source_);
    const double ht = (t_hi - t_lo) / n;
    const auto xs = midpoints(lo.x(), h.x(), n);
    const auto ys = midpoints(lo.y(), h.y(), n);
    const auto zs = midpoints(lo.z(), h.z(), n);
    const auto ts = midpoints(t_lo, ht, n);
    const std::size_t count = xis.size();
    std::vector<std::vector<Complex>> px(count), py(count), pz(count);
    for (std::size_t q = 0; q < count; ++q) {
        px[q] = phases(xis[q].x(), xs);
        py[q] = phases(xis[q].y(), ys);
        pz[q] = phases(xis[q].z(), zs);
    }
    std::vector<Vec3c> acc(count, Vec3c::Zero());
    std::vector<Vec3> slice(static_cast<std::size_t>(n) * n * n);
    for (int l = 0; l < n; ++l) {
        const double t = ts[l];
        bool active = false;
        for (std::size_t m = 0; m < source_.term_count(); ++m) active = active || source_.term_pulse(m)(t) != 0.0;
        if (!active) continue;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    slice[(static_cast<std::size_t>(i) * n + j) * n + k] = source_(Vec3(xs[i], ys[j], zs[k]), t);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(count); ++q)
            acc[q] += std::exp(-kI * (omegas[q] * t)) * contract(slice, n, px[q], py[q], pz[q]);
    }
    const double norm = kNorm4 * h.prod() * ht;
    for (auto& v : acc) v *= norm;
    return acc;
}

std::vector<OracleValue> DirectFourierOracle::spacetime(const std::vector<Vec3>& xis,
                                                        const std::vector<double>& omegas) const
{
    if (xis.size() != omegas.size()) throw PreconditionError("spacetime oracle: node and frequency counts differ");
    const auto fine = spacetime_raw(xis, omegas, options_.refined_resolution);
    const auto coarse = spacetime_raw(xis, omegas, options_.resolution);
    // Scale: (2 pi)^{-2} int int |F| on a coarse grid.
    const auto [lo, hi] = source_.support_box();
    const auto [t_lo, t_hi] = time_window(source_);
    const int coarse_n = std::max(8, options_.refined_resolution / 4);
    const Vec3 hc = (hi - lo) / coarse_n;
    const double htc = (t_hi - t_lo) / coarse_n;
    double mass = 0.0;
    for (int l = 0; l < coarse_n; ++l)
        for (int i = 0; i < coarse_n; ++i)
            for (int j = 0; j < coarse_n; ++j)
                for (int k = 0; k < coarse_n; ++k)
                    mass += source_(lo + Vec3((i + 0.5) * hc.x(), (j + 0.5) * hc.y(), (k + 0.5) * hc.z()),
                                    t_lo + (l + 0.5) * htc)
                                .norm();
    return finish(coarse, fine, kNorm4 * hc.prod() * htc * mass);
}

std::vector<Vec3c> DirectFourierOracle::planar_raw(const std::vector<Vec3>& nodes, int resolution) const
{
    const int n = resolution;
    const auto [lo, hi] = source_.support_box();
    const auto [t_lo, t_hi] = time_window(source_);
    const double h1 = (hi.x() - lo.x()) / n, h2 = (hi.y() - lo.y()) / n, ht = (t_hi - t_lo) / n;
    const auto xs = midpoints(lo.x(), h1, n);
    const auto ys = midpoints(lo.y(), h2, n);
    const auto ts = midpoints(t_lo, ht, n);
    std::vector<Vec3> table(static_cast<std::size_t>(n) * n * n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                table[(static_cast<std::size_t>(i) * n + j) * n + l] = source_.planar_field(xs[i], ys[j], ts[l]);
    std::vector<Vec3c> out(nodes.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(nodes.size()); ++q)
        out[q] = (kNorm3 * h1 * h2 * ht) *
                 contract(table, n, phases(nodes[q].x(), xs), phases(nodes[q].y(), ys), phases(nodes[q].z(), ts));
    return out;
}

std::vector<OracleValue> DirectFourierOracle::planar(const std::vector<Vec3>& nodes) const
{
    const auto fine = planar_raw(nodes, options_.refined_resolution);
    const auto coarse = planar_raw(nodes, options_.resolution);
    const int n = std::max(8, options_.refined_resolution / 2);
    const auto [lo, hi] = source_.support_box();
    const auto [t_lo, t_hi] = time_window(source_);
    const double h1 = (hi.x() - lo.x()) / n, h2 = (hi.y() - lo.y()) / n, ht = (t_hi - t_lo) / n;
    double mass = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
                mass += source_.planar_field(lo.x() + (i + 0.5) * h1, lo.y() + (j + 0.5) * h2, t_lo + (l + 0.5) * ht).norm();
    return finish(coarse, fine, kNorm3 * h1 * h2 * ht * mass);
}

OracleValue direct_fourier_oracle(const SourceModel& source, const Vec3c& xi, OracleOptions options)
{
    return DirectFourierOracle(source, options).spatial(xi);
}

OracleValue direct_fourier_oracle(const SourceModel& source, const Vec3& xi, double omega, OracleOptions options)
{
    return DirectFourierOracle(source, options).spacetime({xi}, {omega}).front();
}

}  // namespace emprobe
