#include "emprobe/inversion.hpp"

#include <cmath>
#include <map>

namespace emprobe {

namespace {

constexpr double kProbeScale = 4.0 * kPi * kPi;  // (2 pi)^2

}  // namespace

ProbingEngine::ProbingEngine(const BoundaryRecord& record) : record_(record) {}

ProbingEngine::Transforms ProbingEngine::transforms(double omega) const
{
    const std::size_t ns = record_.sphere.size();
    const std::size_t nt = record_.time.size();
    std::vector<Complex> kernel(nt);
    for (std::size_t k = 0; k < nt; ++k)
        kernel[k] = record_.time.weights[k] * std::exp(-kI * (omega * record_.time.nodes[k]));
    Transforms tr;
    tr.exnu.setZero(3, static_cast<Eigen::Index>(ns));
    tr.t_trace.setZero(3, static_cast<Eigen::Index>(ns));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(ns); ++s) {
        Vec3c e = Vec3c::Zero();
        Vec3c t = Vec3c::Zero();
        for (std::size_t k = 0; k < nt; ++k) {
            const auto col = static_cast<Eigen::Index>(s * nt + k);
            e += kernel[k] * record_.exnu.col(col).cast<Complex>();
            t += kernel[k] * record_.t_trace.col(col).cast<Complex>();
        }
        tr.exnu.col(s) = e;
        tr.t_trace.col(s) = t;
    }
    return tr;
}

Complex ProbingEngine::contract(const Transforms& tr, const PolarizationProbe& probe) const
{
    const Vec3c p = probe.p.cast<Complex>();
    const Vec3c curl_dir = (-kI * probe.kappa) * probe.d.cross(probe.p).cast<Complex>();
    Complex acc = 0.0;
    for (std::size_t s = 0; s < record_.sphere.size(); ++s) {
        const Complex phase = std::exp(-kI * (probe.kappa * probe.d.dot(record_.sphere.nodes[s])));
        const auto col = static_cast<Eigen::Index>(s);
        acc += record_.sphere.weights[s] * phase * (bdot(p, tr.t_trace.col(col)) + bdot(curl_dir, tr.exnu.col(col)));
    }
    return -acc;
}

Complex ProbingEngine::functional(const PolarizationProbe& probe) const
{
    return contract(transforms(probe.omega), probe);
}

std::vector<Complex> ProbingEngine::functionals(const std::vector<PolarizationProbe>& probes) const
{
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < probes.size(); ++i) groups[probes[i].omega].push_back(i);
    std::vector<Complex> out(probes.size());
    for (const auto& [omega, members] : groups) {
        const Transforms tr = transforms(omega);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(members.size()); ++j)
            out[members[j]] = contract(tr, probes[members[j]]);
    }
    return out;
}

Complex probing_functional(const BoundaryRecord& record, const PolarizationProbe& probe)
{
    return ProbingEngine(record).functional(probe);
}

Complex spectral_sample_ip1(const BoundaryRecord& record, const PolarizationProbe& probe, Complex ghat, double delta_min)
{
    if (std::abs(ghat) < delta_min)
        throw BandwidthViolation("|g^(omega)| = " + std::to_string(std::abs(ghat)) + " below delta_min at omega = " +
                                 std::to_string(probe.omega));
    return probing_functional(record, probe) / (kProbeScale * ghat);
}

Vec3c SpectralSamples::vector(std::size_t i) const
{
    const auto& pr = nodes.nodes[i].probe;
    return p_component[i] * pr.p.cast<Complex>() + q_component[i] * pr.q.cast<Complex>();
}

double SpectralSamples::energy() const
{
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        acc += nodes.nodes[i].weight * (std::norm(p_component[i]) + std::norm(q_component[i]));
    return acc;
}

double SpectralSamples::p_energy() const
{
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += nodes.nodes[i].weight * std::norm(p_component[i]);
    return acc;
}

namespace {

// Evaluates the p- and q-functionals on the primary nodes; the caller divides
// by the temporal/axial spectrum.
void probe_primaries(const ProbingEngine& engine, const SpectralNodeSet& set, std::vector<Complex>& pf,
                     std::vector<Complex>& qf)
{
    std::vector<PolarizationProbe> probes;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (!set.nodes[i].primary) continue;
        probes.push_back(set.nodes[i].probe);
        probes.push_back(swap_polarization(set.nodes[i].probe));
        owner.push_back(i);
    }
    const auto values = engine.functionals(probes);
    pf.assign(set.size(), Complex(0.0));
    qf.assign(set.size(), Complex(0.0));
    for (std::size_t j = 0; j < owner.size(); ++j) {
        pf[owner[j]] = values[2 * j];
        qf[owner[j]] = values[2 * j + 1];
    }
}

}  // namespace

SpectralSamples assemble_spectrum_ip1(const BoundaryRecord& record, const Pulse& g, double b, int directions, int radial,
                                      double delta_min)
{
    const BandwidthCheck check = verify_bandwidth_condition(g, b, delta_min);
    if (!check.holds)
        throw BandwidthViolation("|g^| drops to " + std::to_string(check.min_magnitude) + " at omega = " +
                                 std::to_string(check.worst_omega) + " inside (0, b)");
    SpectralSamples out;
    out.nodes = make_ball_nodes(b, record.medium, directions, radial);
    out.band = b;
    out.problem = ProblemKind::IP1;
    const ProbingEngine engine(record);
    probe_primaries(engine, out.nodes, out.p_component, out.q_component);

    std::map<double, Complex> ghat;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& node = out.nodes.nodes[i];
        if (!node.primary) continue;
        auto it = ghat.find(node.probe.omega);
        if (it == ghat.end()) it = ghat.emplace(node.probe.omega, fourier_time_profile(g, node.probe.omega)).first;
        if (std::abs(it->second) < delta_min)
            throw BandwidthViolation("|g^(omega)| below delta_min at omega = " + std::to_string(node.probe.omega));
        const Complex scale = kProbeScale * it->second;
        out.p_component[i] /= scale;
        out.q_component[i] /= scale;
    }
    // f real: f^(-xi) = conj f^(xi); with p(-d) = -p(d) and q(-d) = q(d).
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& node = out.nodes.nodes[i];
        if (!node.primary || node.mirror == i) continue;
        out.p_component[node.mirror] = -std::conj(out.p_component[i]);
        out.q_component[node.mirror] = std::conj(out.q_component[i]);
    }
    return out;
}

ReconstructionGrid make_reconstruction_grid(double half_width, int count, double mask_radius)
{
    if (count < 1 || !(half_width > 0.0)) throw PreconditionError("reconstruction grid needs count >= 1 and a positive extent");
    ReconstructionGrid grid;
    grid.count = count;
    grid.half_width = half_width;
    grid.spacing = 2.0 * half_width / count;
    grid.cell_volume = grid.spacing * grid.spacing * grid.spacing;
    const auto total = static_cast<std::size_t>(count) * count * count;
    grid.points.reserve(total);
    grid.mask.reserve(total);
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j)
            for (int k = 0; k < count; ++k) {
                const Vec3 x(-half_width + (i + 0.5) * grid.spacing, -half_width + (j + 0.5) * grid.spacing,
                             -half_width + (k + 0.5) * grid.spacing);
                grid.points.push_back(x);
                grid.mask.push_back(mask_radius <= 0.0 || x.norm() <= mask_radius ? 1 : 0);
            }
    return grid;
}

Reconstruction reconstruct_source(const SpectralSamples& samples, const ReconstructionGrid& grid, const SourceModel* reference)
{
    if (samples.problem != ProblemKind::IP1) throw PreconditionError("spatial reconstruction is defined for IP1 samples");
    const int n = grid.count;
    if (grid.points.size() != static_cast<std::size_t>(n) * n * n) throw PreconditionError("reconstruction grid is not a tensor grid");

    // exp(i xi . x) factorizes over the axes of the tensor grid.
    struct Term {
        Vec3c c;
        std::vector<Complex> ex, ey, ez;
    };
    std::vector<Term> terms;
    std::vector<double> axis(n);
    for (int i = 0; i < n; ++i) axis[i] = -grid.half_width + (i + 0.5) * grid.spacing;
    for (std::size_t m = 0; m < samples.size(); ++m) {
        const auto& node = samples.nodes.nodes[m];
        if (!node.primary) continue;
        const double fold = node.mirror == m ? 1.0 : 2.0;
        Term t;
        t.c = (fold * node.weight * kNorm3) * samples.vector(m);
        const Vec3 xi = node.xi();
        t.ex.resize(n);
        t.ey.resize(n);
        t.ez.resize(n);
        for (int i = 0; i < n; ++i) {
            t.ex[i] = std::exp(kI * (xi.x() * axis[i]));
            t.ey[i] = std::exp(kI * (xi.y() * axis[i]));
            t.ez[i] = std::exp(kI * (xi.z() * axis[i]));
        }
        terms.push_back(std::move(t));
    }

    Reconstruction out;
    out.values.setZero(3, static_cast<Eigen::Index>(grid.points.size()));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (const Term& t : terms) {
            for (int j = 0; j < n; ++j) {
                const Complex exy = t.ex[i] * t.ey[j];
                const std::size_t base = (static_cast<std::size_t>(i) * n + j) * n;
                for (int k = 0; k < n; ++k) {
                    const Complex ph = exy * t.ez[k];
                    auto col = out.values.col(static_cast<Eigen::Index>(base + k));
                    for (int a = 0; a < 3; ++a) col(a) += t.c(a).real() * ph.real() - t.c(a).imag() * ph.imag();
                }
            }
        }
    }

    double norm2 = 0.0, err2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        if (!grid.mask[i]) continue;
        const Vec3 v = out.values.col(static_cast<Eigen::Index>(i));
        norm2 += v.squaredNorm();
        if (reference) {
            const Vec3 f = reference->spatial(grid.points[i]);
            err2 += (v - f).squaredNorm();
            ref2 += f.squaredNorm();
        }
    }
    out.l2_norm = std::sqrt(norm2 * grid.cell_volume);
    if (reference) {
        out.l2_error = std::sqrt(err2 * grid.cell_volume);
        out.reference_norm = std::sqrt(ref2 * grid.cell_volume);
    }
    return out;
}

namespace {

std::size_t record_for(const RecordFamily& family, double n)
{
    for (std::size_t i = 0; i < family.records.size(); ++i)
        if (std::abs(family.records[i].medium.n - n) <= 1e-10 * std::max(1.0, n)) return i;
    throw RegionError("no record in the family has n = " + std::to_string(n));
}

}  // namespace

Complex spectral_sample_ip2(const RecordFamily& family, const Vec3& xi, double omega)
{
    if (omega == 0.0 || !(std::abs(omega) < family.band))
        throw RegionError("IP2 samples need 0 < |omega| < b");
    const double k = xi.norm();
    if (k == 0.0) throw RegionError("IP2 samples need xi != 0");
    const double n = k * k / (omega * omega);
    const BoundaryRecord& record = family.records[record_for(family, n)];
    const Vec3 d = xi / k;
    const PolarizationProbe probe =
        omega > 0.0 ? make_probe(d, omega, record.medium) : conjugate(make_probe(-d, -omega, record.medium));
    return probing_functional(record, probe) / kProbeScale;
}

SpectralSamples assemble_spectrum_ip2(const RecordFamily& family, const SpectralNodeSet& nodes)
{
    if (nodes.region != RegionTag::IP2_Eb) throw RegionError("IP2 assembly needs an IP2 node set");
    SpectralSamples out;
    out.nodes = nodes;
    out.band = nodes.band;
    out.problem = ProblemKind::IP2;
    out.p_component.assign(nodes.size(), Complex(0.0));
    out.q_component.assign(nodes.size(), Complex(0.0));
    std::map<std::size_t, SpectralNodeSet> by_record;
    std::map<std::size_t, std::vector<std::size_t>> owners;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::size_t r = record_for(family, nodes.nodes[i].n);
        by_record[r].nodes.push_back(nodes.nodes[i]);
        owners[r].push_back(i);
    }
    for (auto& [r, subset] : by_record) {
        const ProbingEngine engine(family.records[r]);
        std::vector<Complex> pf, qf;
        probe_primaries(engine, subset, pf, qf);
        for (std::size_t j = 0; j < owners[r].size(); ++j) {
            out.p_component[owners[r][j]] = pf[j] / kProbeScale;
            out.q_component[owners[r][j]] = qf[j] / kProbeScale;
        }
    }
    return out;
}

Complex spectral_sample_ip3(const BoundaryRecord& record, const PolarizationProbe& probe, Complex ghat_x3, double b,
                            double delta_min)
{
    const double xi3 = probe.kappa * probe.d.z();
    if (std::abs(xi3) > b * (1.0 + 1e-12)) throw RegionError("IP3 probe has |xi3| > b");
    if (std::abs(ghat_x3) < delta_min)
        throw BandwidthViolation("|g^(xi3)| = " + std::to_string(std::abs(ghat_x3)) + " below delta_min");
    return probing_functional(record, probe) / (kProbeScale * ghat_x3);
}

SpectralSamples assemble_spectrum_ip3(const BoundaryRecord& record, const std::function<Complex(double)>& axial_spectrum,
                                      const SpectralNodeSet& nodes, double delta_min)
{
    if (nodes.region != RegionTag::IP3_Eb) throw RegionError("IP3 assembly needs an IP3 node set");
    SpectralSamples out;
    out.nodes = nodes;
    out.band = nodes.band;
    out.problem = ProblemKind::IP3;
    for (const auto& node : nodes.nodes)
        if (std::abs(node.xi().z()) > nodes.band * (1.0 + 1e-12)) throw RegionError("IP3 node has |xi3| > b");
    const ProbingEngine engine(record);
    probe_primaries(engine, out.nodes, out.p_component, out.q_component);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Complex g = axial_spectrum(out.nodes.nodes[i].xi().z());
        if (std::abs(g) < delta_min)
            throw BandwidthViolation("|g^(xi3)| below delta_min at xi3 = " + std::to_string(out.nodes.nodes[i].xi().z()));
        out.p_component[i] /= kProbeScale * g;
        out.q_component[i] /= kProbeScale * g;
    }
    return out;
}

}  // namespace emprobe
