#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "emprobe/fourier_oracle.hpp"
#include "emprobe/inversion.hpp"

#include <random>

using namespace emprobe;

namespace {

Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    return Vec3(g(rng), g(rng), g(rng)).normalized();
}

BoundaryRecord record_of(const SourceModel& s, double n = 1.0, int polar = 16, int time = 256, double T = 5.0)
{
    const MediumParams m = make_medium(n);
    return record_boundary_data(s, m, make_sphere_grid(1.0, polar, 2 * polar), make_time_grid(T, time));
}

const SourceModel& reference()
{
    static const SourceModel s = gaussian_curl({});
    return s;
}

const BoundaryRecord& reference_record()
{
    static const BoundaryRecord r = record_of(reference());
    return r;
}

}  // namespace

TEST_CASE("zero source records are zero")
{
    const BoundaryRecord r = record_of(zero_source(), 1.0, 8, 64);
    CHECK(r.exnu.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.t_trace.cwiseAbs().maxCoeff() == 0.0);
    CHECK(measurement_epsilon(r) == 0.0);
    CHECK(probing_functional(r, make_probe(Vec3::UnitZ(), 1.0, r.medium)) == Complex(0.0));
}

TEST_CASE("record construction guards")
{
    const SourceModel& s = reference();
    CHECK_THROWS_AS(record_of(s, 1.0, 8, 64, 3.9), PreconditionError);
    CHECK_THROWS_AS(record_of(s, 4.0, 8, 64, 5.0), PreconditionError);
    GaussianCurlParams wide;
    wide.radius = 1.2;
    CHECK_THROWS_AS(record_of(gaussian_curl(wide), 1.0, 8, 64, 8.0), PreconditionError);
}

TEST_CASE("traces are tangential, epsilon is a norm")
{
    const BoundaryRecord& r = reference_record();
    CHECK(r.tangential_residual() < 1e-10);
    const double e = measurement_epsilon(r);
    CHECK(e > 0.0);
    CHECK(measurement_epsilon(scaled(r, 3.0)) == doctest::Approx(3.0 * e).epsilon(1e-12));
    const BoundaryRecord noise = difference(add_noise(r, {0.05, 9}), r);
    const double en = measurement_epsilon(noise);
    CHECK(measurement_epsilon(sum(r, noise)) <= e + en + 1e-10);
    CHECK(measurement_epsilon(sum(r, noise)) >= std::abs(e - en) - 1e-10);
}

TEST_CASE("epsilon is stable under grid doubling")
{
    const double coarse = measurement_epsilon(record_of(reference(), 1.0, 16, 256));
    const double fine = measurement_epsilon(record_of(reference(), 1.0, 32, 512));
    CHECK(std::abs(coarse - fine) <= 1e-3 * fine);
}

TEST_CASE("noise injection")
{
    const BoundaryRecord& r = reference_record();
    const BoundaryRecord a = add_noise(r, {1e-3, 42});
    const BoundaryRecord b = add_noise(r, {1e-3, 42});
    CHECK(measurement_epsilon(difference(a, r)) == doctest::Approx(1e-3).epsilon(5e-3));
    CHECK(a.exnu == b.exnu);
    CHECK(a.t_trace == b.t_trace);
    CHECK(a.tangential_residual() < 1e-10);
    CHECK(a.provenance.noise_seed == 42);
    CHECK_FALSE(add_noise(r, {1e-3, 43}).exnu == a.exnu);
    CHECK_THROWS_AS(add_noise(r, {0.0, 1}), PreconditionError);
}

TEST_CASE("probing identity against the direct oracles")
{
    const BoundaryRecord& r = reference_record();
    const SourceModel& s = reference();
    const DirectFourierOracle oracle(s);
    const PolarizationProbe p = make_probe(Vec3(0.48, 0.6, 0.64), 1.5, r.medium);
    const Complex lhs = probing_functional(r, p);
    const Complex rhs = kTwoPi * kTwoPi * bdot(to_complex(p.p), oracle.spatial(to_complex(p.wavevector())).value) *
                        fourier_time_profile(s.time_profile(), p.omega);
    CHECK(std::abs(lhs - rhs) <= 1e-3 * std::abs(rhs));
    // Real traces: the conjugate probe gives the conjugate functional.
    CHECK(std::abs(probing_functional(r, conjugate(p)) - std::conj(lhs)) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("probing is stable under sphere refinement")
{
    const BoundaryRecord fine = record_of(reference(), 1.0, 32, 256);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 5; ++i) {
        const PolarizationProbe p = make_probe(random_unit(rng), 0.5 + 0.7 * i, fine.medium);
        const Complex a = probing_functional(reference_record(), p);
        const Complex b = probing_functional(fine, p);
        CHECK(std::abs(a - b) <= 1e-4 * std::abs(b));
    }
}

TEST_CASE("engine batches agree with single probes")
{
    const BoundaryRecord& r = reference_record();
    std::vector<PolarizationProbe> probes;
    std::mt19937_64 rng(12);
    for (int i = 0; i < 6; ++i) probes.push_back(make_probe(random_unit(rng), i < 3 ? 1.0 : 2.5, r.medium));
    const auto batch = ProbingEngine(r).functionals(probes);
    for (std::size_t i = 0; i < probes.size(); ++i)
        CHECK(std::abs(batch[i] - probing_functional(r, probes[i])) <= 1e-14 * std::abs(batch[i]));
}

TEST_CASE("spectral samples for IP1")
{
    const BoundaryRecord& r = reference_record();
    const SourceModel& s = reference();
    const DirectFourierOracle oracle(s);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> om(0.05, 4.0);
    std::vector<PolarizationProbe> probes;
    std::vector<Vec3c> xis;
    for (int i = 0; i < 30; ++i) {
        probes.push_back(make_probe(random_unit(rng), om(rng), r.medium));
        xis.push_back(to_complex(probes.back().wavevector()));
    }
    const auto want = oracle.spatial(xis);
    for (int i = 0; i < 30; ++i) {
        const Complex ghat = fourier_time_profile(s.time_profile(), probes[i].omega);
        const Complex got = spectral_sample_ip1(r, probes[i], ghat);
        const Complex exp = bdot(to_complex(probes[i].p), want[i].value);
        CHECK(std::abs(got - exp) <= 1e-3 * std::abs(exp));
    }
    CHECK_THROWS_AS(spectral_sample_ip1(r, probes[0], Complex(1e-9, 0.0)), BandwidthViolation);
    const BoundaryRecord zero = record_of(zero_source(), 1.0, 8, 64);
    CHECK(spectral_sample_ip1(zero, probes[0], 1.0) == Complex(0.0));
}

TEST_CASE("assembled spectrum: mirrors, Pythagoras, zero data")
{
    const BoundaryRecord& r = reference_record();
    const SourceModel& s = reference();
    const SpectralSamples smp = assemble_spectrum_ip1(r, s.time_profile(), 4.0, 6, 8);
    std::size_t checked = 0;
    std::vector<Vec3c> xis;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < smp.size(); ++i) {
        const auto& node = smp.nodes.nodes[i];
        const std::size_t j = node.mirror;
        CHECK((smp.vector(i) - smp.vector(j).conjugate()).norm() <= 1e-10 * std::max(smp.vector(i).norm(), 1e-12));
        if (node.primary && i % 5 == 0) {
            xis.push_back(to_complex(node.xi()));
            idx.push_back(i);
        }
    }
    const auto want = DirectFourierOracle(s).spatial(xis);
    for (std::size_t k = 0; k < idx.size(); ++k, ++checked) {
        const double got = std::norm(smp.p_component[idx[k]]) + std::norm(smp.q_component[idx[k]]);
        CHECK(got == doctest::Approx(want[k].value.squaredNorm()).epsilon(2e-3));
    }
    CHECK(checked > 10);

    const BoundaryRecord zero = record_of(zero_source(), 1.0, 8, 64);
    const SpectralSamples zs = assemble_spectrum_ip1(zero, s.time_profile(), 4.0, 4, 4);
    CHECK(zs.energy() == 0.0);
    const Reconstruction zr = reconstruct_source(zs, make_reconstruction_grid(1.0, 12, 1.0), &s);
    CHECK(zr.values.cwiseAbs().maxCoeff() == 0.0);
    // Zero reconstruction: the error is the reference norm on the grid.
    CHECK(*zr.l2_error == doctest::Approx(*zr.reference_norm).epsilon(1e-15));
}

TEST_CASE("band energy grows with b towards ||f||^2 and reconstruction improves")
{
    const BoundaryRecord r = record_of(reference(), 1.0, 32, 512);
    const SourceModel& s = reference();
    const ReconstructionGrid grid = make_reconstruction_grid(1.0, 24, 1.0);
    const RadialBump& phi = s.bumps.front().profile;
    const Rule1D rr = gauss_legendre(200, 0.0, phi.radius);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < rr.size(); ++i)
        norm2 += rr.weights[i] * std::pow(phi.derivative(rr.nodes[i]), 2) * rr.nodes[i] * rr.nodes[i];
    norm2 *= 8.0 * kPi / 3.0;
    double last_energy = 0.0, err2 = 0.0, err8 = 0.0;
    for (double b : {2.0, 4.0, 8.0}) {
        const SpectralSamples smp = assemble_spectrum_ip1(r, s.time_profile(), b, 12, 16);
        CHECK(smp.energy() > last_energy);
        CHECK(smp.energy() <= norm2);
        last_energy = smp.energy();
        const Reconstruction rec = reconstruct_source(smp, grid, &s);
        if (b == 2.0) err2 = *rec.l2_error;
        if (b == 8.0) err8 = *rec.l2_error;
    }
    CHECK(err8 < err2);
}

TEST_CASE("IP2: separable factorization, region guard, zero source")
{
    const SourceModel& s = reference();
    const std::vector<double> ns{0.5, 2.0};
    const RecordFamily fam = record_family(s, 2.0, ns, make_sphere_grid(1.0, 12, 24), 0.5, 192);
    CHECK(fam.epsilon() == doctest::Approx(std::max(measurement_epsilon(fam.records[0]), measurement_epsilon(fam.records[1]))));
    std::mt19937_64 rng(14);
    for (int i = 0; i < 6; ++i) {
        const double n = ns[i % 2];
        const double w = 0.3 + 0.25 * i;
        const Vec3 d = random_unit(rng);
        const PolarizationProbe p = make_probe(d, w, make_medium(n));
        const Complex got = spectral_sample_ip2(fam, p.wavevector(), w);
        const Complex want = bdot(to_complex(p.p), s.spatial_spectrum(to_complex(p.wavevector()))) *
                             fourier_time_profile(s.time_profile(), w);
        CHECK(std::abs(got - want) <= 1e-3 * std::abs(want));
        // Negative frequencies are the conjugate node.
        const Complex neg = spectral_sample_ip2(fam, -p.wavevector(), -w);
        CHECK(std::abs(neg - std::conj(got)) <= 1e-10 * std::abs(got));
    }
    CHECK_THROWS_AS(spectral_sample_ip2(fam, Vec3(1.0, 0.0, 0.0), 1.0), RegionError);

    const RecordFamily zf = record_family(zero_source(), 2.0, ns, make_sphere_grid(1.0, 6, 12), 0.5, 64);
    CHECK(spectral_sample_ip2(zf, std::sqrt(0.5) * Vec3(0.0, 0.0, 1.0), 1.0) == Complex(0.0));
    const SpectralSamples all = assemble_spectrum_ip2(fam, make_ip2_nodes(2.0, ns, 3, 4));
    CHECK(all.size() > 0);
    CHECK(all.energy() > 0.0);
}

TEST_CASE("IP3: node relations, oracle equivalence, zero source")
{
    const SourceModel s = separable_x3({PlanarCurlTerm{RadialBump{1.0, 0.4 / 3.5, 0.4, 6}, Eigen::Vector2d(0.1, -0.1), Pulse{}}},
                                       RadialBump{1.0, 0.4 / 3.5, 0.4, 6});
    const MediumParams m = make_medium(1.0);
    const SpectralNodeSet nodes = make_ip3_nodes(3.0, m, 4, 6, 4);
    for (const auto& node : nodes.nodes) {
        const Vec3 xi = node.xi();
        const double w = node.probe.omega;
        CHECK(std::abs(m.n * w * w - xi.x() * xi.x() - xi.y() * xi.y() - xi.z() * xi.z()) < 1e-10);
    }
    CHECK(nodes.region_residual() < 1e-10);
    const BoundaryRecord r = record_of(s, 1.0, 16, 256);
    const auto axial = [&](double xi3) { return s.axial_spectrum(xi3); };
    const SpectralSamples smp = assemble_spectrum_ip3(r, axial, nodes);
    for (std::size_t i = 0; i < smp.size(); i += 7) {
        const auto& node = smp.nodes.nodes[i];
        const Vec3 xi = node.xi();
        const Complex want = bdot(to_complex(node.probe.p), s.planar_spectrum(xi.x(), xi.y(), node.probe.omega));
        CHECK(std::abs(smp.p_component[i] - want) <= 2e-3 * std::max(std::abs(want), 1e-6));
    }
    const PolarizationProbe outside = make_probe(Vec3::UnitZ(), 4.0, m);
    CHECK_THROWS(spectral_sample_ip3(r, outside, 1.0, 3.0));
    const BoundaryRecord zero = record_of(zero_source(), 1.0, 8, 64);
    CHECK(spectral_sample_ip3(zero, nodes.nodes.front().probe, 1.0, 3.0) == Complex(0.0));
}

TEST_CASE("reconstruction grid layout")
{
    const ReconstructionGrid g = make_reconstruction_grid(1.0, 4, 1.0);
    CHECK(g.points.size() == 64);
    CHECK(g.spacing == doctest::Approx(0.5));
    CHECK(g.cell_volume == doctest::Approx(0.125));
    CHECK((g.points[(1 * 4 + 2) * 4 + 3] - Vec3(-0.25, 0.25, 0.75)).norm() < 1e-15);
}
