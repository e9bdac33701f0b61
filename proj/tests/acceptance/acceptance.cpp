// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "emprobe/experiment.hpp"
#include "emprobe/fourier_oracle.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#ifndef EMPROBE_CONFIG_DIR
#define EMPROBE_CONFIG_DIR "configs"
#endif

using namespace emprobe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(const char* id, const char* title, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

RunConfig config_file(const std::string& name) { return load_config(fs::path(EMPROBE_CONFIG_DIR) / name); }

Vec3 random_direction(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Vec3 v(g(rng), g(rng), g(rng));
    return v.normalized();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("emprobe_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string file_bytes(const fs::path& p) { return read_text(p); }

bool same_tree(const fs::path& a, const fs::path& b, std::string& why)
{
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), a);
        if (!fs::exists(b / rel)) {
            why = rel.string() + " missing";
            return false;
        }
        if (file_bytes(e.path()) != file_bytes(b / rel)) {
            why = rel.string() + " differs";
            return false;
        }
        ++files;
    }
    why = std::to_string(files) + " files identical";
    return files > 0;
}

// Picks `count` primary nodes spread evenly through a node set.
std::vector<std::size_t> spread_primaries(const SpectralNodeSet& set, std::size_t count)
{
    std::vector<std::size_t> primaries;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set.nodes[i].primary) primaries.push_back(i);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(primaries[(k * primaries.size()) / count + primaries.size() / (2 * count)]);
    return out;
}

}  // namespace

int main()
{
    const RunConfig reference = config_file("ip1_reference.json");
    const SourceModel ref_source = build_source(reference.source);
    std::optional<BoundaryRecord> ref_record;
    auto reference_record = [&]() -> const BoundaryRecord& {
        if (!ref_record) {
            const MediumParams medium = make_medium(reference.n);
            ref_record = record_boundary_data(
                ref_source, medium,
                make_sphere_grid(reference.R, reference.grids.sphere_polar, reference.grids.sphere_azimuth),
                make_time_grid(measurement_horizon(reference, ref_source, reference.n), reference.grids.time),
                reference.forward);
        }
        return *ref_record;
    };

    run("AC1", "probing identity vs independent oracles", [&] {
        const BoundaryRecord& record = reference_record();
        if (std::abs(record.time.horizon - 5.0) > 1e-12) return Outcome{false, "reference horizon is not T = 5"};
        std::mt19937_64 rng(20241);
        std::uniform_real_distribution<double> om(0.0, 4.0);
        std::vector<PolarizationProbe> probes;
        std::vector<Vec3c> xis;
        for (int i = 0; i < 50; ++i) {
            double w = om(rng);
            while (w < 1e-3) w = om(rng);
            probes.push_back(make_probe(random_direction(rng), w, record.medium));
            xis.push_back(to_complex(probes.back().wavevector()));
        }
        const std::vector<Complex> lhs = ProbingEngine(record).functionals(probes);
        const DirectFourierOracle oracle(ref_source);
        const auto fhat = oracle.spatial(xis);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const Complex ghat = fourier_time_profile(ref_source.time_profile(), probes[i].omega);
            const Complex rhs = kTwoPi * kTwoPi * bdot(to_complex(probes[i].p), fhat[i].value) * ghat;
            worst = std::max(worst, std::abs(lhs[i] - rhs) / std::abs(rhs));
        }
        return Outcome{worst <= 1e-3, fmt("max relative error %.3e over 50 probes (tol 1e-3)", worst)};
    });

    run("AC2", "Huygens vanishing after T0 + 2 sqrt(n) R + 0.5", [&] {
        double worst = 0.0, peak_min = 1e300;
        for (double n : {1.0, 4.0}) {
            const HuygensReport h = huygens_check(ref_source, make_medium(n), reference.R, 100, 5, 0.5);
            worst = std::max(worst, h.relative());
            peak_min = std::min(peak_min, h.peak);
        }
        return Outcome{worst <= 1e-8 && peak_min > 0.0,
                       fmt("max |E| / peak = %.3e for n in {1, 4}, smallest peak %.3e (tol 1e-8)", worst, peak_min)};
    });

    run("AC3", "dispersion and curl identities", [&] {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double disp = 0.0, curl = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double n = 0.25 + 8.0 * u(rng), w = 0.01 + 10.0 * u(rng);
            const PolarizationProbe p = make_probe(random_direction(rng), w, make_medium(n));
            disp = std::max(disp, std::abs(p.kappa * p.kappa - n * w * w) / (n * w * w));
            const Vec3 x(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
            const double t = 5.0 * u(rng);
            const double c = curl_plane_wave(p, x, t).norm() / plane_wave_field(p, x, t).norm();
            curl = std::max(curl, std::abs(c - std::sqrt(n) * w) / (std::sqrt(n) * w));
        }
        return Outcome{disp <= 1e-12 && curl <= 1e-12,
                       fmt("max relative defect: kappa^2 %.2e, |curl E| %.2e (tol 1e-12)", disp, curl)};
    });

    run("AC4", "divergence-free spectral closure", [&] {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> om(0.05, 8.0);
        const DirectFourierOracle oracle(ref_source);
        std::vector<Vec3> ds;
        std::vector<Vec3c> xis;
        for (int i = 0; i < 100; ++i) {
            const PolarizationProbe p = make_probe(random_direction(rng), om(rng), make_medium(1.0));
            ds.push_back(p.d);
            xis.push_back(to_complex(p.wavevector()));
        }
        const auto vals = oracle.spatial(xis);
        double worst_oracle = 0.0, worst_closed = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vec3c f = vals[i].value;
            worst_oracle = std::max(worst_oracle, std::abs(bdot(to_complex(ds[i]), f)) / f.norm());
            const Vec3c g = ref_source.spatial_spectrum(xis[i]);
            worst_closed = std::max(worst_closed, std::abs(bdot(to_complex(ds[i]), g)) / g.norm());
        }
        return Outcome{worst_oracle <= 1e-8 && worst_closed <= 1e-8,
                       fmt("max |d.f^| / |f^|: direct oracle %.2e, closed form %.2e (tol 1e-8)", worst_oracle,
                           worst_closed)};
    });

    run("AC5", "band-limited recovery from noiseless data", [&] {
        const RunConfig c = config_file("ip1_wide.json");
        const SourceModel s = build_source(c.source);
        const MediumParams medium = make_medium(c.n);
        const double b = c.bands.front();
        const BoundaryRecord record = record_boundary_data(
            s, medium, make_sphere_grid(c.R, c.grids.sphere_polar, c.grids.sphere_azimuth),
            make_time_grid(measurement_horizon(c, s, c.n), c.grids.time), c.forward);
        // Fraction of |f^|^2 outside |xi| <= 0.8 sqrt(n) b.
        TailOptions to;
        to.component = Component::Full;
        to.outer_factor = 8.0;
        const double tail = tail_energy(s, medium, 0.8 * b, TailRegion::IP1_ball, to).value;
        const double total = source_norm_squared(s);
        const SpectralSamples samples =
            assemble_spectrum_ip1(record, s.time_profile(), b, c.grids.directions, c.grids.radial);
        const Reconstruction rec =
            reconstruct_source(samples, make_reconstruction_grid(c.R, c.grids.reconstruction, c.R), &s);
        const double rel = rec.relative_error().value();
        return Outcome{rel <= 1e-2, fmt("relative L2 error %.3e (tol 1e-2); energy outside 0.8 sqrt(n) b: %.2e of "
                                        "||f||^2", rel, tail / total)};
    });

    run("AC6", "increasing stability sweep and envelope fit", [&] {
        RunConfig c = config_file("ip1_sweep.json");
        const SweepSummary s = cmd_sweep(c, scratch("sweep"));
        std::vector<double> at_e4;
        for (const auto& p : s.points)
            if (p.eps == 1e-4) at_e4.push_back(p.error);
        bool decreasing = at_e4.size() == 3;
        for (std::size_t k = 1; k < at_e4.size(); ++k) decreasing = decreasing && at_e4[k] < at_e4[k - 1] * 1.02;
        bool dominated = s.points.size() == 9;
        for (const auto& p : s.points)
            dominated = dominated && p.error * p.error <= s.fit.C_all * p.envelope.total() * (1.0 + 1e-12);
        const bool ok = decreasing && dominated && s.fit.stable;
        std::ostringstream d;
        d.precision(4);
        d << "errors at eps=1e-4 for b=2,4,8: " << at_e4[0] << ", " << at_e4[1] << ", " << at_e4[2] << "; C halves "
          << s.fit.C_first << " / " << s.fit.C_second << " (within x2: " << (s.fit.stable ? "yes" : "no") << ")";
        return Outcome{ok, d.str()};
    });

    std::optional<LemmaSummary> lemma;
    auto lemma_summary = [&]() -> const LemmaSummary& {
        if (!lemma) lemma = cmd_lemma_check(config_file("ip1_lemma.json"), scratch("lemma"));
        return *lemma;
    };

    run("AC7", "low-pass energy bound at 50 sector samples", [&] {
        const LemmaSummary& s = lemma_summary();
        return Outcome{s.lemma31_samples == 50 && s.lemma31_failures == 0,
                       fmt("%.0f of %.0f samples within the bound (relative slack 1e-10)",
                           double(s.lemma31_samples - s.lemma31_failures), double(s.lemma31_samples))};
    });

    run("AC8", "continuation bound with measured epsilon", [&] {
        const LemmaSummary& s = lemma_summary();
        const auto& r = s.lemma32;
        bool in_range = !r.beyond.empty();
        const double b = config_file("ip1_lemma.json").bands.front();
        for (const auto& p : r.beyond) in_range = in_range && p.z > b && p.z <= 4.0 * b + 1e-12;
        // Constructed counterexample: J = eps^2 on the band, scaled x1e6 past it.
        const double eps2 = s.epsilon * s.epsilon;
        std::vector<ContinuationSample> band, bad;
        for (const auto& p : r.band) band.push_back({p.z, eps2});
        for (const auto& p : r.beyond) bad.push_back({p.z, 1e6 * eps2});
        const ContinuationReport corrupted = continuation_bound_check(band, bad, r.V, eps2, ContinuationParams{b});
        const bool ok = r.report.holds && r.report.band_certified && in_range && !corrupted.holds;
        std::ostringstream d;
        d << r.beyond.size() << " samples on (b, 4b], violations " << r.report.violations << ", V = " << r.V
          << ", eps = " << s.epsilon << "; constructed x1e6 counterexample flagged " << corrupted.violations << " points";
        return Outcome{ok, d.str()};
    });

    run("AC9", "IP2 and IP3 samples vs 4D and 3D direct oracles", [&] {
        OracleOptions oo;
        oo.resolution = 48;
        oo.refined_resolution = 64;
        oo.check = false;
        // IP2: ring currents with distinct pulses, family over the n-grid.
        const RunConfig c2 = config_file("ip2_rings.json");
        const SourceModel s2 = build_source(c2.source);
        const double b2 = c2.bands.front();
        const std::vector<double> ngrid = config_n_grid(c2);
        const RecordFamily family =
            record_family(s2, b2, ngrid, make_sphere_grid(c2.R, c2.grids.sphere_polar, c2.grids.sphere_azimuth),
                          c2.horizon_margin, c2.grids.time, c2.forward);
        const SpectralNodeSet e2 = make_ip2_nodes(b2, ngrid, c2.grids.ip2_polar, c2.grids.ip2_radial);
        const auto pick2 = spread_primaries(e2, 20);
        std::vector<Vec3> xis;
        std::vector<double> oms;
        for (std::size_t i : pick2) {
            xis.push_back(e2.nodes[i].xi());
            oms.push_back(e2.nodes[i].probe.omega);
        }
        const auto o2 = DirectFourierOracle(s2, oo).spacetime(xis, oms);
        double worst2 = 0.0;
        for (std::size_t k = 0; k < pick2.size(); ++k) {
            const auto& node = e2.nodes[pick2[k]];
            const Complex got = spectral_sample_ip2(family, node.xi(), node.probe.omega);
            const Complex want = bdot(to_complex(node.probe.p), o2[k].value);
            worst2 = std::max(worst2, std::abs(got - want) / o2[k].value.norm());
        }
        // IP3: x3-separable planar current.
        const RunConfig c3 = config_file("ip3_planar.json");
        const SourceModel s3 = build_source(c3.source);
        const double b3 = c3.bands.front();
        const MediumParams m3 = make_medium(c3.n);
        const BoundaryRecord r3 = record_boundary_data(
            s3, m3, make_sphere_grid(c3.R, c3.grids.sphere_polar, c3.grids.sphere_azimuth),
            make_time_grid(measurement_horizon(c3, s3, c3.n), c3.grids.time), c3.forward);
        const SpectralNodeSet e3 = make_ip3_nodes(b3, m3, c3.grids.ip3_radial, c3.grids.ip3_angular, c3.grids.ip3_omega);
        const auto pick3 = spread_primaries(e3, 20);
        std::vector<Vec3> planar_nodes;
        for (std::size_t i : pick3) {
            const Vec3 xi = e3.nodes[i].xi();
            planar_nodes.emplace_back(xi.x(), xi.y(), e3.nodes[i].probe.omega);
        }
        const auto o3 = DirectFourierOracle(s3, oo).planar(planar_nodes);
        double worst3 = 0.0;
        for (std::size_t k = 0; k < pick3.size(); ++k) {
            const auto& node = e3.nodes[pick3[k]];
            // Axial factor by direct quadrature on its support.
            const double xi3 = node.xi().z(), R0 = s3.axial.radius;
            const Complex g3 = integrate_adaptive(
                [&](double x3) { return s3.axial.value(std::abs(x3)) * std::exp(-kI * xi3 * x3) * kNorm1; }, -R0, R0);
            const Complex got = spectral_sample_ip3(r3, node.probe, g3, b3);
            const Complex want = bdot(to_complex(node.probe.p), o3[k].value);
            worst3 = std::max(worst3, std::abs(got - want) / o3[k].value.norm());
        }
        return Outcome{worst2 <= 2e-3 && worst3 <= 2e-3,
                       fmt("max relative error on 20 nodes: IP2 %.3e, IP3 %.3e (tol 2e-3)", worst2, worst3)};
    });

    run("AC10", "record round trip and run determinism", [&] {
        const BoundaryRecord& record = reference_record();
        const fs::path dir = scratch("roundtrip");
        save_record(record, dir / "record", "roundtrip");
        const BoundaryRecord back = load_record(dir / "record");
        auto same = [](const auto& a, const auto& b) {
            return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(a.data()[0]) * a.size()) == 0;
        };
        bool exact = same(record.exnu, back.exnu) && same(record.t_trace, back.t_trace) &&
                     same(record.time.nodes, back.time.nodes) && same(record.time.weights, back.time.weights) &&
                     same(record.sphere.weights, back.sphere.weights) &&
                     record.sphere.nodes.size() == back.sphere.nodes.size() &&
                     record.medium.n == back.medium.n && record.time.horizon == back.time.horizon;
        for (std::size_t i = 0; exact && i < record.sphere.nodes.size(); ++i)
            exact = record.sphere.nodes[i] == back.sphere.nodes[i] && record.sphere.normals[i] == back.sphere.normals[i];

        RunConfig c = parse_config(R"({
            "problem": "IP1",
            "source": {"family": "gaussian_curl", "radius": 0.5},
            "geometry": {"R": 1.0, "T": 5.0},
            "grids": {"sphere_polar": 12, "sphere_azimuth": 24, "time": 192, "directions": 8, "radial": 12,
                      "reconstruction": 16},
            "bands": [2, 4], "noise": [1e-3], "seed": 99})");
        std::string why;
        const fs::path a = scratch("det_a"), b = scratch("det_b");
        for (const fs::path& out : {a, b}) {
            const ForwardSummary f = cmd_forward(c, out);
            cmd_reconstruct(c, f.record_path, out);
        }
        const bool det = same_tree(a, b, why);
        return Outcome{exact && det, std::string("round trip ") + (exact ? "bit-exact" : "differs") +
                                         "; two runs: " + why};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
