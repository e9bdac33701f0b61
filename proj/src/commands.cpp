#include "emprobe/experiment.hpp"

#include <algorithm>
#include <cmath>

namespace emprobe {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string band_tag(double b)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "b%g", b);
    return buf;
}

BoundaryRecord forward_record(const RunConfig& config, const SourceModel& source, double n)
{
    const MediumParams medium = make_medium(n);
    const SphereGrid sphere = make_sphere_grid(config.R, config.grids.sphere_polar, config.grids.sphere_azimuth);
    const TimeGrid time = make_time_grid(measurement_horizon(config, source, n), config.grids.time);
    return record_boundary_data(source, medium, sphere, time, config.forward);
}

json huygens_json(const HuygensReport& h, double tolerance)
{
    return {{"time", h.time},
            {"residual", h.residual},
            {"peak", h.peak},
            {"relative", h.relative()},
            {"passed", h.relative() <= tolerance}};
}

void summary_rows(CsvWriter& csv, const BoundaryRecord& r, long long index)
{
    const std::size_t nt = r.time.size();
    for (std::size_t s = 0; s < r.sphere.size(); ++s) {
        double e2 = 0.0, t2 = 0.0;
        for (std::size_t k = 0; k < nt; ++k) {
            const auto col = static_cast<Eigen::Index>(r.column(s, k));
            e2 += r.time.weights[k] * r.exnu.col(col).squaredNorm();
            t2 += r.time.weights[k] * r.t_trace.col(col).squaredNorm();
        }
        const Vec3& x = r.sphere.nodes[s];
        csv.row({index, r.medium.n, static_cast<long long>(s), x.x(), x.y(), x.z(), r.sphere.weights[s], std::sqrt(e2),
                 std::sqrt(t2)});
    }
}

// Noise level of a reconstruction run: the first configured level, zero when noiseless.
double run_noise(const RunConfig& config) { return config.noise.front(); }

BoundaryRecord with_noise(const BoundaryRecord& clean, double eps, std::uint64_t seed)
{
    if (eps <= 0.0) return clean;
    return add_noise(clean, NoiseSpec{eps, seed});
}

// Spectral discrepancy sqrt(sum w (|p - p*|^2 + |q - q*|^2)) against closed-form values.
std::pair<double, double> spectral_error(const SpectralSamples& s, const std::vector<Vec3c>& exact)
{
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& node = s.nodes.nodes[i];
        const Complex pe = bdot(node.probe.p.cast<Complex>(), exact[i]);
        const Complex qe = bdot(node.probe.q.cast<Complex>(), exact[i]);
        err += node.weight * (std::norm(s.p_component[i] - pe) + std::norm(s.q_component[i] - qe));
        ref += node.weight * (std::norm(pe) + std::norm(qe));
    }
    return {std::sqrt(err), std::sqrt(ref)};
}

json report_json(const StabilityReport& r, double relative, const std::string& eps_kind, bool envelope_valid)
{
    json j = {{"problem", to_string(r.problem)},
              {"b", r.b},
              {"epsilon", r.epsilon},
              {"epsilon_kind", eps_kind},
              {"M", r.M},
              {"reconstruction_error", r.reconstruction_error},
              {"relative_error", relative}};
    if (envelope_valid) {
        j["envelope"] = {{"data_term", r.envelope_terms.data},
                         {"tail_term", r.envelope_terms.tail},
                         {"mid_term", r.envelope_terms.mid}};
        j["fitted_C"] = r.fitted_C;
        j["s"] = r.s_choice.s;
        j["case"] = r.s_choice.case_tag;
    } else {
        j["envelope"] = nullptr;
        j["fitted_C"] = nullptr;
        j["s"] = nullptr;
        j["case"] = nullptr;
    }
    if (r.problem == ProblemKind::IP2) j["delta"] = r.delta;
    if (r.problem == ProblemKind::IP3) j["alpha"] = r.alpha;
    return j;
}

// Envelope, case split and fitted constant for one band.
bool fill_envelope(StabilityReport& r, const RunConfig& config, double horizon)
{
    if (!(r.epsilon > 0.0) || !(r.epsilon < std::exp(-1.0)) || !(r.b > 1.0)) return false;
    const TheoremTag th = theorem_for(r.problem);
    const std::optional<double> alpha = th == TheoremTag::TH3 ? std::optional<double>(config.alpha) : std::nullopt;
    r.envelope_terms = envelope(th, r.b, r.epsilon, r.M, alpha);
    r.s_choice = choose_s(th, r.b, r.epsilon, EnvelopeGeometry{config.R, config.n, horizon}, config.alpha);
    r.fitted_C = r.reconstruction_error * r.reconstruction_error / r.envelope_terms.total();
    return true;
}

}  // namespace

ForwardSummary cmd_forward(const RunConfig& config, const fs::path& out)
{
    ensure_dir(out);
    const SourceModel source = build_source(config.source);
    ForwardSummary summary;
    json manifest = {{"command", "forward"},
                     {"config_hash", config.hash()},
                     {"problem", to_string(config.problem)},
                     {"source_family", config.source["family"]}};
    CsvWriter csv(out / "boundary_summary.csv",
                  {"record", "n", "node", "x", "y", "z", "weight", "l2_exnu", "l2_trace"});
    json records = json::array();
    auto run_one = [&](double n, long long index) {
        BoundaryRecord r = forward_record(config, source, n);
        const HuygensReport h = huygens_check(source, make_medium(n), config.R, 100, config.seed, config.horizon_margin,
                                              64, config.forward);
        summary.epsilon.push_back(measurement_epsilon(r));
        summary.huygens.push_back(h);
        summary_rows(csv, r, index);
        records.push_back({{"n", n},
                           {"horizon", r.time.horizon},
                           {"epsilon", summary.epsilon.back()},
                           {"huygens", huygens_json(h, config.tolerances.huygens)}});
        return r;
    };
    if (config.problem == ProblemKind::IP2) {
        RecordFamily family;
        family.band = *std::max_element(config.bands.begin(), config.bands.end());
        family.n_values = config_n_grid(config);
        for (std::size_t i = 0; i < family.n_values.size(); ++i)
            family.records.push_back(run_one(family.n_values[i], static_cast<long long>(i)));
        summary.record_path = out / "family";
        save_family(family, summary.record_path, config.hash());
    } else {
        const BoundaryRecord r = run_one(config.n, 0);
        summary.record_path = out / "record";
        save_record(r, summary.record_path, config.hash());
    }
    manifest["records"] = records;
    manifest["record_path"] = summary.record_path.filename().string();
    manifest["outputs"] = {"boundary_summary.csv"};
    write_text(out / "forward_manifest.json", manifest.dump(2) + "\n");
    return summary;
}

ReconstructSummary cmd_reconstruct(const RunConfig& config, const fs::path& record_path, const fs::path& out)
{
    ensure_dir(out);
    const SourceModel source = build_source(config.source);
    const double noise = run_noise(config);
    ReconstructSummary summary;
    json reports = json::array();
    json outputs = json::array();
    const double M = std::max(source.is_zero() ? 0.0 : source_h1_norm(source, config.problem), 1.0);

    if (config.problem == ProblemKind::IP1) {
        const BoundaryRecord clean = load_record(record_path);
        const BoundaryRecord record = with_noise(clean, noise, config.seed);
        const double eps = noise > 0.0 ? noise : measurement_epsilon(record);
        const ReconstructionGrid grid = make_reconstruction_grid(config.R, config.grids.reconstruction, config.R);
        for (double b : config.bands) {
            const SpectralSamples samples =
                assemble_spectrum_ip1(record, source.time_profile(), b, config.grids.directions, config.grids.radial,
                                      config.tolerances.delta_min);
            const Reconstruction rec = reconstruct_source(samples, grid, &source);
            StabilityReport r;
            r.problem = ProblemKind::IP1;
            r.b = b;
            r.epsilon = eps;
            r.M = M;
            r.reconstruction_error = *rec.l2_error;
            const double rel = rec.relative_error().value_or(rec.l2_error.value_or(0.0));
            const bool env = fill_envelope(r, config, record.time.horizon);
            reports.push_back(report_json(r, rel, noise > 0.0 ? "noise" : "data_norm", env));
            summary.reports.push_back(r);
            summary.relative_errors.push_back(rel);

            const std::string tag = band_tag(b);
            CsvWriter field(out / ("field_" + tag + ".csv"), {"x", "y", "z", "fx", "fy", "fz", "ref_x", "ref_y", "ref_z"});
            for (std::size_t i = 0; i < grid.points.size(); ++i) {
                if (!grid.mask[i]) continue;
                const Vec3& x = grid.points[i];
                const Vec3 v = rec.values.col(static_cast<Eigen::Index>(i));
                const Vec3 f = source.spatial(x);
                field.row({x.x(), x.y(), x.z(), v.x(), v.y(), v.z(), f.x(), f.y(), f.z()});
            }
            write_samples_csv(samples, out / ("samples_" + tag + ".csv"));
            outputs.push_back("field_" + tag + ".csv");
            outputs.push_back("samples_" + tag + ".csv");
        }
    } else if (config.problem == ProblemKind::IP2) {
        const RecordFamily family = load_family(record_path);
        RecordFamily noisy = family;
        for (std::size_t i = 0; i < noisy.records.size(); ++i)
            noisy.records[i] = with_noise(family.records[i], noise, config.seed + i);
        const double eps = noise > 0.0 ? noise : noisy.epsilon();
        double horizon = 0.0;
        for (const auto& r : noisy.records) horizon = std::max(horizon, r.time.horizon);
        for (double b : config.bands) {
            std::vector<double> grid_n;
            for (double n : family.n_values)
                if (n < b * b) grid_n.push_back(n);
            if (grid_n.empty()) throw PreconditionError("no record of the family has n < b^2 for b = " + std::to_string(b));
            const SpectralNodeSet nodes = make_ip2_nodes(b, grid_n, config.grids.ip2_polar, config.grids.ip2_radial);
            const SpectralSamples samples = assemble_spectrum_ip2(noisy, nodes);
            std::vector<Vec3c> exact(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i)
                exact[i] = source.spacetime_spectrum(samples.nodes.nodes[i].xi(), samples.nodes.nodes[i].probe.omega);
            const auto [err, ref] = spectral_error(samples, exact);
            StabilityReport r;
            r.problem = ProblemKind::IP2;
            r.b = b;
            r.epsilon = eps;
            r.M = M;
            r.reconstruction_error = err;
            r.delta = std::max(2.0 * config.R, horizon);
            const bool env = fill_envelope(r, config, horizon);
            const double rel = ref > 0.0 ? err / ref : err;
            reports.push_back(report_json(r, rel, noise > 0.0 ? "noise" : "data_norm", env));
            reports.back()["band_energy"] = samples.energy();
            summary.reports.push_back(r);
            summary.relative_errors.push_back(rel);
            const std::string tag = band_tag(b);
            write_samples_csv(samples, out / ("samples_" + tag + ".csv"));
            outputs.push_back("samples_" + tag + ".csv");
        }
    } else {
        const BoundaryRecord clean = load_record(record_path);
        const BoundaryRecord record = with_noise(clean, noise, config.seed);
        const double eps = noise > 0.0 ? noise : measurement_epsilon(record);
        for (double b : config.bands) {
            const SpectralNodeSet nodes = make_ip3_nodes(b, record.medium, config.grids.ip3_radial,
                                                         config.grids.ip3_angular, config.grids.ip3_omega);
            const SpectralSamples samples = assemble_spectrum_ip3(
                record, [&](double xi3) { return source.axial_spectrum(xi3); }, nodes, config.tolerances.delta_min);
            std::vector<Vec3c> exact(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i) {
                const Vec3 xi = samples.nodes.nodes[i].xi();
                exact[i] = source.planar_spectrum(xi.x(), xi.y(), samples.nodes.nodes[i].probe.omega);
            }
            const auto [err, ref] = spectral_error(samples, exact);
            StabilityReport r;
            r.problem = ProblemKind::IP3;
            r.b = b;
            r.epsilon = eps;
            r.M = M;
            r.reconstruction_error = err;
            r.alpha = config.alpha;
            const bool env = fill_envelope(r, config, record.time.horizon);
            const double rel = ref > 0.0 ? err / ref : err;
            reports.push_back(report_json(r, rel, noise > 0.0 ? "noise" : "data_norm", env));
            reports.back()["band_energy"] = samples.energy();
            summary.reports.push_back(r);
            summary.relative_errors.push_back(rel);
            const std::string tag = band_tag(b);
            write_samples_csv(samples, out / ("samples_" + tag + ".csv"));
            outputs.push_back("samples_" + tag + ".csv");
        }
    }
    const json manifest = {{"command", "reconstruct"},
                           {"config_hash", config.hash()},
                           {"problem", to_string(config.problem)},
                           {"noise", noise},
                           {"seed", config.seed},
                           {"reports", reports},
                           {"outputs", outputs}};
    write_text(out / "report.json", manifest.dump(2) + "\n");
    return summary;
}

SweepSummary cmd_sweep(const RunConfig& config, const fs::path& out)
{
    if (config.problem != ProblemKind::IP1) throw PreconditionError("sweeps are implemented for IP1");
    std::vector<double> levels;
    for (double e : config.noise)
        if (e > 0.0) levels.push_back(e);
    if (config.bands.size() < 2 || levels.size() < 2)
        throw PreconditionError("a sweep needs at least two bands and two positive noise levels");
    ensure_dir(out);
    const SourceModel source = build_source(config.source);
    const BoundaryRecord clean = forward_record(config, source, config.n);
    const ReconstructionGrid grid = make_reconstruction_grid(config.R, config.grids.reconstruction, config.R);

    SweepSummary summary;
    summary.M = std::max(source.is_zero() ? 0.0 : source_h1_norm(source, ProblemKind::IP1), 1.0);
    const EnvelopeGeometry geometry{config.R, config.n, clean.time.horizon};
    std::size_t index = 0;
    for (double b : config.bands) {
        for (double eps : levels) {
            const BoundaryRecord noisy = add_noise(clean, NoiseSpec{eps, config.seed + index});
            const SpectralSamples samples = assemble_spectrum_ip1(noisy, source.time_profile(), b, config.grids.directions,
                                                                  config.grids.radial, config.tolerances.delta_min);
            const Reconstruction rec = reconstruct_source(samples, grid, &source);
            SweepPoint pt;
            pt.b = b;
            pt.eps = eps;
            pt.error = *rec.l2_error;
            pt.envelope = envelope(TheoremTag::TH1, b, eps, summary.M);
            pt.s_choice = choose_s(TheoremTag::TH1, b, eps, geometry);
            summary.points.push_back(pt);
            ++index;
        }
    }
    std::vector<double> errs, envs;
    for (const auto& p : summary.points) {
        errs.push_back(p.error);
        envs.push_back(p.envelope.total());
    }
    summary.fit = fit_envelope(errs, envs);

    // Bands in the order given; stability compares consecutive increasing bands.
    std::vector<std::size_t> order(config.bands.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return config.bands[a] < config.bands[b]; });
    for (std::size_t e = 0; e < levels.size(); ++e) {
        bool ok = true;
        for (std::size_t k = 1; k < order.size(); ++k) {
            const double prev = summary.points[order[k - 1] * levels.size() + e].error;
            const double next = summary.points[order[k] * levels.size() + e].error;
            if (next > 1.02 * prev) ok = false;
        }
        summary.increasing_stability.push_back(ok);
    }

    CsvWriter csv(out / "sweep.csv", {"b", "eps", "err", "data_term", "tail_term", "fitted_C", "case_tag"});
    for (const auto& p : summary.points)
        csv.row({p.b, p.eps, p.error, p.envelope.data, p.envelope.tail, summary.fit.C_all, p.s_choice.case_tag});
    json stab = json::array();
    for (std::size_t e = 0; e < levels.size(); ++e)
        stab.push_back({{"eps", levels[e]}, {"nonincreasing_in_b", static_cast<bool>(summary.increasing_stability[e])}});
    const json manifest = {{"command", "sweep"},
                           {"config_hash", config.hash()},
                           {"M", summary.M},
                           {"fit",
                            {{"C_all", summary.fit.C_all},
                             {"C_first_half", summary.fit.C_first},
                             {"C_second_half", summary.fit.C_second},
                             {"stable", summary.fit.stable}}},
                           {"envelope_dominance", summary.fit.stable},
                           {"increasing_stability", stab},
                           {"outputs", {"sweep.csv"}}};
    write_text(out / "sweep_manifest.json", manifest.dump(2) + "\n");
    return summary;
}

LemmaSummary cmd_lemma_check(const RunConfig& config, const fs::path& out)
{
    if (config.problem != ProblemKind::IP1) throw PreconditionError("lemma checks use the IP1 spatial factor");
    ensure_dir(out);
    const SourceModel source = build_source(config.source);
    const MediumParams medium = make_medium(config.n);
    const double b = config.bands.front();
    const double fn2 = source_norm_squared(source);
    LemmaSummary summary;

    CsvWriter l31(out / "lemma31.csv", {"re_s", "im_s", "abs_I", "bound", "pass"});
    std::vector<Complex> samples;
    for (int k = 1; k <= 20; ++k) samples.emplace_back(2.0 * b * k / 20.0, 0.0);
    const double angles[] = {-0.24, -0.12, 0.06, 0.12, 0.24};
    for (int i = 1; i <= 6; ++i)
        for (double a : angles) samples.push_back(std::polar(b * i / 3.0, a * kPi));
    for (const Complex& s : samples) {
        const double I = std::abs(lowpass_energy(source, medium, s));
        const double bound = lemma1_bound(s, config.R, config.n, fn2);
        const bool pass = I <= bound * (1.0 + 1e-10);
        if (!pass) ++summary.lemma31_failures;
        l31.row({s.real(), s.imag(), I, bound, static_cast<long long>(pass)});
    }
    summary.lemma31_samples = samples.size();

    summary.epsilon = measurement_epsilon(forward_record(config, source, config.n));
    Lemma32Options opts;
    opts.corruption = config.tolerances.lemma_corruption;
    if (summary.epsilon > 0.0 && summary.epsilon < 1.0) {
        summary.lemma32 = lemma32_check(source, medium, config.R, b, summary.epsilon, opts);
        CsvWriter l32(out / "lemma32.csv", {"z", "J", "bound", "pass"});
        for (const auto& p : summary.lemma32.report.points) l32.row({p.z, p.J, p.bound, static_cast<long long>(p.ok)});
    }
    const ContinuationParams params{b};
    CsvWriter mu(out / "mu_table.csv", {"z_over_L", "mu"});
    for (double r : {1.1, std::pow(2.0, 0.25), 2.0, 4.0}) {
        const double m = mu_exponent(r * b, params);
        summary.mu_table.emplace_back(r, m);
        mu.row({r, m});
    }
    const json manifest = {
        {"command", "lemma-check"},
        {"config_hash", config.hash()},
        {"b", b},
        {"f_norm_squared", fn2},
        {"epsilon", summary.epsilon},
        {"lemma31", {{"samples", summary.lemma31_samples}, {"failures", summary.lemma31_failures}}},
        {"lemma32",
         {{"holds", summary.lemma32.report.holds},
          {"violations", summary.lemma32.report.violations},
          {"V", summary.lemma32.V},
          {"band_constant", summary.lemma32.band_constant},
          {"sector_sup", summary.lemma32.sector_sup},
          {"corruption", opts.corruption}}},
        {"outputs", {"lemma31.csv", "lemma32.csv", "mu_table.csv"}}};
    write_text(out / "lemma_manifest.json", manifest.dump(2) + "\n");
    return summary;
}

}  // namespace emprobe
