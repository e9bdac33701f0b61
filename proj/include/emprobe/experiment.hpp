#pragma once

#include "emprobe/io.hpp"
#include "emprobe/stability.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace emprobe {

struct GridConfig {
    int sphere_polar = 32;
    int sphere_azimuth = 64;
    int time = 512;
    int directions = 16;
    int radial = 24;
    int reconstruction = 32;
    int ip2_polar = 8;
    int ip2_radial = 12;
    int ip2_n_count = 16;
    int ip3_radial = 16;
    int ip3_angular = 32;
    int ip3_omega = 16;
};

struct ToleranceConfig {
    double delta_min = kDefaultDeltaMin;
    double huygens = 1e-8;
    /// Test mode: multiplies |J| past the band in lemma-check.
    double lemma_corruption = 1.0;
};

struct RunConfig {
    ProblemKind problem = ProblemKind::IP1;
    nlohmann::json source = {{"family", "gaussian_curl"}};
    double n = 1.0;
    std::vector<double> n_values;  // IP2 only; empty selects the log-midpoint grid
    double R = 1.0;
    std::optional<double> T;       // default T0 + 2 sqrt(n) R + horizon_margin
    double horizon_margin = 0.5;
    GridConfig grids;
    ForwardOptions forward;
    std::vector<double> bands{8.0};
    std::vector<double> noise{0.0};
    std::uint64_t seed = 0;
    std::string output = "out";
    ToleranceConfig tolerances;
    double alpha = 0.5;            // TH3 continuation exponent
    std::string canonical;         // normalized JSON text the hash is taken over

    std::string hash() const { return hex64(fnv1a64(canonical)); }
};

/// Parses a JSON run configuration. Unknown keys and invalid values raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the source of a configuration's "source" block.
SourceModel build_source(const nlohmann::json& spec);

/// Huygens-clean horizon for medium n under the configuration.
double measurement_horizon(const RunConfig& config, const SourceModel& source, double n);

/// n-grid of an IP2 run (explicit list or the log-midpoint grid for the largest band).
std::vector<double> config_n_grid(const RunConfig& config);

struct ForwardSummary {
    std::vector<double> epsilon;           // per record
    std::vector<HuygensReport> huygens;    // per record
    std::filesystem::path record_path;
};

/// Writes <out>/record (IP1/IP3) or <out>/family (IP2) plus forward_manifest.json
/// and boundary_summary.csv.
ForwardSummary cmd_forward(const RunConfig& config, const std::filesystem::path& out);

struct ReconstructSummary {
    std::vector<StabilityReport> reports;  // one per band
    std::vector<double> relative_errors;
};

/// Reads the record written by cmd_forward, probes, reconstructs for every band
/// and writes field/sample CSVs and report.json.
ReconstructSummary cmd_reconstruct(const RunConfig& config, const std::filesystem::path& record_path,
                                   const std::filesystem::path& out);

struct SweepPoint {
    double b = 0.0;
    double eps = 0.0;
    double error = 0.0;
    EnvelopeTerms envelope;
    SChoice s_choice;
};

struct SweepSummary {
    std::vector<SweepPoint> points;  // b outer, eps inner
    EnvelopeFit fit;
    double M = 0.0;
    /// Per noise level: error nonincreasing in b within 2%.
    std::vector<bool> increasing_stability;
};

/// IP1 (b, eps) sweep; needs at least two bands and two positive noise levels.
SweepSummary cmd_sweep(const RunConfig& config, const std::filesystem::path& out);

struct LemmaSummary {
    std::size_t lemma31_samples = 0;
    std::size_t lemma31_failures = 0;
    Lemma32Result lemma32;
    std::vector<std::pair<double, double>> mu_table;  // (z / L, mu)
    double epsilon = 0.0;
};

/// Low-pass energy bound at 20 real and 30 complex sector points, the
/// continuation check at the first band, and the mu(z) table.
LemmaSummary cmd_lemma_check(const RunConfig& config, const std::filesystem::path& out);

}  // namespace emprobe
