#pragma once

#include "emprobe/inversion.hpp"
#include "emprobe/source.hpp"

#include <optional>
#include <string>
#include <vector>

namespace emprobe {

enum class TheoremTag { TH1, TH2, TH3 };

std::string to_string(TheoremTag tag);
TheoremTag theorem_for(ProblemKind problem);

/// Which part of the transform an energy integral measures.
enum class Component { P, Full };

/// Continuation band L for the fixed sector S = {|arg z| < pi/4}.
struct ContinuationParams {
    double L = 1.0;
};

bool in_sector(Complex s);

struct LowpassOptions {
    int polar = 24;   // direction rings (twice as many azimuths)
    int radial = 32;  // Gauss-Legendre nodes on the scaled radius l' in (0, 1)
    Component component = Component::P;
};

/// I(s) = int_{|xi| <= sqrt(n) s} |p . f^|^2 from probed samples (real s <= b).
double lowpass_energy(const SpectralSamples& samples, double s);

/// I(s) by the scaled path xi = sqrt(n) s l' theta,
/// int_0^1 int_{S^2} (p . f^(xi))(p . f^(-xi)) (sqrt(n) s)^3 l'^2, valid for complex s in S.
Complex lowpass_energy(const SourceModel& source, const MediumParams& medium, Complex s, const LowpassOptions& options = {});

/// (4 pi / 3)^2 R^3 n^{3/2} |s|^3 exp(2 R sqrt(n) |Im s|) ||f||^2.
double lemma1_bound(Complex s, double R, double n, double f_norm_sq);

/// Lower bound on the continuation exponent: 1/2 on (L, 2^{1/4} L],
/// (1/pi)((z/L)^4 - 1)^{-1/2} beyond.
double mu_exponent(double z, const ContinuationParams& params);

struct ContinuationSample {
    double z = 0.0;
    double J = 0.0;  // |J(z)|
};

struct ContinuationPoint {
    double z = 0.0;
    double J = 0.0;
    double bound = 0.0;
    bool ok = true;
};

struct ContinuationReport {
    bool band_certified = true;  // |J| <= eps on the band samples
    bool holds = true;           // |J(z)| <= V eps^{mu(z)} at every z > L
    std::size_t violations = 0;
    std::vector<ContinuationPoint> points;
};

ContinuationReport continuation_bound_check(const std::vector<ContinuationSample>& band,
                                            const std::vector<ContinuationSample>& beyond, double V, double eps,
                                            const ContinuationParams& params);

/// J(s) = b^{-2} I(s) exp(-(2 R sqrt(n) + 1) s) checked against V eps^{2 mu(z)} on (b, 4b].
struct Lemma32Options {
    int band_samples = 16;
    int beyond_samples = 24;
    int sector_radii = 8;
    int sector_angles = 5;
    double corruption = 1.0;  // multiplies |J| past L (test mode)
    LowpassOptions lowpass{12, 24, Component::P};
};

struct Lemma32Result {
    ContinuationReport report;
    double V = 0.0;
    double band_constant = 0.0;  // sup_{(0, b]} |J| / eps^2
    double sector_sup = 0.0;
    std::vector<ContinuationSample> band;
    std::vector<ContinuationSample> beyond;
};

Lemma32Result lemma32_check(const SourceModel& source, const MediumParams& medium, double R, double b, double eps,
                            const Lemma32Options& options = {});

enum class TailRegion { IP1_ball, IP2_E1, IP2_E2, IP3_E1, IP3_E23 };

std::string to_string(TailRegion region);

struct TailOptions {
    double outer_factor = 8.0;
    int polar = 16;
    int radial = 32;
    int omega = 24;
    double rel_tolerance = 1e-2;
    double abs_tolerance = 1e-12;
    Component component = Component::P;
};

struct TailEstimate {
    double value = 0.0;
    double truncation_estimate = 0.0;  // the next shell (outer, 2 outer)
    double inner = 0.0;
    double outer = 0.0;
};

/// Energy of |p . f^|^2 (or |f^|^2) over the complement regions of the band:
///   IP1_ball  sqrt(n) s <= |xi|, f^(xi)
///   IP2_E1    |omega| >= s, |xi| <= s |omega|, F^(xi, omega)
///   IP2_E2    |xi| >= s |omega|
///   IP3_E1    |omega| > s / sqrt(n), |xi~|^2 <= n omega^2, f^(xi1, xi2, omega)
///   IP3_E23   |xi~|^2 >= n omega^2
/// truncated at outer_factor times the inner scale. IP3 regions always
/// measure the full |f^|^2. Throws AccuracyError when the next shell is too large.
TailEstimate tail_energy(const SourceModel& source, const MediumParams& medium, double s, TailRegion region,
                         const TailOptions& options = {});

/// ||f||^2 of the spatial factor by a midpoint rule on the support box.
double source_norm_squared(const SourceModel& source, int resolution = 96);

/// H^1 norm of the unknown: f(x) for IP1, F(x, t) for IP2, f(x~, t) for IP3,
/// by midpoint rules with central differences.
double source_h1_norm(const SourceModel& source, ProblemKind problem, int resolution = 64);

struct EnvelopeTerms {
    double data = 0.0;
    double tail = 0.0;
    double mid = 0.0;  // TH3 continuation term

    double total() const { return data + tail + mid; }
};

/// Envelope terms without the constant C:
///   TH1  b^5 eps^2,  M^2 / (b^{4/3} |ln eps|^{1/2})
///   TH2  b^11 eps^2, M^2 / (b |ln eps|^{2/5})
///   TH3  b^7 eps^2,  b^5 e^{2b(1 - alpha)} eps^{2 alpha},  M^2 / (b^{4/3} |alpha ln eps|^{1/2})
EnvelopeTerms envelope(TheoremTag theorem, double b, double eps, double M, std::optional<double> alpha = std::nullopt);

struct EnvelopeGeometry {
    double R = 1.0;
    double n = 1.0;
    double T = 5.0;
};

struct SChoice {
    double s = 0.0;
    std::string case_tag;  // "i" or "ii"
};

/// Truncation radius of the proofs' case split.
SChoice choose_s(TheoremTag theorem, double b, double eps, const EnvelopeGeometry& geometry = {}, double alpha = 1.0);

struct ContinuationEstimate {
    double mu = 1.0;
    double N = 1.0;
};

/// Calibrated Hoelder exponent for ||G||_{B(0,1)} <= N M0^{1-mu} ||G||_O^mu with
/// O = B(0, r_O), |O| = region_measure, over Gaussians centred on the unit
/// sphere whose derivative bounds follow from Cramer's inequality.
ContinuationEstimate ball_continuation_estimate(double M0, double eta, double region_measure, int d);

struct EnvelopeFit {
    double C_all = 0.0;
    double C_first = 0.0;   // even sweep indices
    double C_second = 0.0;  // odd sweep indices
    bool stable = false;    // halves agree within a factor 2
};

/// C = max err^2 / envelope per half of a sweep.
EnvelopeFit fit_envelope(const std::vector<double>& errors, const std::vector<double>& envelopes);

struct StabilityReport {
    ProblemKind problem = ProblemKind::IP1;
    double b = 0.0;
    double epsilon = 0.0;
    double M = 0.0;
    double reconstruction_error = 0.0;
    EnvelopeTerms envelope_terms;
    double fitted_C = 0.0;
    SChoice s_choice;
    double delta = 0.0;   // max(2R, T), IP2 only
    double alpha = 0.0;   // TH3 only
};

}  // namespace emprobe
