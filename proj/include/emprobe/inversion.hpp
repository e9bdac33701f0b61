#pragma once

#include "emprobe/boundary.hpp"
#include "emprobe/spectral_nodes.hpp"

#include <functional>
#include <optional>

namespace emprobe {

/// Evaluates -int_0^T int_{dB_R} [T(E x nu) . E^inc + (E x nu) . curl E^inc]
/// for many probes, sharing the temporal transforms of the traces between
/// probes of equal frequency.
class ProbingEngine {
public:
    explicit ProbingEngine(const BoundaryRecord& record);

    Complex functional(const PolarizationProbe& probe) const;
    /// Results follow the input order; probes are grouped by frequency internally.
    std::vector<Complex> functionals(const std::vector<PolarizationProbe>& probes) const;

private:
    struct Transforms {
        Eigen::Matrix3Xcd exnu;
        Eigen::Matrix3Xcd t_trace;
    };
    Transforms transforms(double omega) const;
    Complex contract(const Transforms& tr, const PolarizationProbe& probe) const;

    const BoundaryRecord& record_;
};

Complex probing_functional(const BoundaryRecord& record, const PolarizationProbe& probe);

inline constexpr double kDefaultDeltaMin = 1e-8;

/// p . f^(kappa d) = functional / ((2 pi)^2 g^(omega)).
Complex spectral_sample_ip1(const BoundaryRecord& record, const PolarizationProbe& probe, Complex ghat,
                            double delta_min = kDefaultDeltaMin);

struct SpectralSamples {
    SpectralNodeSet nodes;
    std::vector<Complex> p_component;
    std::vector<Complex> q_component;
    double band = 0.0;
    ProblemKind problem = ProblemKind::IP1;

    std::size_t size() const { return nodes.size(); }
    /// (p . f^) p + (q . f^) q at node i.
    Vec3c vector(std::size_t i) const;
    /// sum of w (|p . f^|^2 + |q . f^|^2), or the p part alone.
    double energy() const;
    double p_energy() const;
};

/// Probes the ball |xi| <= sqrt(n) b on `directions` polar rings (twice as many
/// azimuths) and `radial` frequencies; mirrored nodes are filled by conjugation.
SpectralSamples assemble_spectrum_ip1(const BoundaryRecord& record, const Pulse& g, double b, int directions = 16,
                                      int radial = 24, double delta_min = kDefaultDeltaMin);

struct ReconstructionGrid {
    std::vector<Vec3> points;
    double spacing = 0.0;
    double cell_volume = 0.0;
    int count = 0;          // points per axis of the underlying box
    double half_width = 0.0;
    std::vector<char> mask;  // 1 where the point lies in the error region
};

/// Midpoint grid on [-half_width, half_width]^3; points with |x| > mask_radius
/// are excluded from L2 norms (mask_radius <= 0 keeps all).
ReconstructionGrid make_reconstruction_grid(double half_width, int count, double mask_radius = 0.0);

struct Reconstruction {
    Eigen::Matrix3Xd values;
    double l2_norm = 0.0;
    std::optional<double> l2_error;
    std::optional<double> reference_norm;

    std::optional<double> relative_error() const
    {
        if (!l2_error || !reference_norm || *reference_norm == 0.0) return std::nullopt;
        return *l2_error / *reference_norm;
    }
};

/// f_b(x) = (2 pi)^{-3/2} sum_nodes w f^(xi) exp(i xi . x), compared with the
/// reference spatial factor when given.
Reconstruction reconstruct_source(const SpectralSamples& samples, const ReconstructionGrid& grid,
                                  const SourceModel* reference = nullptr);

/// p . F^(xi, omega) from the record whose n matches |xi|^2 / omega^2.
Complex spectral_sample_ip2(const RecordFamily& family, const Vec3& xi, double omega);

/// p- and q-components of F^ on every node of an IP2 set.
SpectralSamples assemble_spectrum_ip2(const RecordFamily& family, const SpectralNodeSet& nodes);

/// p . f^(kappa d1, kappa d2, omega) = functional / ((2 pi)^2 g^(xi3)).
Complex spectral_sample_ip3(const BoundaryRecord& record, const PolarizationProbe& probe, Complex ghat_x3, double b,
                            double delta_min = kDefaultDeltaMin);

SpectralSamples assemble_spectrum_ip3(const BoundaryRecord& record, const std::function<Complex(double)>& axial_spectrum,
                                      const SpectralNodeSet& nodes, double delta_min = kDefaultDeltaMin);

}  // namespace emprobe
