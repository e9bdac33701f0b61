#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace emprobe {

using Complex = std::complex<double>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3 = Vector3<double>;
using Vec3c = Vector3<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// (2 pi)^{-1/2}, (2 pi)^{-3/2} and (2 pi)^{-2}: the 1D, 3D and 4D transform
// normalisations shared by every module.
inline const double kNorm1 = 1.0 / std::sqrt(kTwoPi);
inline const double kNorm3 = kNorm1 * kNorm1 * kNorm1;
inline const double kNorm4 = 1.0 / (kTwoPi * kTwoPi);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDirectionError : public Error {
public:
    using Error::Error;
};

/// Raised when a quadrature refinement estimate exceeds its tolerance.
class AccuracyError : public Error {
public:
    using Error::Error;
};

/// Division by a time (or axial) spectrum below the admissible floor.
class BandwidthViolation : public Error {
public:
    using Error::Error;
};

/// A spectral point that does not lie in the requested data-accessible region.
class RegionError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

enum class ProblemKind { IP1, IP2, IP3 };

std::string to_string(ProblemKind kind);
ProblemKind problem_from_string(const std::string& name);

inline Vec3c to_complex(const Vec3& v) { return v.cast<Complex>(); }

// Bilinear (non-conjugating) dot product, as used by the probing pairing.
template <typename A, typename B>
auto bdot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    return (a.array() * b.array()).sum();
}

// Bilinear cross product; Eigen's cross() conjugates complex operands.
template <typename Scalar>
Vector3<Scalar> bcross(const Vector3<Scalar>& a, const Vector3<Scalar>& b)
{
    return Vector3<Scalar>(a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x());
}

}  // namespace emprobe
