#pragma once

#include "emprobe/core.hpp"

namespace emprobe {

/// Gaussian pulse A exp(-(t - c)^2 / eta) cut off outside [lo, hi].
struct Pulse {
    double amplitude = 1.0;
    double centre = 1.0;
    double eta = 0.05;
    double lo = 0.0;
    double hi = 2.0;

    double operator()(double t) const
    {
        if (t <= lo || t >= hi || amplitude == 0.0) return 0.0;
        const double u = t - centre;
        return amplitude * std::exp(-u * u / eta);
    }

    double derivative(double t) const
    {
        if (t <= lo || t >= hi || amplitude == 0.0) return 0.0;
        const double u = t - centre;
        return -2.0 * u / eta * amplitude * std::exp(-u * u / eta);
    }

    bool is_zero() const { return amplitude == 0.0; }
};

/// Spectrum (2 pi)^{-1/2} int g(t) exp(-i omega t) dt by adaptive quadrature over the support.
Complex fourier_time_profile(const Pulse& g, double omega);

struct BandwidthCheck {
    bool holds = false;
    double worst_omega = 0.0;
    double min_magnitude = 0.0;
};

/// Scans a dense omega grid of (0, b) for the minimum of |g^(omega)|.
BandwidthCheck verify_bandwidth_condition(const Pulse& g, double b, double delta, int samples = 2001);

/// Radial bump A exp(-r^2 / (2 sigma^2)) (1 - r^2/R0^2)^m on r < R0. A
/// nonpositive sigma drops the Gaussian factor.
struct RadialBump {
    double amplitude = 1.0;
    double sigma = 0.0;
    double radius = 1.0;
    int window_power = 6;

    double value(double r) const;
    double derivative(double r) const;

    /// (2 pi)^{-3/2} int_{R^3} phi(|x|) exp(-i xi.x) dx as a function of k^2 = xi.xi.
    Complex spectrum3(Complex k_squared) const;
    /// (2 pi)^{-1} int_{R^2} phi(|x|) exp(-i xi.x) dx for real |xi| = k.
    double spectrum2(double k) const;
    /// (2 pi)^{-1/2} int_R phi(|x|) exp(-i xi x) dx for real xi.
    double spectrum1(double xi) const;
    /// int phi(|x|)^2 over R^dim, by Gauss-Legendre in r.
    double norm_squared(int dim) const;
};

}  // namespace emprobe
