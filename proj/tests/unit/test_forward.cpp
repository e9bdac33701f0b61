#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "emprobe/forward.hpp"
#include "emprobe/source.hpp"

#include <random>

using namespace emprobe;

namespace {

Vec3 random_unit(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    return Vec3(g(rng), g(rng), g(rng)).normalized();
}

template <typename F>
auto central_curl(F&& field, const Vec3& x, double t, double h)
{
    auto d = [&](int axis) {
        Vec3 e = Vec3::Zero();
        e[axis] = h;
        return ((field(x + e, t) - field(x - e, t)) / (2.0 * h)).eval();
    };
    const auto dx = d(0), dy = d(1), dz = d(2);
    using V = std::decay_t<decltype(dx)>;
    return V(dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]);
}

template <typename F>
Eigen::Matrix3d central_jacobian(F&& field, const Vec3& x, double t, double h)
{
    Eigen::Matrix3d J;
    for (int a = 0; a < 3; ++a) {
        Vec3 e = Vec3::Zero();
        e[a] = h;
        J.col(a) = (field(x + e, t) - field(x - e, t)) / (2.0 * h);
    }
    return J;
}

}  // namespace

TEST_CASE("plane wave: value at the origin, unit modulus, wave equation")
{
    const PolarizationProbe p = make_probe(Vec3(0.0, 0.6, 0.8), 1.5, make_medium(2.0));
    CHECK((plane_wave_field(p, Vec3::Zero(), 0.0) - to_complex(p.p)).norm() < 1e-15);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double h = 5e-4;
    for (int i = 0; i < 10; ++i) {
        const Vec3 x(u(rng), u(rng), u(rng));
        const double t = 2.0 + u(rng);
        CHECK(plane_wave_field(p, x, t).norm() == doctest::Approx(1.0).epsilon(1e-14));
        const Vec3c ett = (plane_wave_field(p, x, t + h) - 2.0 * plane_wave_field(p, x, t) + plane_wave_field(p, x, t - h)) / (h * h);
        const auto curl = [&](const Vec3& y, double s) { return curl_plane_wave(p, y, s); };
        const Vec3c ccE = central_curl(curl, x, t, h);
        const Vec3c residual = 2.0 * ett + ccE;
        CHECK(residual.norm() < 1e-6 * (2.0 * ett.norm()));
    }
}

TEST_CASE("curl of the plane wave")
{
    const PolarizationProbe still = make_probe(Vec3::UnitZ(), 0.0, make_medium(1.0));
    CHECK(curl_plane_wave(still, Vec3(0.3, 0.1, 0.2), 0.4).norm() == 0.0);
    const PolarizationProbe p = make_probe(Vec3::UnitZ(), 2.0, make_medium(1.0));
    CHECK(curl_plane_wave(p, Vec3(0.3, 0.1, 0.2), 0.4).norm() == doctest::Approx(2.0).epsilon(1e-14));
    const PolarizationProbe q = make_probe(Vec3(0.48, 0.6, 0.64), 1.1, make_medium(3.0));
    const auto field = [&](const Vec3& y, double s) { return plane_wave_field(q, y, s); };
    const Vec3 x(0.2, -0.4, 0.5);
    const Vec3c fd = central_curl(field, x, 0.3, 1e-5);
    CHECK((fd - curl_plane_wave(q, x, 0.3)).norm() < 1e-6);
}

TEST_CASE("zero source gives zero field and curl")
{
    const SourceModel z = zero_source();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const Vec3 x(u(rng), u(rng), u(rng));
        const double t = 3.0 + u(rng);
        CHECK(retarded_field(z, make_medium(1.0), x, t).norm() == 0.0);
        CHECK(retarded_curl(z, make_medium(1.0), x, t).norm() == 0.0);
    }
}

TEST_CASE("causality: no field before the first signal arrives")
{
    const SourceModel s = gaussian_curl({});
    for (double n : {1.0, 4.0}) {
        const Vec3 x(1.0, 0.0, 0.0);
        const double dist = 1.0 - s.support_radius();
        const double t = 0.99 * std::sqrt(n) * dist;
        CHECK(retarded_field(s, make_medium(n), x, t).norm() <= 1e-12);
        CHECK(retarded_field(s, make_medium(n), x, std::sqrt(n) * dist + 1.0).norm() > 1e-6);
    }
}

TEST_CASE("retarded field solves the wave equation outside the support")
{
    const SourceModel s = gaussian_curl({});
    const MediumParams m = make_medium(1.0);
    const RetardedSolver solver(s, m);
    const auto E = [&](const Vec3& x, double t) { return solver.field(x, t); };
    const double h = 0.005;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        const Vec3 x = 0.8 * random_unit(rng);
        const double t = 1.3 + 0.1 * i;
        const Vec3 ett = (E(x, t + h) - 2.0 * E(x, t) + E(x, t - h)) / (h * h);
        Vec3 lap = -6.0 * E(x, t);
        for (int a = 0; a < 3; ++a) {
            Vec3 e = Vec3::Zero();
            e[a] = h;
            lap += E(x + e, t) + E(x - e, t);
        }
        lap /= h * h;
        CHECK((m.n * ett - lap).norm() < 1e-3 * ett.norm());
    }
}

TEST_CASE("retarded curl matches the central-difference curl on the boundary")
{
    const SourceModel s = gaussian_curl({});
    const RetardedSolver solver(s, make_medium(1.0));
    const auto E = [&](const Vec3& x, double t) { return solver.field(x, t); };
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const Vec3 x = random_unit(rng);
        const double t = 1.2 + 0.05 * i;
        const Vec3 c = solver.curl(x, t);
        const Vec3 fd = central_curl(E, x, t, 1e-4);
        CHECK((fd - c).norm() <= 1e-4 * std::max(c.norm(), 1e-3 * solver.field(x, t).norm() + 1e-12));
    }
}

TEST_CASE("far field decays like 1/|x|")
{
    const SourceModel s = gaussian_curl({});
    const RetardedSolver solver(s, make_medium(1.0));
    auto peak = [&](double r) {
        const Vec3 x = r * Vec3(1.0, 0.0, 0.0);
        double best = 0.0;
        for (int k = 0; k < 200; ++k) best = std::max(best, solver.field(x, r - 0.5 + 3.0 * k / 200.0).norm());
        return best;
    };
    const double ratio = (10.0 * peak(10.0)) / (20.0 * peak(20.0));
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
}

TEST_CASE("linearity in the source")
{
    const CurlBumpTerm a{RadialBump{1.0, 0.1, 0.3, 6}, Vec3(0.2, 0.0, 0.0), Vec3::UnitZ(), Pulse{}};
    const CurlBumpTerm b{RadialBump{2.0, 0.08, 0.25, 6}, Vec3(-0.3, 0.1, 0.0), Vec3::UnitX(), Pulse{1.0, 1.1, 0.08, 0.0, 2.2}};
    const MediumParams m = make_medium(1.5);
    const Vec3 x(0.9, 0.2, -0.1);
    for (double t : {1.4, 1.9, 2.5}) {
        const Vec3 e = retarded_field(ring_current({a, b}), m, x, t);
        const Vec3 e1 = retarded_field(ring_current({a}), m, x, t);
        const Vec3 e2 = retarded_field(ring_current({b}), m, x, t);
        CHECK((e - e1 - e2).norm() <= 1e-12 * e.norm() + 1e-15);
        CHECK((retarded_field(ring_current({a}), m, x, t) * 3.0 - 3.0 * e1).norm() == 0.0);
    }
}

TEST_CASE("field stays divergence free")
{
    const SourceModel s = gaussian_curl({});
    const RetardedSolver solver(s, make_medium(1.0));
    const auto E = [&](const Vec3& x, double t) { return solver.field(x, t); };
    std::mt19937_64 rng(5);
    for (int i = 0; i < 8; ++i) {
        const Vec3 x = (0.3 + 0.6 * i / 8.0) * random_unit(rng);
        const Eigen::Matrix3d J = central_jacobian(E, x, 1.5, 1e-4);
        CHECK(std::abs(J.trace()) < 1e-4 * J.norm());
    }
}

TEST_CASE("time translation shifts the field")
{
    GaussianCurlParams p;
    const SourceModel s = gaussian_curl(p);
    const double tau = 0.37;
    p.pulse.centre += tau;
    p.pulse.lo += tau;
    p.pulse.hi += tau;
    const SourceModel shifted = gaussian_curl(p);
    const MediumParams m = make_medium(1.0);
    for (double t : {1.0, 1.6, 2.2}) {
        const Vec3 x(0.7, 0.3, 0.2);
        const Vec3 a = retarded_field(s, m, x, t);
        const Vec3 b = retarded_field(shifted, m, x, t + tau);
        CHECK((a - b).norm() <= 1e-10 * a.norm() + 1e-15);
    }
}

TEST_CASE("Huygens residual after the horizon")
{
    const SourceModel s = gaussian_curl({});
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(std::cbrt(u(rng)) * random_unit(rng));
    CHECK(huygens_residual(zero_source(), make_medium(1.0), pts, 4.5, 1.0) == 0.0);
    CHECK(huygens_horizon(s, make_medium(1.0), 1.0) == doctest::Approx(4.0));
    CHECK(huygens_horizon(s, make_medium(4.0), 1.0) == doctest::Approx(6.0));
    CHECK_THROWS_AS(huygens_residual(s, make_medium(4.0), pts, 5.0, 1.0), PreconditionError);
    for (double n : {1.0, 4.0}) {
        const HuygensReport h = huygens_check(s, make_medium(n), 1.0, 30, 6);
        CHECK(h.time == doctest::Approx(2.0 + 2.0 * std::sqrt(n) + 0.5));
        CHECK(h.peak > 0.0);
        CHECK(h.relative() < 1e-8);
    }
}
