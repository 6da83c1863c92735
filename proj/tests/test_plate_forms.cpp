#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "platelab/plate_forms.hpp"

using namespace platelab;

namespace {

const Annulus kGeom(1.0, 2.0);
const PlateConfig kCfg(0.3);

AnalyticField affine_field() {
    return [](double x, double y) {
        Deriv3 d;
        d.f = 1.0 + 2.0 * x - 0.5 * y;
        d.f1 = 2.0;
        d.f2 = -0.5;
        return d;
    };
}

// f = (x^2 + y^2)/2
AnalyticField paraboloid() {
    return [](double x, double y) {
        Deriv3 d;
        d.f = 0.5 * (x * x + y * y);
        d.f1 = x;
        d.f2 = y;
        d.f11 = 1.0;
        d.f22 = 1.0;
        return d;
    };
}

}  // namespace

TEST_CASE("a-form vanishes on affine fields") {
    const cplx v = a_form_quadrature(affine_field(), affine_field(), kCfg, kGeom, 8);
    CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("a-form of the paraboloid is (2+2mu) times the area") {
    const cplx v = a_form_quadrature(paraboloid(), paraboloid(), kCfg, kGeom, 12);
    const double expected = (2.0 + 2.0 * kCfg.mu) * kGeom.area();
    CHECK(std::abs(v - expected) < 1e-10 * expected);
    CHECK(expected == doctest::Approx(2.6 * 3.0 * std::numbers::pi));
}

TEST_CASE("quadrature self-consistency on r^4 cos(2 theta)") {
    const AnalyticField f = modal_field([](double r) { return r * r * r * r; },
                                        [](double r) { return 4.0 * r * r * r; },
                                        [](double r) { return 12.0 * r * r; },
                                        [](double r) { return 24.0 * r; }, 2);
    const cplx a = a_form_quadrature(f, f, kCfg, kGeom, 12);
    const cplx b = a_form_quadrature(f, f, kCfg, kGeom, 20, 96);
    CHECK(std::abs(a - b) < 1e-10 * std::abs(b));
}

TEST_CASE("a-form is Hermitian on sampled field pairs") {
    const AnalyticField f = modal_field([](double r) { return std::sin(r); },
                                        [](double r) { return std::cos(r); },
                                        [](double r) { return -std::sin(r); },
                                        [](double r) { return -std::cos(r); }, 1);
    const AnalyticField g = modal_field([](double r) { return r * r * r; },
                                        [](double r) { return 3.0 * r * r; },
                                        [](double r) { return 6.0 * r; },
                                        [](double) { return 6.0; }, 1);
    const cplx ab = a_form_quadrature(f, g, kCfg, kGeom, 14);
    const cplx ba = a_form_quadrature(g, f, kCfg, kGeom, 14);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-10 * (1.0 + std::abs(ab)));
}

TEST_CASE("boundary operators vanish on affine fields") {
    const BoundaryOps ops = boundary_operator_oracle(affine_field(), {2.0, 0.0}, kCfg, kGeom);
    CHECK(std::abs(ops.b1) < 1e-14);
    CHECK(std::abs(ops.b2) < 1e-14);
}

TEST_CASE("B1 of r^2 on the outer circle is 2 + 2mu") {
    const AnalyticField f = modal_field([](double r) { return r * r; },
                                        [](double r) { return 2.0 * r; },
                                        [](double) { return 2.0; },
                                        [](double) { return 0.0; }, 0);
    for (double th : {0.0, 0.7, 2.9}) {
        const BoundaryOps ops =
            boundary_operator_oracle(f, {2.0 * std::cos(th), 2.0 * std::sin(th)}, kCfg, kGeom);
        CHECK(std::abs(ops.b1 - (2.0 + 2.0 * kCfg.mu)) < 1e-12);
        CHECK(std::abs(ops.b2) < 1e-12);
    }
}

TEST_CASE("both C1 routes agree pointwise") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = trial % 4;
        const double a = unif(rng), b = unif(rng);
        const AnalyticField f =
            modal_field([=](double r) { return a * r * r * r + b * std::sin(r); },
                        [=](double r) { return 3.0 * a * r * r + b * std::cos(r); },
                        [=](double r) { return 6.0 * a * r - b * std::sin(r); },
                        [=](double r) { return 6.0 * a - b * std::cos(r); }, n);
        const double th = 3.1 * unif(rng);
        const std::array<double, 2> pt{2.0 * std::cos(th), 2.0 * std::sin(th)};
        const Deriv3 d = f(pt[0], pt[1]);
        const cplx c1a = c1_cartesian(d, pt);
        const cplx c1b = c1_tangential(d, pt);
        CHECK(std::abs(c1a - c1b) <= 1e-12 * (1.0 + std::abs(c1a)));
    }
}

TEST_CASE("B1 cross-check on the radial bump (r^2 - r1^2)^2") {
    // gradient vanishes on Gamma1, so B1 = lap there
    const double R2 = 4.0;
    const AnalyticField f = modal_field(
        [=](double r) { return (r * r - R2) * (r * r - R2); },
        [=](double r) { return 4.0 * r * (r * r - R2); },
        [=](double r) { return 4.0 * (r * r - R2) + 8.0 * r * r; },
        [=](double r) { return 24.0 * r; }, 0);
    const BoundaryOps ops = boundary_operator_oracle(f, {0.0, 2.0}, kCfg, kGeom);
    CHECK(std::abs(ops.b1 - 8.0 * R2) < 1e-11);
}

TEST_CASE("off-circle points are rejected") {
    CHECK_THROWS(boundary_operator_oracle(paraboloid(), {1.5, 0.0}, kCfg, kGeom));
}

TEST_CASE("energy densities: zero and diagonal examples") {
    std::array<std::array<cplx, 2>, 2> h{};
    auto e0 = energy_densities(h, kCfg);
    CHECK(e0.c == 0.0);
    CHECK(e0.d == 0.0);

    h[0][0] = 1.0;
    h[1][1] = -1.0;
    auto e1 = energy_densities(h, kCfg);
    CHECK(e1.c == doctest::Approx(1.4).epsilon(1e-15));
    CHECK(e1.d == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("c >= (1-mu) d over random Hessians and admissible mu") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> mus(1e-3, 0.5 - 1e-3);
    for (int trial = 0; trial < 10000; ++trial) {
        const PlateConfig cfg(mus(rng));
        std::array<std::array<cplx, 2>, 2> h;
        h[0][0] = cplx(unif(rng), unif(rng));
        h[1][1] = cplx(unif(rng), unif(rng));
        h[0][1] = h[1][0] = cplx(unif(rng), unif(rng));
        const auto e = energy_densities(h, cfg);
        CHECK(e.c >= (1.0 - cfg.mu) * e.d - 1e-14);
        CHECK(e.c >= 0.0);
    }
}
