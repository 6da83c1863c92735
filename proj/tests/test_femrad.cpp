#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "platelab/femrad.hpp"

using namespace platelab;

namespace {

const Annulus kGeom(1.0, 2.0);
const PlateConfig kCfg(0.3);

// 2D Cartesian quadrature of the a-form of the reconstructed piecewise field,
// summed over per-element sub-annuli so every panel is smooth
double a_form_oracle_piecewise(const ModeSpace& sp, const Eigen::VectorXd& dofs) {
    const Eigen::VectorXcd dc = dofs.cast<cplx>();
    AnalyticField f = [&](double x, double y) {
        const double r = std::hypot(x, y);
        const double th = std::atan2(y, x);
        return reconstruct_field(sp, dc, {{{r, th}}})[0];
    };
    cplx total = 0.0;
    for (int e = 0; e < sp.elements; ++e) {
        const Annulus panel(sp.nodes[e], sp.nodes[e + 1]);
        total += a_form_quadrature(f, f, sp.cfg, panel, 10, 64);
    }
    return total.real();
}

}  // namespace

TEST_CASE("dof counting and trace rows") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 0, 2);
    CHECK(sp.ndof == 4);
    const ModeSpace sp1 = build_mode_space(kGeom, kCfg, 1, 16);
    CHECK(sp1.ndof == 32);

    Eigen::VectorXcd dofs = Eigen::VectorXcd::Zero(sp1.ndof);
    for (int i = 0; i < sp1.ndof; ++i) dofs(i) = cplx(i + 1.0, -0.5 * i);
    const cplx val = (sp1.trace_value.cast<cplx>() * dofs)(0);
    const cplx slp = (sp1.trace_slope.cast<cplx>() * dofs)(0);
    CHECK(val == dofs(sp1.ndof - 2));
    CHECK(slp == dofs(sp1.ndof - 1));
}

TEST_CASE("rejects degenerate inputs") {
    CHECK_THROWS(build_mode_space(kGeom, kCfg, 0, 1));
    CHECK_THROWS(build_mode_space(kGeom, kCfg, -1, 8));
}

TEST_CASE("mass and stiffness are symmetric, M positive definite") {
    for (int n : {0, 1, 3}) {
        const ModeSpace sp = build_mode_space(kGeom, kCfg, n, 12);
        CHECK((sp.K - sp.K.transpose()).norm() <= 1e-13 * sp.K.norm());
        CHECK((sp.M - sp.M.transpose()).norm() <= 1e-13 * sp.M.norm());
        Eigen::LLT<Eigen::MatrixXd> llt(sp.M);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("pencil eigenvalues are real positive for every mode") {
    for (int n : {0, 1, 2}) {
        const ModeSpace sp = build_mode_space(kGeom, kCfg, n, 16);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sp.K, sp.M);
        REQUIRE(es.info() == Eigen::Success);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("assembled per-mode form matches the 2D Cartesian oracle") {
    // clamped-compatible profile (r-1)^2 (r-1.5)^2
    auto f = [](double r) { return (r - 1.0) * (r - 1.0) * (r - 1.5) * (r - 1.5); };
    auto df = [](double r) {
        return 2.0 * (r - 1.0) * (r - 1.5) * (r - 1.5) + 2.0 * (r - 1.0) * (r - 1.0) * (r - 1.5);
    };
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 2, 32);
    const Eigen::VectorXd dofs = interpolate_dofs(sp, f, df);
    const double assembled = dofs.dot(sp.K * dofs);
    const double oracle = a_form_oracle_piecewise(sp, dofs);
    CHECK(std::abs(assembled - oracle) <= 1e-8 * std::abs(oracle));
}

TEST_CASE("reconstruction: zero dofs and nodal interpolation") {
    const ModeSpace sp = build_mode_space(kGeom, kCfg, 1, 8);
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(sp.ndof);
    const auto samples = reconstruct_field(sp, zero, {{{1.3, 0.4}}, {{1.9, 2.2}}});
    for (const Deriv3& d : samples) CHECK(std::abs(d.f) == 0.0);

    // cubic is reproduced exactly (Hermite interpolation property)
    auto f = [](double r) { return (r - 1.0) * (r - 1.0) * (r - 1.2); };
    auto df = [](double r) { return 2.0 * (r - 1.0) * (r - 1.2) + (r - 1.0) * (r - 1.0); };
    const Eigen::VectorXcd dofs = interpolate_dofs(sp, f, df).cast<cplx>();
    for (double r : {1.1, 1.47, 2.0}) {
        const RadialEval re = radial_eval(sp, dofs, r);
        CHECK(std::abs(re.u - f(r)) < 1e-13);
        CHECK(std::abs(re.du - df(r)) < 1e-12);
    }
    CHECK_THROWS(radial_eval(sp, dofs, 0.5));
}

TEST_CASE("reconstruction converges at fourth order") {
    // quartic profile satisfying the clamp at r0, so the interpolant error is
    // the pure Hermite h^4 term
    auto g = [](double r) { return (r - 1.0) * (r - 1.0) * r * r; };
    auto dg = [](double r) {
        return 2.0 * (r - 1.0) * r * r + 2.0 * r * (r - 1.0) * (r - 1.0);
    };
    std::vector<double> errs;
    for (int nel : {4, 8, 16}) {
        const ModeSpace sp = build_mode_space(kGeom, kCfg, 0, nel);
        const Eigen::VectorXcd gd = interpolate_dofs(sp, g, dg).cast<cplx>();
        double err2 = 0.0;
        const int ns = 400;
        for (int i = 0; i < ns; ++i) {
            const double r = 1.0 + (i + 0.5) / ns;
            const RadialEval re = radial_eval(sp, gd, r);
            err2 += std::norm(re.u - g(r)) / ns;
        }
        errs.push_back(std::sqrt(err2));
    }
    const double slope01 = std::log2(errs[0] / errs[1]);
    const double slope12 = std::log2(errs[1] / errs[2]);
    CHECK(slope01 > 3.7);
    CHECK(slope01 < 4.3);
    CHECK(slope12 > 3.7);
    CHECK(slope12 < 4.3);
}
