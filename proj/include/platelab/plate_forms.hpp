#pragma once

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>

#include "platelab/geometry.hpp"

namespace platelab {

using cplx = std::complex<double>;

struct PlateConfig {
    double mu = 0.3;  // Poisson ratio, 0 < mu < 1/2

    PlateConfig() = default;
    explicit PlateConfig(double poisson) : mu(poisson) {
        if (!(mu > 0.0 && mu < 0.5))
            throw std::invalid_argument("PlateConfig: need 0 < mu < 1/2");
    }
};

/// Derivative bundle of a scalar field at one point: value and all partials
/// through order 3 (Cartesian x1, x2). Third derivatives are only consumed by
/// the boundary operators; callers that never evaluate those may leave them 0.
struct Deriv3 {
    cplx f{};
    cplx f1{}, f2{};
    cplx f11{}, f12{}, f22{};
    cplx f111{}, f112{}, f122{}, f222{};

    cplx lap() const { return f11 + f22; }
};

/// Closed-form field: bundle evaluator storing no state; internal consistency
/// (cross-derivative symmetry) is the caller's contract.
using AnalyticField = std::function<Deriv3(double x1, double x2)>;

/// Integrates the plate form density of f against g over the annulus using a
/// tensor rule: Gauss-Legendre with `order` points in r times an equispaced
/// trapezoid rule in theta (theta_points, default 64).
cplx a_form_quadrature(const AnalyticField& f, const AnalyticField& g,
                       const PlateConfig& cfg, const Annulus& geom, int order,
                       int theta_points = 64);

/// B1 f and B2 f at a point of the outer circle, ruled by the local normal
/// nu = x/r1 and tangent tau = nu rotated by +pi/2. Rejects points off Gamma1.
struct BoundaryOps {
    cplx b1;
    cplx b2;
};
BoundaryOps boundary_operator_oracle(const AnalyticField& f,
                                     std::array<double, 2> point,
                                     const PlateConfig& cfg, const Annulus& geom);

/// Independent route for C1 f (tangential form): -dtt f - (dtau nu2) f1 + (dtau nu1) f2,
/// with dtt the intrinsic second tangential derivative along the circle.
cplx c1_tangential(const Deriv3& d, std::array<double, 2> point);

/// Direct Cartesian C1 f from the definition.
cplx c1_cartesian(const Deriv3& d, std::array<double, 2> point);

/// Pointwise energy densities of a symmetric 2x2 complex Hessian:
///   c = |u11|^2 + |u22|^2 + 2 mu Re(u11 conj(u22)) + 2(1-mu)|u12|^2
///   d = |u11|^2 + |u22|^2 + 2 |u12|^2
struct EnergyDensities {
    double c;
    double d;
};
EnergyDensities energy_densities(const std::array<std::array<cplx, 2>, 2>& hessian,
                                 const PlateConfig& cfg);

/// Field u(r,theta) = uhat(r) cos(n theta) from radial callables through third
/// order; used to cross the polar mode reduction against the Cartesian form.
AnalyticField modal_field(std::function<double(double)> uhat,
                          std::function<double(double)> duhat,
                          std::function<double(double)> d2uhat,
                          std::function<double(double)> d3uhat, int n);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int npts, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace platelab
