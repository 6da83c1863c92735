#include "platelab/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace platelab {

Annulus::Annulus(double inner, double outer, std::array<double, 2> origin)
    : r0(inner), r1(outer), x0(origin) {
    if (!(r0 > 0.0) || !(r1 > r0))
        throw std::invalid_argument("Annulus: need 0 < r0 < r1");
}

double Annulus::area() const {
    return std::numbers::pi * (r1 * r1 - r0 * r0);
}

MgcReport mgc_check(const Annulus& geom, int samples) {
    if (geom.r0 >= geom.r1)
        throw std::invalid_argument("mgc_check: r0 >= r1");
    if (samples < 8)
        throw std::invalid_argument("mgc_check: samples < 8");

    const double two_pi = 2.0 * std::numbers::pi;
    double min_g1 = std::numeric_limits<double>::infinity();
    double max_g0 = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double th = two_pi * i / samples;
        const double c = std::cos(th), s = std::sin(th);
        // Gamma1: x = r1(c,s), outward normal nu = (c,s)
        const double h1 = geom.r1 - (geom.x0[0] * c + geom.x0[1] * s);
        min_g1 = std::min(min_g1, h1);
        // Gamma0: x = r0(c,s), outward normal of Omega points into the hole
        const double h0 = -geom.r0 + (geom.x0[0] * c + geom.x0[1] * s);
        max_g0 = std::max(max_g0, h0);
    }

    MgcReport rep;
    rep.min_hnu_gamma1 = min_g1;
    rep.max_hnu_gamma0 = max_g0;
    rep.satisfied = (min_g1 > 0.0) && (max_g0 <= 0.0);
    if (rep.satisfied) rep.delta = 1.0 / min_g1;
    return rep;
}

}  // namespace platelab
