#pragma once

#include <array>
#include <optional>

namespace platelab {

/// Annular domain: clamped inner circle Gamma0 (radius r0), controlled outer
/// circle Gamma1 (radius r1), both centered at the origin. x0 is the origin of
/// the multiplier field h(x) = x - x0.
struct Annulus {
    double r0 = 1.0;
    double r1 = 2.0;
    std::array<double, 2> x0{0.0, 0.0};

    Annulus() = default;
    Annulus(double inner, double outer, std::array<double, 2> origin = {0.0, 0.0});

    double width() const { return r1 - r0; }
    double area() const;
};

struct MgcReport {
    double min_hnu_gamma1 = 0.0;  // min of h.nu over Gamma1
    double max_hnu_gamma0 = 0.0;  // max of h.nu over Gamma0
    bool satisfied = false;
    std::optional<double> delta;  // tight 1/min_hnu_gamma1 when satisfied
};

/// Samples h.nu on `samples` equispaced points of each boundary circle and
/// checks h.nu >= delta^-1 on Gamma1, h.nu <= 0 on Gamma0. Exact for x0 at the
/// center regardless of sampling.
MgcReport mgc_check(const Annulus& geom, int samples);

}  // namespace platelab
