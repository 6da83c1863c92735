#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "platelab/geometry.hpp"
#include "platelab/plate_forms.hpp"

namespace platelab {

/// Per-Fourier-mode radial discretization of the plate form: Hermite cubic C1
/// elements on [r0, r1], clamped at r0 (value and slope eliminated). Matrices
/// carry the angular factor ell_n = 2*pi (n = 0) or pi (n >= 1), so energies
/// sum correctly across modes; boundary integrals over Gamma1 carry
/// ell_gamma = ell_n * r1.
struct ModeSpace {
    int n = 0;
    int elements = 0;
    Annulus geom;
    PlateConfig cfg;
    std::vector<double> nodes;  // element breakpoints, r0..r1
    int ndof = 0;               // 2*elements after clamping
    double ell = 0.0;           // angular normalization factor
    double ell_gamma = 0.0;     // per-mode boundary measure factor on Gamma1

    Eigen::MatrixXd M;  // per-mode mass (L2 with weight r, times ell)
    Eigen::MatrixXd K;  // per-mode restriction of a(.,.)
    Eigen::RowVectorXd trace_value;  // dofs -> uhat(r1)
    Eigen::RowVectorXd trace_slope;  // dofs -> uhat'(r1)
};

ModeSpace build_mode_space(const Annulus& geom, const PlateConfig& cfg, int n,
                           int elements);

/// uhat and first two radial derivatives at radius r from a dof vector.
struct RadialEval {
    cplx u, du, d2u;
};
RadialEval radial_eval(const ModeSpace& space, const Eigen::VectorXcd& dofs, double r);

/// Field samples u = uhat(r) cos(n theta) with the Cartesian bundle through
/// order 2 (third derivatives left zero).
std::vector<Deriv3> reconstruct_field(const ModeSpace& space, const Eigen::VectorXcd& dofs,
                                      const std::vector<std::array<double, 2>>& rtheta_grid);

/// Clamped dof vector interpolating a smooth radial profile (value/slope at
/// the free nodes). The r0 node is clamped away, so profiles not satisfying
/// uhat(r0) = uhat'(r0) = 0 are interpolated with those dofs forced to zero.
Eigen::VectorXd interpolate_dofs(const ModeSpace& space, const std::function<double(double)>& u,
                                 const std::function<double(double)>& du);

}  // namespace platelab
