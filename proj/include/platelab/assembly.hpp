#pragma once

#include <Eigen/Dense>
#include <complex>

#include "platelab/femrad.hpp"

namespace platelab {

struct FeedbackParams {
    double beta1 = 2.0;
    double beta2 = 1.0;
    double gamma1 = 3.0;
    double gamma2 = -2.0;
    double tau1 = 0.7;
    double tau2 = 1.1;
};

struct HypothesisReport {
    bool h_satisfied = false;  // |beta2| < beta1 and |gamma2| < gamma1
    bool is1 = false;          // |beta2| = beta1 and |gamma2| = gamma1
    bool is2 = false;          // both >=, with strictly positive excess
};

/// Classifies params against (H), (IS1), (IS2). `is1_tol` relaxes the IS1
/// equality comparison (0 = exact).
HypothesisReport validate_params(const FeedbackParams& p, double is1_tol = 0.0);

/// Delayed-signal carrier over the rho-grid rho_j = j/cells, j = 0..cells.
/// values[0] is the inflow slot. weight = tau * |coefficient| is the energy
/// weight multiplying the grid quadrature of |z|^2.
struct DelayLine {
    double tau = 1.0;
    int cells = 2;
    Eigen::VectorXcd values;  // length cells + 1
    double weight = 0.0;

    DelayLine() = default;
    DelayLine(double tau_, int cells_, double weight_);

    /// Characteristic shift by one cell: values[j+1] <- values[j], inflow into
    /// values[0]; returns the value pushed out of the last cell.
    cplx exact_shift(cplx inflow);

    /// Trapezoid quadrature of |z|^2 over the full rho-grid.
    double trapezoid_norm_sq() const;
    /// Uniform characteristic-cell quadrature over slots 0..cells-1 (the
    /// convention used by exact-shift stepping; see evolution).
    double cell_norm_sq() const;
};

enum class SystemKind { System1, System2 };

/// Discrete generator of one Fourier mode. State layout:
///   System1: [u | v | eta | xi | z1 (n_rho1+1) | z2 (n_rho2+1)]
///   System2: [u | v | z1 (n_rho1+1) | z2 (n_rho2+1)]
/// Transport rows are first-order upwind toward rho = 0, with the inflow
/// boundary condition imposed through an upwind ghost cell on slot 0.
struct DiscreteGenerator {
    SystemKind kind = SystemKind::System1;
    ModeSpace space;
    FeedbackParams params;
    int n_rho1 = 2, n_rho2 = 2;

    int off_u = 0, off_v = 0, off_eta = -1, off_xi = -1, off_z1 = 0, off_z2 = 0;
    int dim = 0;

    Eigen::LLT<Eigen::MatrixXd> mass_llt;
    Eigen::LLT<Eigen::MatrixXd> stiff_llt;  // energies evaluated as ||L^T x||^2

    /// Generator action on a state vector.
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

    /// Dense generator matrix (real).
    Eigen::MatrixXd matrix() const;

    /// Diagonal energy weights of the non-plate blocks (eta, xi, z-grids;
    /// trapezoid weights on the z-grids). Plate blocks use K and M.
    Eigen::VectorXd tail_energy_weights() const;

    /// Squared energy-space norm ||U||_H^2 = u^H K u + v^H M v + tail weights.
    double hilbert_norm_sq(const Eigen::VectorXcd& x) const;
    double energy(const Eigen::VectorXcd& x) const { return 0.5 * hilbert_norm_sq(x); }
};

DiscreteGenerator build_generator(SystemKind kind, const ModeSpace& space,
                                  const FeedbackParams& p, int n_rho1, int n_rho2);

}  // namespace platelab
