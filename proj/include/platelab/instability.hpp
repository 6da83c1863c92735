#pragma once

#include <Eigen/Dense>
#include <vector>

#include "platelab/assembly.hpp"
#include "platelab/evolution.hpp"

namespace platelab {

enum class InstabilityCase { IS1, IS2 };

struct InstabilityDesign {
    double lambda = 0.0;        // angular frequency of the periodic solution
    Eigen::VectorXd phi;        // L2-normalized profile
    int mode_n = 0;
    InstabilityCase kind = InstabilityCase::IS1;
    std::vector<double> tau1_choices;
    std::vector<double> tau2_choices;
    double q = 0.0;    // int_Gamma1 |phi|^2
    double q_nu = 0.0;  // int_Gamma1 |dnu phi|^2
};

/// Case IS1: free-edge eigenproblem K phi = lambda^2 M phi (natural B1 = B2 = 0
/// on Gamma1, clamped on Gamma0). tau menus (2j+1) pi / lambda for j = 0..k
/// resp. l. Intended pairing beta2 = +beta1, gamma2 = +gamma1.
InstabilityDesign design_is1(const ModeSpace& space, int k, int l, int which_eig);

/// Case IS2: quadratic eigenproblem lambda^2 M - lambda G - K = 0 with
/// G = sqrt(beta2^2-beta1^2) lG Ts + sqrt(gamma2^2-gamma1^2) lG Tv, solved by
/// companion linearization; the smallest real positive lambda attaining the
/// minimum of the Rayleigh functional among candidates is selected. Delay
/// menus follow the positive-sine branch (mirror available via the flag).
InstabilityDesign design_is2(const ModeSpace& space, const FeedbackParams& p,
                             bool positive_sine_branch = true, int menu_entries = 5);

/// Scalar fixed-point oracle for the IS2 frequency: alternate the minimizer of
/// (K + lambda G, M) with the positive root of lambda^2 - lambda s(w) - a(w,w).
double is2_fixed_point_lambda(const ModeSpace& space, const FeedbackParams& p,
                              int max_iter = 200, double rtol = 1e-13);

struct VerifyOptions {
    int periods = 10;
    int min_cells = 64;     // shortest delay line gets at least this many cells
    int max_cells = 200000;
    int tau1_index = 0;     // which entry of the design menus
    int tau2_index = 0;
};

struct VerifyReport {
    double energy_drift = 0.0;    // |E(T)-E(0)|/E(0)
    double eigen_residual = 0.0;  // Newton residual of i lambda in the reduced problem
    double dt = 0.0;
    int n_rho1 = 0, n_rho2 = 0;
};

/// Simulates System2 from the periodic ansatz u = e^{i lambda t} phi with the
/// designed delays and exact-shift stepping; reports the relative energy
/// drift and the residual of i lambda in the reduced impedance eigenproblem.
VerifyReport verify_design(const InstabilityDesign& design, const FeedbackParams& p,
                           const ModeSpace& space, const VerifyOptions& opt = {});

}  // namespace platelab
