#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "platelab/assembly.hpp"

namespace platelab {

/// Eigenvalues of the discrete generator, sorted by real part descending.
/// When every energy weight is positive the matrix is transformed to energy
/// coordinates first (Cholesky similarity), which keeps the computed spectrum
/// of the dissipative matrix on the correct side of the axis.
std::vector<cplx> generator_spectrum(const DiscreteGenerator& gen, int count);

struct TEigenpair {
    double mu4 = 0.0;          // eigenvalue mu_n^4
    Eigen::VectorXd phi;       // M-normalized dof vector
    int mode_n = 0;
};

/// Ascending eigenpairs of the pencil (K + lG ts^T ts + lG tv^T tv, M), the
/// discrete form of a(f,g) + int_Gamma1 (dnu f dnu g + f g). Returned pairs
/// are polished by Rayleigh-quotient iteration so small eigenvalues are not
/// limited by the dense solver's eps*lambda_max floor.
std::vector<TEigenpair> t_operator_eigs(const ModeSpace& space, int count);

struct QuasimodeSample {
    double mu = 0.0;
    double u_norm = 0.0;  // ||U_n||_H of the quasimode state
    double f_norm = 0.0;  // ||F_n||_H of its generator residual
    int mode_n = 0;
};

/// Quasimode family U_n = (phi/l, phi, dnu phi/l, phi/l, eta e^{-i mu^2 tau1 rho},
/// xi e^{-i mu^2 tau2 rho}), l = i mu^2, with residual F_n supported on the
/// control rows; exact rho-integrals (|e^{i s rho}| = 1).
std::vector<QuasimodeSample> quasimode_test(const ModeSpace& space, const FeedbackParams& p,
                                            const std::vector<TEigenpair>& pairs);

struct ResolventSample {
    double lambda = 0.0;
    double gain = 0.0;
};

/// Reduced-impedance frequency response matrix R(z):
///   System1: K + z^2 M + z C(z) lG Ts + z K(z) lG Tv,  C(z) = 1/(z+b1+b2 e^{-z tau1})
///   System2: K + z^2 M + z (b1+b2 e^{-z tau1}) lG Ts + z (g1+g2 e^{-z tau2}) lG Tv
/// with Ts = ts^T ts, Tv = tv^T tv. The delay is eliminated exactly.
Eigen::MatrixXcd impedance_matrix(const ModeSpace& space, const FeedbackParams& p,
                                  SystemKind kind, cplx z);
Eigen::MatrixXcd impedance_matrix_deriv(const ModeSpace& space, const FeedbackParams& p,
                                        SystemKind kind, cplx z);

/// Fixed right-hand side f (M-normalized, deterministic from seed).
Eigen::VectorXd random_mass_normalized(const ModeSpace& space, unsigned long long seed);

/// Gains ||U||_H / ||F||_H of the reduced solve R(i lambda) u = M f over the
/// given frequencies; the full state is reconstructed analytically from u.
/// With use_opnorm the fixed f is replaced by a power-iteration estimate of
/// the worst f in the mass metric.
std::vector<ResolventSample> resolvent_sweep_reduced(const ModeSpace& space,
                                                     const FeedbackParams& p, SystemKind kind,
                                                     const std::vector<double>& lambdas,
                                                     unsigned long long seed,
                                                     bool use_opnorm = false);

/// Full-state solve (i lambda I - A_h) U = F on the generator with upwind
/// delay lines, F = (0, f, 0, ...). Cross-checks the reduced form to O(1/N_rho).
double resolvent_full_crosscheck(const DiscreteGenerator& gen, double lambda,
                                 unsigned long long seed);

/// Nonlinear eigenvalue refinement for the reduced impedance problem: from a
/// starting guess (z0, v0), Rayleigh-type residual iteration on R(z) v = 0.
struct ImpedanceEig {
    cplx z;
    Eigen::VectorXcd v;
    int iterations = 0;
    bool converged = false;
};
ImpedanceEig impedance_eig_newton(const ModeSpace& space, const FeedbackParams& p,
                                  SystemKind kind, cplx z0, const Eigen::VectorXcd& v0,
                                  int max_iter = 50, double tol = 1e-13);

/// Symmetric pencil (A, B) eigensolve with Rayleigh-quotient polish of the
/// lowest `refine` pairs. Returns ascending eigenvalues and B-normalized
/// eigenvectors as columns.
void pencil_eigs_refined(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int refine,
                         Eigen::VectorXd& values, Eigen::MatrixXd& vectors);

/// Largest sweep frequency the mesh resolves: 0.5 sqrt(Lambda*) where Lambda*
/// is the largest clamped-free pencil eigenvalue stable to `rtol` between
/// `elements` and 2x elements.
double resolved_band_limit(const Annulus& geom, const PlateConfig& cfg, int mode_n,
                           int elements, double rtol = 1e-6);

}  // namespace platelab
