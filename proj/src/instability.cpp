#include "platelab/instability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "platelab/spectral.hpp"

namespace platelab {

namespace {

constexpr double kPi = std::numbers::pi;

double rayleigh_is2(double s, double a) {
    return 0.5 * (s + std::sqrt(s * s + 4.0 * a));
}

// lambda tau in [0, 2pi) solving cos(theta) = -b1/b2 with the sign convention
// b2 sin(theta) = +sqrt(b2^2-b1^2) (positive branch) or its mirror.
double base_phase(double b1, double b2, bool positive_sine) {
    const double c = -b1 / b2;
    const double theta = std::acos(std::clamp(c, -1.0, 1.0));
    const bool sine_nonneg = positive_sine ? (b2 > 0.0) : (b2 < 0.0);
    return sine_nonneg ? theta : 2.0 * kPi - theta;
}

std::vector<double> phase_menu(double lambda, double theta, int entries) {
    std::vector<double> taus;
    for (int j = 0; j < entries; ++j) {
        const double t = (theta + 2.0 * kPi * j) / lambda;
        if (t > 0.0) taus.push_back(t);
    }
    return taus;
}

}  // namespace

InstabilityDesign design_is1(const ModeSpace& space, int k, int l, int which_eig) {
    if (which_eig < 0 || which_eig >= space.ndof)
        throw std::invalid_argument("design_is1: which_eig out of range");

    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    pencil_eigs_refined(space.K, space.M, which_eig + 1, values, vectors);
    if (values(which_eig) <= 0.0)
        throw std::runtime_error("design_is1: nonpositive free-plate eigenvalue");

    InstabilityDesign d;
    d.kind = InstabilityCase::IS1;
    d.mode_n = space.n;
    d.lambda = std::sqrt(values(which_eig));
    d.phi = vectors.col(which_eig);
    const double dn = (space.trace_slope * d.phi)(0);
    const double vl = (space.trace_value * d.phi)(0);
    d.q = space.ell_gamma * vl * vl;
    d.q_nu = space.ell_gamma * dn * dn;
    for (int j = 0; j <= k; ++j) d.tau1_choices.push_back((2.0 * j + 1.0) * kPi / d.lambda);
    for (int j = 0; j <= l; ++j) d.tau2_choices.push_back((2.0 * j + 1.0) * kPi / d.lambda);
    return d;
}

InstabilityDesign design_is2(const ModeSpace& space, const FeedbackParams& p,
                             bool positive_sine_branch, int menu_entries) {
    const HypothesisReport rep = validate_params(p);
    if (!(rep.is1 || rep.is2))
        throw std::invalid_argument("design_is2: params not in the |beta2|>=beta1, |gamma2|>=gamma1 regime");

    const double sb2 = p.beta2 * p.beta2 - p.beta1 * p.beta1;
    const double sg2 = p.gamma2 * p.gamma2 - p.gamma1 * p.gamma1;
    const double sb = std::sqrt(std::max(sb2, 0.0));
    const double sg = std::sqrt(std::max(sg2, 0.0));
    const double lg = space.ell_gamma;
    const int nd = space.ndof;

    const Eigen::MatrixXd G = sb * lg * space.trace_slope.transpose() * space.trace_slope +
                              sg * lg * space.trace_value.transpose() * space.trace_value;

    // companion linearization on (phi, lambda phi)
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * nd, 2 * nd);
    C.topRightCorner(nd, nd).setIdentity();
    Eigen::LLT<Eigen::MatrixXd> mllt(space.M);
    C.bottomLeftCorner(nd, nd) = mllt.solve(space.K);
    C.bottomRightCorner(nd, nd) = mllt.solve(G);

    Eigen::EigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success) throw std::runtime_error("design_is2: QEP eigensolver failed");

    double best_f = std::numeric_limits<double>::infinity();
    double best_lambda = 0.0;
    Eigen::VectorXd best_phi;
    for (int i = 0; i < 2 * nd; ++i) {
        const cplx lam = es.eigenvalues()(i);
        if (!(lam.real() > 0.0) || std::abs(lam.imag()) > 1e-8 * std::abs(lam)) continue;
        Eigen::VectorXcd top = es.eigenvectors().col(i).head(nd);
        Eigen::VectorXd phi = top.real();
        if (phi.norm() < 1e-8 * top.norm()) phi = top.imag();
        const double mn = std::sqrt(phi.dot(space.M * phi));
        if (!(mn > 0.0)) continue;
        phi /= mn;
        const double s = phi.dot(G * phi);
        const double a = phi.dot(space.K * phi);
        const double f = rayleigh_is2(s, a);
        if (f < best_f) {
            best_f = f;
            best_lambda = lam.real();
            best_phi = phi;
        }
    }
    if (!best_phi.size())
        throw std::runtime_error("design_is2: no real positive eigenvalue found");

    // polish (lambda, phi) on the real quadratic pencil K + lambda G - lambda^2 M
    double lam = best_lambda;
    Eigen::VectorXd phi = best_phi;
    for (int it = 0; it < 3; ++it) {
        const Eigen::MatrixXd R = space.K + lam * G - lam * lam * space.M;
        const Eigen::MatrixXd Rp = G - 2.0 * lam * space.M;
        const double num = phi.dot(R * phi);
        const double den = phi.dot(Rp * phi);
        if (den == 0.0) break;
        lam -= num / den;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(space.K + lam * G - lam * lam * space.M);
        Eigen::VectorXd y = lu.solve((G - 2.0 * lam * space.M) * phi);
        if (y.allFinite() && y.norm() > 0.0) {
            const double mn = std::sqrt(y.dot(space.M * y));
            if (mn > 0.0 && std::isfinite(mn)) phi = y / mn;
        }
    }

    InstabilityDesign d;
    d.kind = InstabilityCase::IS2;
    d.mode_n = space.n;
    d.lambda = lam;
    d.phi = phi;
    const double dn = (space.trace_slope * d.phi)(0);
    const double vl = (space.trace_value * d.phi)(0);
    d.q = lg * vl * vl;
    d.q_nu = lg * dn * dn;
    d.tau1_choices =
        phase_menu(d.lambda, base_phase(p.beta1, p.beta2, positive_sine_branch), menu_entries);
    d.tau2_choices =
        phase_menu(d.lambda, base_phase(p.gamma1, p.gamma2, positive_sine_branch), menu_entries);
    return d;
}

double is2_fixed_point_lambda(const ModeSpace& space, const FeedbackParams& p, int max_iter,
                              double rtol) {
    const double sb = std::sqrt(std::max(p.beta2 * p.beta2 - p.beta1 * p.beta1, 0.0));
    const double sg = std::sqrt(std::max(p.gamma2 * p.gamma2 - p.gamma1 * p.gamma1, 0.0));
    const double lg = space.ell_gamma;
    const Eigen::MatrixXd G = sb * lg * space.trace_slope.transpose() * space.trace_slope +
                              sg * lg * space.trace_value.transpose() * space.trace_value;

    double lam = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        pencil_eigs_refined(space.K + lam * G, space.M, 1, values, vectors);
        const Eigen::VectorXd w = vectors.col(0);
        const double s = w.dot(G * w);
        const double a = w.dot(space.K * w);
        const double next = rayleigh_is2(s, a);
        const double delta = std::abs(next - lam);
        lam = next;
        if (delta <= rtol * lam) break;
    }
    return lam;
}

VerifyReport verify_design(const InstabilityDesign& design, const FeedbackParams& p,
                           const ModeSpace& space, const VerifyOptions& opt) {
    const HypothesisReport rep = validate_params(p);
    if (design.kind == InstabilityCase::IS1 && !rep.is1)
        throw std::invalid_argument("verify_design: params are not IS1");
    if (design.kind == InstabilityCase::IS2 && !(rep.is1 || rep.is2))
        throw std::invalid_argument("verify_design: params are not IS2");

    if (opt.tau1_index >= int(design.tau1_choices.size()) ||
        opt.tau2_index >= int(design.tau2_choices.size()))
        throw std::invalid_argument("verify_design: delay menu index out of range");
    const double tau1 = design.tau1_choices[opt.tau1_index];
    const double tau2 = design.tau2_choices[opt.tau2_index];

    // commensurate cell counts: tau1/tau2 = n1/n2 with small integers
    long n1 = 0, n2 = 0;
    {
        const double ratio = tau1 / tau2;
        long best_q = 0;
        double best_err = 1e300;
        for (long q = 1; q <= 512; ++q) {
            const long pnum = std::lround(ratio * q);
            if (pnum < 1) continue;
            const double err = std::abs(ratio - double(pnum) / q);
            if (err < best_err) {
                best_err = err;
                best_q = q;
                n1 = pnum;
                n2 = q;
            }
            if (best_err < 1e-13) break;
        }
        if (best_q == 0 || best_err > 1e-9)
            throw std::runtime_error("verify_design: delays not commensurate within cap");
        const long m = std::max<long>(1, (opt.min_cells + std::min(n1, n2) - 1) / std::min(n1, n2));
        n1 *= m;
        n2 *= m;
        if (n1 > opt.max_cells || n2 > opt.max_cells)
            throw std::runtime_error("verify_design: N_rho adjustment exceeds cap");
    }

    FeedbackParams pd = p;
    pd.tau1 = tau1;
    pd.tau2 = tau2;
    const DiscreteGenerator gen = build_generator(SystemKind::System2, space, pd, int(n1), int(n2));
    const double dt = tau1 / double(n1);

    // periodic ansatz u = e^{i lambda t} phi; staggered half-step line history
    const double lam = design.lambda;
    SystemState s0 = zero_state(gen);
    const Eigen::VectorXcd phi_c = design.phi.cast<cplx>();
    s0.x.segment(gen.off_u, space.ndof) = phi_c;
    s0.x.segment(gen.off_v, space.ndof) = cplx(0.0, lam) * phi_c;
    const cplx dn = cplx((space.trace_slope * design.phi)(0), 0.0);
    const cplx vl = cplx((space.trace_value * design.phi)(0), 0.0);
    for (int j = 0; j <= gen.n_rho1; ++j)
        s0.x(gen.off_z1 + j) = cplx(0.0, lam) * dn * std::exp(cplx(0.0, -lam * (j + 0.5) * dt));
    for (int j = 0; j <= gen.n_rho2; ++j)
        s0.x(gen.off_z2 + j) = cplx(0.0, lam) * vl * std::exp(cplx(0.0, -lam * (j + 0.5) * dt));

    const double t_end = opt.periods * 2.0 * kPi / lam;
    const Trajectory traj = simulate(gen, s0, dt, t_end, 0);

    VerifyReport rep_out;
    rep_out.dt = dt;
    rep_out.n_rho1 = int(n1);
    rep_out.n_rho2 = int(n2);
    const double e0 = traj.energies.front().total;
    const double eT = traj.energies.back().total;
    rep_out.energy_drift = (e0 > 0.0) ? std::abs(eT - e0) / e0 : 0.0;

    const Eigen::MatrixXcd R = impedance_matrix(space, pd, SystemKind::System2, cplx(0.0, lam));
    const Eigen::MatrixXcd Rp =
        impedance_matrix_deriv(space, pd, SystemKind::System2, cplx(0.0, lam));
    const cplx num = phi_c.dot(R * phi_c);
    const cplx den = phi_c.dot(Rp * phi_c);
    rep_out.eigen_residual = (den != cplx(0.0)) ? std::abs(num / den) : std::abs(num);
    return rep_out;
}

}  // namespace platelab
