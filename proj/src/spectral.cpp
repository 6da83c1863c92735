#include "platelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace platelab {

namespace {

cplx imp1_of(const FeedbackParams& p, SystemKind kind, cplx z) {
    const cplx e = std::exp(-z * p.tau1);
    if (kind == SystemKind::System2) return z * (p.beta1 + p.beta2 * e);
    return z / (z + p.beta1 + p.beta2 * e);
}

cplx imp2_of(const FeedbackParams& p, SystemKind kind, cplx z) {
    const cplx e = std::exp(-z * p.tau2);
    if (kind == SystemKind::System2) return z * (p.gamma1 + p.gamma2 * e);
    return z / (z + p.gamma1 + p.gamma2 * e);
}

cplx imp1_deriv(const FeedbackParams& p, SystemKind kind, cplx z) {
    const cplx e = std::exp(-z * p.tau1);
    if (kind == SystemKind::System2)
        return p.beta1 + p.beta2 * e - z * p.tau1 * p.beta2 * e;
    const cplx C = 1.0 / (z + p.beta1 + p.beta2 * e);
    const cplx Cp = -(1.0 - p.tau1 * p.beta2 * e) * C * C;
    return C + z * Cp;
}

cplx imp2_deriv(const FeedbackParams& p, SystemKind kind, cplx z) {
    const cplx e = std::exp(-z * p.tau2);
    if (kind == SystemKind::System2)
        return p.gamma1 + p.gamma2 * e - z * p.tau2 * p.gamma2 * e;
    const cplx C = 1.0 / (z + p.gamma1 + p.gamma2 * e);
    const cplx Cp = -(1.0 - p.tau2 * p.gamma2 * e) * C * C;
    return C + z * Cp;
}

}  // namespace

std::vector<cplx> generator_spectrum(const DiscreteGenerator& gen, int count) {
    if (count > gen.dim) throw std::invalid_argument("generator_spectrum: count > dim");
    Eigen::MatrixXd A = gen.matrix();

    const Eigen::VectorXd wtail = gen.tail_energy_weights();
    const bool energy_coords = (wtail.size() == 0) || (wtail.minCoeff() > 0.0);
    if (energy_coords) {
        const int nd = gen.space.ndof;
        Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(gen.dim, gen.dim);
        Q.topLeftCorner(nd, nd) = gen.space.K;
        Q.block(nd, nd, nd, nd) = gen.space.M;
        for (int i = 0; i < wtail.size(); ++i) Q(2 * nd + i, 2 * nd + i) = wtail(i);
        Eigen::LLT<Eigen::MatrixXd> llt(Q);
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd L = llt.matrixL();
            // A_tilde = L^T A L^{-T}
            Eigen::MatrixXd Bt = L.triangularView<Eigen::Lower>().solve(A.transpose());
            A = L.transpose() * Bt.transpose();
        }
    }

    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("generator_spectrum: eigensolver failed (norm " +
                                 std::to_string(A.norm()) + ")");
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + gen.dim);
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    ev.resize(count);
    return ev;
}

void pencil_eigs_refined(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int refine,
                         Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("pencil_eigs_refined: eigensolver failed");
    values = es.eigenvalues();
    vectors = es.eigenvectors();

    const int n = int(values.size());
    refine = std::min(refine, n);
    for (int k = 0; k < refine; ++k) {
        double theta = values(k);
        Eigen::VectorXd x = vectors.col(k);
        for (int it = 0; it < 2; ++it) {
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(A - theta * B);
            Eigen::VectorXd y = lu.solve(B * x);
            if (!y.allFinite()) break;
            const double bn = std::sqrt(y.dot(B * y));
            if (!(bn > 0.0) || !std::isfinite(bn)) break;
            x = y / bn;
            theta = x.dot(A * x) / x.dot(B * x);
        }
        values(k) = theta;
        vectors.col(k) = x / std::sqrt(x.dot(B * x));
    }
}

std::vector<TEigenpair> t_operator_eigs(const ModeSpace& space, int count) {
    if (count > space.ndof) throw std::invalid_argument("t_operator_eigs: count > ndof");
    const double lg = space.ell_gamma;
    Eigen::MatrixXd Kt =
        space.K + lg * (space.trace_slope.transpose() * space.trace_slope +
                        space.trace_value.transpose() * space.trace_value);

    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    pencil_eigs_refined(Kt, space.M, count, values, vectors);
    if (values(0) <= 0.0)
        throw std::runtime_error("t_operator_eigs: assembled form not positive definite");

    std::vector<TEigenpair> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        TEigenpair p;
        p.mu4 = values(k);
        p.phi = vectors.col(k);
        p.mode_n = space.n;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<QuasimodeSample> quasimode_test(const ModeSpace& space, const FeedbackParams& p,
                                            const std::vector<TEigenpair>& pairs) {
    std::vector<QuasimodeSample> out;
    out.reserve(pairs.size());
    const double lg = space.ell_gamma;
    for (const TEigenpair& pr : pairs) {
        const double mu4 = pr.mu4;
        const double lam = std::sqrt(mu4);  // mu^2
        const double dn = (space.trace_slope * pr.phi)(0);
        const double vl = (space.trace_value * pr.phi)(0);
        const double a_phi = pr.phi.dot(space.K * pr.phi);

        QuasimodeSample s;
        s.mu = std::pow(mu4, 0.25);
        s.mode_n = pr.mode_n;
        const double u2 = a_phi / mu4 + 1.0 + lg * (dn * dn + vl * vl) / mu4 +
                          (p.tau1 * std::abs(p.beta2) * lg * dn * dn +
                           p.tau2 * std::abs(p.gamma2) * lg * vl * vl) /
                              mu4;
        const cplx c3 = (p.beta1 + p.beta2 * std::exp(cplx(0, -lam * p.tau1))) / cplx(0, lam);
        const cplx c4 = (p.gamma1 + p.gamma2 * std::exp(cplx(0, -lam * p.tau2))) / cplx(0, lam);
        const double f2 = lg * (std::norm(c3) * dn * dn + std::norm(c4) * vl * vl);
        s.u_norm = std::sqrt(u2);
        s.f_norm = std::sqrt(f2);
        out.push_back(s);
    }
    return out;
}

Eigen::MatrixXcd impedance_matrix(const ModeSpace& space, const FeedbackParams& p,
                                  SystemKind kind, cplx z) {
    const double lg = space.ell_gamma;
    Eigen::MatrixXcd R = space.K.cast<cplx>() + (z * z) * space.M.cast<cplx>();
    const Eigen::VectorXd ts = space.trace_slope.transpose();
    const Eigen::VectorXd tv = space.trace_value.transpose();
    R += (lg * imp1_of(p, kind, z)) * (ts * ts.transpose()).cast<cplx>();
    R += (lg * imp2_of(p, kind, z)) * (tv * tv.transpose()).cast<cplx>();
    return R;
}

Eigen::MatrixXcd impedance_matrix_deriv(const ModeSpace& space, const FeedbackParams& p,
                                        SystemKind kind, cplx z) {
    const double lg = space.ell_gamma;
    Eigen::MatrixXcd R = (2.0 * z) * space.M.cast<cplx>();
    const Eigen::VectorXd ts = space.trace_slope.transpose();
    const Eigen::VectorXd tv = space.trace_value.transpose();
    R += (lg * imp1_deriv(p, kind, z)) * (ts * ts.transpose()).cast<cplx>();
    R += (lg * imp2_deriv(p, kind, z)) * (tv * tv.transpose()).cast<cplx>();
    return R;
}

Eigen::VectorXd random_mass_normalized(const ModeSpace& space, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd f(space.ndof);
    for (int i = 0; i < space.ndof; ++i) {
        // Box-Muller keeps the stream implementation-independent
        const double u1 = std::max(unif(rng), 1e-300), u2 = unif(rng);
        f(i) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    const double mn = std::sqrt(f.dot(space.M * f));
    return f / mn;
}

namespace {

// squared Hilbert norm of the reconstructed state given the reduced solution u
double reconstructed_norm_sq(const ModeSpace& space, const FeedbackParams& p, SystemKind kind,
                             double lambda, const Eigen::VectorXcd& u) {
    const Eigen::VectorXd ur = u.real(), ui = u.imag();
    const double lg = space.ell_gamma;
    double acc = ur.dot(space.K * ur) + ui.dot(space.K * ui);
    acc += lambda * lambda * (ur.dot(space.M * ur) + ui.dot(space.M * ui));
    cplx dn = 0.0, vl = 0.0;
    for (int i = 0; i < space.ndof; ++i) {
        dn += space.trace_slope(i) * u(i);
        vl += space.trace_value(i) * u(i);
    }
    const cplx il(0.0, lambda);
    if (kind == SystemKind::System1) {
        const cplx C = 1.0 / (il + p.beta1 + p.beta2 * std::exp(-il * p.tau1));
        const cplx Kc = 1.0 / (il + p.gamma1 + p.gamma2 * std::exp(-il * p.tau2));
        const double eta2 = std::norm(il * C * dn);
        const double xi2 = std::norm(il * Kc * vl);
        acc += lg * eta2 * (1.0 + p.tau1 * std::abs(p.beta2));
        acc += lg * xi2 * (1.0 + p.tau2 * std::abs(p.gamma2));
    } else {
        acc += p.tau1 * std::abs(p.beta2) * lg * std::norm(il * dn);
        acc += p.tau2 * std::abs(p.gamma2) * lg * std::norm(il * vl);
    }
    return acc;
}

// weight matrix of reconstructed_norm_sq as a quadratic form in u
Eigen::MatrixXd reconstruction_weight(const ModeSpace& space, const FeedbackParams& p,
                                      SystemKind kind, double lambda) {
    const double lg = space.ell_gamma;
    Eigen::MatrixXd W = space.K + lambda * lambda * space.M;
    const cplx il(0.0, lambda);
    double cs, cv;
    if (kind == SystemKind::System1) {
        const cplx C = 1.0 / (il + p.beta1 + p.beta2 * std::exp(-il * p.tau1));
        const cplx Kc = 1.0 / (il + p.gamma1 + p.gamma2 * std::exp(-il * p.tau2));
        cs = lambda * lambda * std::norm(C) * lg * (1.0 + p.tau1 * std::abs(p.beta2));
        cv = lambda * lambda * std::norm(Kc) * lg * (1.0 + p.tau2 * std::abs(p.gamma2));
    } else {
        cs = lambda * lambda * p.tau1 * std::abs(p.beta2) * lg;
        cv = lambda * lambda * p.tau2 * std::abs(p.gamma2) * lg;
    }
    W += cs * space.trace_slope.transpose() * space.trace_slope;
    W += cv * space.trace_value.transpose() * space.trace_value;
    return W;
}

}  // namespace

std::vector<ResolventSample> resolvent_sweep_reduced(const ModeSpace& space,
                                                     const FeedbackParams& p, SystemKind kind,
                                                     const std::vector<double>& lambdas,
                                                     unsigned long long seed, bool use_opnorm) {
    const Eigen::VectorXd f0 = random_mass_normalized(space, seed);
    std::vector<ResolventSample> out;
    out.reserve(lambdas.size());
    for (double lam : lambdas) {
        const cplx il(0.0, lam);
        Eigen::MatrixXcd R = impedance_matrix(space, p, kind, il);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(R);

        ResolventSample s;
        s.lambda = lam;
        if (!use_opnorm) {
            const Eigen::VectorXcd rhs = (space.M * f0).cast<cplx>();
            const Eigen::VectorXcd u = lu.solve(rhs);
            if (!u.allFinite())
                throw std::runtime_error("resolvent_sweep_reduced: singular system at lambda " +
                                         std::to_string(lam));
            s.gain = std::sqrt(reconstructed_norm_sq(space, p, kind, lam, u));
        } else {
            const Eigen::MatrixXd W = reconstruction_weight(space, p, kind, lam);
            Eigen::VectorXcd f = f0.cast<cplx>();
            double gain2 = 0.0;
            for (int it = 0; it < 40; ++it) {
                const Eigen::VectorXcd u = lu.solve(space.M.cast<cplx>() * f);
                const Eigen::VectorXcd w = W.cast<cplx>() * u;
                gain2 = std::real(u.dot(w));  // f is M-normalized
                Eigen::VectorXcd g = lu.adjoint().solve(w);
                const double gn = std::sqrt(std::abs(std::real(g.dot(space.M.cast<cplx>() * g))));
                if (!(gn > 0.0) || !std::isfinite(gn)) break;
                f = g / gn;
            }
            s.gain = std::sqrt(gain2);
        }
        out.push_back(s);
    }
    return out;
}

double resolvent_full_crosscheck(const DiscreteGenerator& gen, double lambda,
                                 unsigned long long seed) {
    const Eigen::VectorXd f = random_mass_normalized(gen.space, seed);
    Eigen::VectorXcd F = Eigen::VectorXcd::Zero(gen.dim);
    F.segment(gen.off_v, gen.space.ndof) = f.cast<cplx>();

    Eigen::MatrixXcd A = (-gen.matrix()).cast<cplx>();
    A.diagonal().array() += cplx(0.0, lambda);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const Eigen::VectorXcd U = lu.solve(F);
    if (!U.allFinite())
        throw std::runtime_error("resolvent_full_crosscheck: singular shift at lambda " +
                                 std::to_string(lambda));
    return std::sqrt(gen.hilbert_norm_sq(U) / gen.hilbert_norm_sq(F));
}

ImpedanceEig impedance_eig_newton(const ModeSpace& space, const FeedbackParams& p,
                                  SystemKind kind, cplx z0, const Eigen::VectorXcd& v0,
                                  int max_iter, double tol) {
    ImpedanceEig out;
    out.z = z0;
    out.v = v0 / v0.norm();
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::MatrixXcd R = impedance_matrix(space, p, kind, out.z);
        const Eigen::MatrixXcd Rp = impedance_matrix_deriv(space, p, kind, out.z);
        const cplx num = out.v.dot(R * out.v);
        const cplx den = out.v.dot(Rp * out.v);
        out.iterations = it + 1;
        if (den == cplx(0.0)) break;
        const cplx dz = num / den;
        out.z -= dz;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(impedance_matrix(space, p, kind, out.z));
        Eigen::VectorXcd y = lu.solve(Rp * out.v);
        if (y.allFinite() && y.norm() > 0.0) out.v = y / y.norm();
        if (std::abs(dz) <= tol * std::max(1.0, std::abs(out.z))) {
            out.converged = true;
            break;
        }
    }
    return out;
}

double resolved_band_limit(const Annulus& geom, const PlateConfig& cfg, int mode_n,
                           int elements, double rtol) {
    const ModeSpace coarse = build_mode_space(geom, cfg, mode_n, elements);
    const ModeSpace fine = build_mode_space(geom, cfg, mode_n, 2 * elements);
    Eigen::VectorXd vc, vf;
    Eigen::MatrixXd wc, wf;
    pencil_eigs_refined(coarse.K, coarse.M, std::min(40, coarse.ndof), vc, wc);
    pencil_eigs_refined(fine.K, fine.M, std::min(40, fine.ndof), vf, wf);
    double lam2 = vc(0);
    for (int k = 0; k < vc.size() && k < vf.size(); ++k) {
        if (std::abs(vc(k) - vf(k)) <= rtol * std::abs(vf(k)))
            lam2 = vc(k);
        else
            break;
    }
    return 0.5 * std::sqrt(lam2);
}

}  // namespace platelab
