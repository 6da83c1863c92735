#include "platelab/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace platelab {

HypothesisReport validate_params(const FeedbackParams& p, double is1_tol) {
    if (!(p.beta1 > 0.0) || !(p.gamma1 > 0.0))
        throw std::invalid_argument("validate_params: beta1, gamma1 must be positive");
    if (!(p.tau1 > 0.0) || !(p.tau2 > 0.0))
        throw std::invalid_argument("validate_params: tau1, tau2 must be positive");
    if (!std::isfinite(p.beta2) || !std::isfinite(p.gamma2))
        throw std::invalid_argument("validate_params: beta2, gamma2 must be finite");

    const double ab = std::abs(p.beta2), ag = std::abs(p.gamma2);
    HypothesisReport rep;
    rep.h_satisfied = (ab < p.beta1) && (ag < p.gamma1);
    rep.is1 = (std::abs(ab - p.beta1) <= is1_tol) && (std::abs(ag - p.gamma1) <= is1_tol);
    rep.is2 = (ab >= p.beta1) && (ag >= p.gamma1) && (ab - p.beta1 + ag - p.gamma1 > 0.0);
    return rep;
}

DelayLine::DelayLine(double tau_, int cells_, double weight_)
    : tau(tau_), cells(cells_), weight(weight_) {
    if (cells < 2) throw std::invalid_argument("DelayLine: cells < 2");
    values = Eigen::VectorXcd::Zero(cells + 1);
}

cplx DelayLine::exact_shift(cplx inflow) {
    const cplx outflow = values(cells);
    for (int j = cells; j >= 1; --j) values(j) = values(j - 1);
    values(0) = inflow;
    return outflow;
}

double DelayLine::trapezoid_norm_sq() const {
    const double drho = 1.0 / cells;
    double acc = 0.5 * (std::norm(values(0)) + std::norm(values(cells)));
    for (int j = 1; j < cells; ++j) acc += std::norm(values(j));
    return drho * acc;
}

double DelayLine::cell_norm_sq() const {
    const double drho = 1.0 / cells;
    double acc = 0.0;
    for (int j = 0; j < cells; ++j) acc += std::norm(values(j));
    return drho * acc;
}

DiscreteGenerator build_generator(SystemKind kind, const ModeSpace& space,
                                  const FeedbackParams& p, int n_rho1, int n_rho2) {
    if (n_rho1 < 2 || n_rho2 < 2)
        throw std::invalid_argument("build_generator: n_rho < 2");

    DiscreteGenerator g;
    g.kind = kind;
    g.space = space;
    g.params = p;
    g.n_rho1 = n_rho1;
    g.n_rho2 = n_rho2;

    const int nd = space.ndof;
    g.off_u = 0;
    g.off_v = nd;
    if (kind == SystemKind::System1) {
        g.off_eta = 2 * nd;
        g.off_xi = 2 * nd + 1;
        g.off_z1 = 2 * nd + 2;
    } else {
        g.off_z1 = 2 * nd;
    }
    g.off_z2 = g.off_z1 + n_rho1 + 1;
    g.dim = g.off_z2 + n_rho2 + 1;

    g.mass_llt.compute(space.M);
    if (g.mass_llt.info() != Eigen::Success)
        throw std::runtime_error("build_generator: mass matrix not SPD");
    g.stiff_llt.compute(space.K);
    if (g.stiff_llt.info() != Eigen::Success)
        throw std::runtime_error("build_generator: stiffness matrix not SPD on the clamped space");
    return g;
}

namespace {
cplx rdot(const Eigen::RowVectorXd& row, const Eigen::Ref<const Eigen::VectorXcd>& x) {
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < row.size(); ++i) acc += row(i) * x(i);
    return acc;
}
}  // namespace

Eigen::VectorXcd DiscreteGenerator::apply(const Eigen::VectorXcd& x) const {
    if (x.size() != dim) throw std::invalid_argument("generator apply: dimension mismatch");
    const int nd = space.ndof;
    const auto u = x.segment(off_u, nd);
    const auto v = x.segment(off_v, nd);
    const auto z1 = x.segment(off_z1, n_rho1 + 1);
    const auto z2 = x.segment(off_z2, n_rho2 + 1);
    const double lg = space.ell_gamma;
    const Eigen::VectorXcd ts = space.trace_slope.transpose().cast<cplx>();
    const Eigen::VectorXcd tv = space.trace_value.transpose().cast<cplx>();

    Eigen::VectorXcd dx = Eigen::VectorXcd::Zero(dim);
    dx.segment(off_u, nd) = v;

    Eigen::VectorXcd rhs_v = -(space.K.cast<cplx>() * u);
    cplx inflow1, inflow2;
    if (kind == SystemKind::System1) {
        const cplx eta = x(off_eta), xi = x(off_xi);
        rhs_v -= (lg * eta) * ts;
        rhs_v -= (lg * xi) * tv;
        const cplx dnv = rdot(space.trace_slope, v);
        const cplx vval = rdot(space.trace_value, v);
        dx(off_eta) = dnv - params.beta1 * eta - params.beta2 * z1(n_rho1);
        dx(off_xi) = vval - params.gamma1 * xi - params.gamma2 * z2(n_rho2);
        inflow1 = eta;
        inflow2 = xi;
    } else {
        const cplx dnv = rdot(space.trace_slope, v);
        const cplx vval = rdot(space.trace_value, v);
        rhs_v -= lg * (params.beta1 * dnv + params.beta2 * z1(n_rho1)) * ts;
        rhs_v -= lg * (params.gamma1 * vval + params.gamma2 * z2(n_rho2)) * tv;
        inflow1 = dnv;
        inflow2 = vval;
    }
    dx.segment(off_v, nd) = mass_llt.solve(rhs_v.real()).cast<cplx>() +
                            cplx(0, 1) * mass_llt.solve(rhs_v.imag()).cast<cplx>();

    const double c1 = 1.0 / (params.tau1 / n_rho1);
    dx(off_z1) = c1 * (inflow1 - z1(0));
    for (int j = 1; j <= n_rho1; ++j) dx(off_z1 + j) = c1 * (z1(j - 1) - z1(j));
    const double c2 = 1.0 / (params.tau2 / n_rho2);
    dx(off_z2) = c2 * (inflow2 - z2(0));
    for (int j = 1; j <= n_rho2; ++j) dx(off_z2 + j) = c2 * (z2(j - 1) - z2(j));
    return dx;
}

Eigen::MatrixXd DiscreteGenerator::matrix() const {
    const int nd = space.ndof;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    A.block(off_u, off_v, nd, nd).setIdentity();

    const Eigen::MatrixXd Minv_K = mass_llt.solve(space.K);
    const Eigen::VectorXd Minv_ts = mass_llt.solve(space.trace_slope.transpose());
    const Eigen::VectorXd Minv_tv = mass_llt.solve(space.trace_value.transpose());
    const double lg = space.ell_gamma;

    A.block(off_v, off_u, nd, nd) = -Minv_K;
    if (kind == SystemKind::System1) {
        A.block(off_v, off_eta, nd, 1) = -lg * Minv_ts;
        A.block(off_v, off_xi, nd, 1) = -lg * Minv_tv;
        A.block(off_eta, off_v, 1, nd) = space.trace_slope;
        A(off_eta, off_eta) = -params.beta1;
        A(off_eta, off_z1 + n_rho1) = -params.beta2;
        A.block(off_xi, off_v, 1, nd) = space.trace_value;
        A(off_xi, off_xi) = -params.gamma1;
        A(off_xi, off_z2 + n_rho2) = -params.gamma2;
    } else {
        A.block(off_v, off_v, nd, nd) =
            -lg * (params.beta1 * Minv_ts * space.trace_slope +
                   params.gamma1 * Minv_tv * space.trace_value);
        A.block(off_v, off_z1 + n_rho1, nd, 1) = -lg * params.beta2 * Minv_ts;
        A.block(off_v, off_z2 + n_rho2, nd, 1) = -lg * params.gamma2 * Minv_tv;
    }

    const double c1 = double(n_rho1) / params.tau1;
    if (kind == SystemKind::System1)
        A(off_z1, off_eta) = c1;
    else
        A.block(off_z1, off_v, 1, nd) = c1 * space.trace_slope;
    A(off_z1, off_z1) = -c1;
    for (int j = 1; j <= n_rho1; ++j) {
        A(off_z1 + j, off_z1 + j - 1) = c1;
        A(off_z1 + j, off_z1 + j) = -c1;
    }
    const double c2 = double(n_rho2) / params.tau2;
    if (kind == SystemKind::System1)
        A(off_z2, off_xi) = c2;
    else
        A.block(off_z2, off_v, 1, nd) = c2 * space.trace_value;
    A(off_z2, off_z2) = -c2;
    for (int j = 1; j <= n_rho2; ++j) {
        A(off_z2 + j, off_z2 + j - 1) = c2;
        A(off_z2 + j, off_z2 + j) = -c2;
    }
    return A;
}

Eigen::VectorXd DiscreteGenerator::tail_energy_weights() const {
    const int tail = dim - 2 * space.ndof;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(tail);
    const double lg = space.ell_gamma;
    int base = 0;
    if (kind == SystemKind::System1) {
        w(0) = lg;  // eta
        w(1) = lg;  // xi
        base = 2;
    }
    const double w1 = params.tau1 * std::abs(params.beta2) * lg / n_rho1;
    for (int j = 0; j <= n_rho1; ++j)
        w(base + j) = w1 * ((j == 0 || j == n_rho1) ? 0.5 : 1.0);
    base += n_rho1 + 1;
    const double w2 = params.tau2 * std::abs(params.gamma2) * lg / n_rho2;
    for (int j = 0; j <= n_rho2; ++j)
        w(base + j) = w2 * ((j == 0 || j == n_rho2) ? 0.5 : 1.0);
    return w;
}

double DiscreteGenerator::hilbert_norm_sq(const Eigen::VectorXcd& x) const {
    const int nd = space.ndof;
    const auto u = x.segment(off_u, nd);
    const auto v = x.segment(off_v, nd);
    // factored forms u^H K u = ||L_K^T u||^2 avoid cancellation on stiff meshes
    const auto Uk = stiff_llt.matrixU();
    const auto Um = mass_llt.matrixU();
    double acc = (Uk * u.real()).squaredNorm() + (Uk * u.imag()).squaredNorm() +
                 (Um * v.real()).squaredNorm() + (Um * v.imag()).squaredNorm();
    const Eigen::VectorXd w = tail_energy_weights();
    for (int i = 0; i < w.size(); ++i) acc += w(i) * std::norm(x(2 * nd + i));
    return acc;
}

}  // namespace platelab
