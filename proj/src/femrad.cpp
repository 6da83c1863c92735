#include "platelab/femrad.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace platelab {

namespace {

// Hermite cubic shape values and first/second derivatives w.r.t. r on an
// element of width h, local coordinate xi in [0,1]. Slope dofs carry factor h.
struct Shapes {
    double H[4], dH[4], d2H[4];
};

Shapes hermite_shapes(double xi, double h) {
    Shapes s;
    const double xi2 = xi * xi, xi3 = xi2 * xi;
    s.H[0] = 1.0 - 3.0 * xi2 + 2.0 * xi3;
    s.H[1] = h * (xi - 2.0 * xi2 + xi3);
    s.H[2] = 3.0 * xi2 - 2.0 * xi3;
    s.H[3] = h * (-xi2 + xi3);
    s.dH[0] = (-6.0 * xi + 6.0 * xi2) / h;
    s.dH[1] = 1.0 - 4.0 * xi + 3.0 * xi2;
    s.dH[2] = (6.0 * xi - 6.0 * xi2) / h;
    s.dH[3] = -2.0 * xi + 3.0 * xi2;
    s.d2H[0] = (-6.0 + 12.0 * xi) / (h * h);
    s.d2H[1] = (-4.0 + 6.0 * xi) / h;
    s.d2H[2] = (6.0 - 12.0 * xi) / (h * h);
    s.d2H[3] = (-2.0 + 6.0 * xi) / h;
    return s;
}

}  // namespace

ModeSpace build_mode_space(const Annulus& geom, const PlateConfig& cfg, int n,
                           int elements) {
    if (elements < 2) throw std::invalid_argument("build_mode_space: elements < 2");
    if (n < 0) throw std::invalid_argument("build_mode_space: n < 0");

    ModeSpace sp;
    sp.n = n;
    sp.elements = elements;
    sp.geom = geom;
    sp.cfg = cfg;
    sp.ell = (n == 0) ? 2.0 * std::numbers::pi : std::numbers::pi;
    sp.ell_gamma = sp.ell * geom.r1;
    sp.nodes.resize(elements + 1);
    for (int i = 0; i <= elements; ++i)
        sp.nodes[i] = geom.r0 + (geom.r1 - geom.r0) * i / elements;

    const int nfull = 2 * (elements + 1);
    Eigen::MatrixXd Kf = Eigen::MatrixXd::Zero(nfull, nfull);
    Eigen::MatrixXd Mf = Eigen::MatrixXd::Zero(nfull, nfull);

    std::vector<double> xg, wg;
    gauss_legendre(6, xg, wg);
    const double mu = cfg.mu;
    const double nn = double(n) * double(n);

    for (int e = 0; e < elements; ++e) {
        const double a = sp.nodes[e], b = sp.nodes[e + 1];
        const double h = b - a;
        const int base = 2 * e;
        for (size_t q = 0; q < xg.size(); ++q) {
            const double xi = 0.5 * (xg[q] + 1.0);
            const double w = 0.5 * wg[q] * h;
            const double r = a + h * xi;
            const Shapes s = hermite_shapes(xi, h);
            // per-mode densities: L = u'' + u'/r - n^2 u/r^2, B = u'/r - n^2 u/r^2,
            // D = u'/r - u/r^2; a_n density = L L - (1-mu)(u'' B + B u'' - 2 n^2 D D)
            double L[4], B[4], D[4];
            for (int i = 0; i < 4; ++i) {
                B[i] = s.dH[i] / r - nn * s.H[i] / (r * r);
                L[i] = s.d2H[i] + B[i];
                D[i] = s.dH[i] / r - s.H[i] / (r * r);
            }
            const double wf = sp.ell * w * r;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const double kij = L[i] * L[j] -
                                       (1.0 - mu) * (s.d2H[i] * B[j] + B[i] * s.d2H[j] -
                                                     2.0 * nn * D[i] * D[j]);
                    Kf(base + i, base + j) += wf * kij;
                    Mf(base + i, base + j) += wf * s.H[i] * s.H[j];
                }
        }
    }

    // clamp uhat = uhat' = 0 at r0: drop the first node's two dofs
    sp.ndof = nfull - 2;
    sp.K = Kf.bottomRightCorner(sp.ndof, sp.ndof);
    sp.M = Mf.bottomRightCorner(sp.ndof, sp.ndof);
    sp.trace_value = Eigen::RowVectorXd::Zero(sp.ndof);
    sp.trace_slope = Eigen::RowVectorXd::Zero(sp.ndof);
    sp.trace_value(sp.ndof - 2) = 1.0;
    sp.trace_slope(sp.ndof - 1) = 1.0;
    return sp;
}

RadialEval radial_eval(const ModeSpace& space, const Eigen::VectorXcd& dofs, double r) {
    if (dofs.size() != space.ndof)
        throw std::invalid_argument("radial_eval: dof size mismatch");
    const double r0 = space.geom.r0, r1 = space.geom.r1;
    if (r < r0 - 1e-12 * r1 || r > r1 + 1e-12 * r1)
        throw std::out_of_range("radial_eval: radius outside [r0, r1]");
    r = std::min(std::max(r, r0), r1);

    const double hr = (r1 - r0) / space.elements;
    int e = std::min(int((r - r0) / hr), space.elements - 1);
    const double a = space.nodes[e];
    const double h = space.nodes[e + 1] - a;
    const double xi = (r - a) / h;
    const Shapes s = hermite_shapes(xi, h);

    // global dofs with the clamped pair prepended as zeros
    cplx d[4] = {0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
        const int g = 2 * e + i - 2;  // index into clamped dof vector
        if (g >= 0) d[i] = dofs(g);
    }
    RadialEval out{0.0, 0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
        out.u += d[i] * s.H[i];
        out.du += d[i] * s.dH[i];
        out.d2u += d[i] * s.d2H[i];
    }
    return out;
}

std::vector<Deriv3> reconstruct_field(const ModeSpace& space, const Eigen::VectorXcd& dofs,
                                      const std::vector<std::array<double, 2>>& rtheta_grid) {
    std::vector<Deriv3> out;
    out.reserve(rtheta_grid.size());
    const double n = space.n;
    for (const auto& [r, th] : rtheta_grid) {
        const RadialEval re = radial_eval(space, dofs, r);
        const double c = std::cos(th), s = std::sin(th);
        const double cn = std::cos(n * th), sn = std::sin(n * th);
        const cplx A = re.d2u * cn;
        const cplx B = (re.du / r - n * n * re.u / (r * r)) * cn;
        const cplx C = -n * (re.du / r - re.u / (r * r)) * sn;
        Deriv3 d;
        d.f = re.u * cn;
        d.f1 = c * re.du * cn + (s * n / r) * re.u * sn;
        d.f2 = s * re.du * cn - (c * n / r) * re.u * sn;
        d.f11 = c * c * A - 2.0 * s * c * C + s * s * B;
        d.f22 = s * s * A + 2.0 * s * c * C + c * c * B;
        d.f12 = s * c * (A - B) + (c * c - s * s) * C;
        out.push_back(d);
    }
    return out;
}

Eigen::VectorXd interpolate_dofs(const ModeSpace& space, const std::function<double(double)>& u,
                                 const std::function<double(double)>& du) {
    Eigen::VectorXd dofs = Eigen::VectorXd::Zero(space.ndof);
    for (int k = 1; k <= space.elements; ++k) {
        dofs(2 * (k - 1)) = u(space.nodes[k]);
        dofs(2 * (k - 1) + 1) = du(space.nodes[k]);
    }
    return dofs;
}

}  // namespace platelab
