#include "platelab/plate_forms.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace platelab {

namespace {

// Polar 3-jet at a fixed point: d[i][j] = d^i/dr^i d^j/dtheta^j, i+j <= 3.
// Used to push modal fields uhat(r)cos(n theta) to Cartesian bundles without
// hand-expanding third-order chain rules.
struct Jet3 {
    double d[4][4] = {};
};

Jet3 jet_mul(const Jet3& a, const Jet3& b, int order) {
    Jet3 out;
    auto binom = [](int n, int k) {
        static const int c[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
        return c[n][k];
    };
    for (int i = 0; i + 0 <= order; ++i)
        for (int j = 0; i + j <= order; ++j) {
            double acc = 0.0;
            for (int p = 0; p <= i; ++p)
                for (int q = 0; q <= j; ++q)
                    acc += binom(i, p) * binom(j, q) * a.d[p][q] * b.d[i - p][j - q];
            out.d[i][j] = acc;
        }
    return out;
}

Jet3 jet_dr(const Jet3& a, int order) {
    Jet3 out;
    for (int i = 0; i + 0 <= order; ++i)
        for (int j = 0; i + j <= order; ++j) out.d[i][j] = a.d[i + 1][j];
    return out;
}

Jet3 jet_dth(const Jet3& a, int order) {
    Jet3 out;
    for (int i = 0; i + 0 <= order; ++i)
        for (int j = 0; i + j <= order; ++j) out.d[i][j] = a.d[i][j + 1];
    return out;
}

Jet3 jet_add(const Jet3& a, const Jet3& b) {
    Jet3 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.d[i][j] = a.d[i][j] + b.d[i][j];
    return out;
}

Jet3 jet_scale(const Jet3& a, double s) {
    Jet3 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.d[i][j] = s * a.d[i][j];
    return out;
}

Jet3 jet_cos(double th) {
    Jet3 out;
    for (int j = 0; j < 4; ++j) out.d[0][j] = std::cos(th + j * std::numbers::pi / 2);
    return out;
}

Jet3 jet_sin(double th) {
    Jet3 out;
    for (int j = 0; j < 4; ++j) out.d[0][j] = std::sin(th + j * std::numbers::pi / 2);
    return out;
}

Jet3 jet_inv_r(double r) {
    Jet3 out;
    double v = 1.0 / r;
    out.d[0][0] = v;
    out.d[1][0] = -v * v;
    out.d[2][0] = 2.0 * v * v * v;
    out.d[3][0] = -6.0 * v * v * v * v;
    return out;
}

// Cartesian derivative operators Dx = cos dr - sin/r dth, Dy = sin dr + cos/r dth,
// acting on polar jets; output jet valid to (order-1).
Jet3 jet_Dx(const Jet3& w, double r, double th, int order) {
    Jet3 t1 = jet_mul(jet_cos(th), jet_dr(w, order - 1), order - 1);
    Jet3 t2 = jet_mul(jet_mul(jet_sin(th), jet_inv_r(r), order - 1), jet_dth(w, order - 1), order - 1);
    return jet_add(t1, jet_scale(t2, -1.0));
}

Jet3 jet_Dy(const Jet3& w, double r, double th, int order) {
    Jet3 t1 = jet_mul(jet_sin(th), jet_dr(w, order - 1), order - 1);
    Jet3 t2 = jet_mul(jet_mul(jet_cos(th), jet_inv_r(r), order - 1), jet_dth(w, order - 1), order - 1);
    return jet_add(t1, t2);
}

}  // namespace

void gauss_legendre(int npts, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(npts, 0.0);
    weights.assign(npts, 0.0);
    for (int i = 0; i < npts; ++i) {
        // Chebyshev initial guess, Newton on P_n
        double x = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= npts; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = npts * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

cplx a_form_quadrature(const AnalyticField& f, const AnalyticField& g,
                       const PlateConfig& cfg, const Annulus& geom, int order,
                       int theta_points) {
    if (order < 4) throw std::invalid_argument("a_form_quadrature: order < 4");
    if (theta_points < 8) throw std::invalid_argument("a_form_quadrature: theta_points < 8");

    std::vector<double> xg, wg;
    gauss_legendre(order, xg, wg);
    const double mid = 0.5 * (geom.r0 + geom.r1);
    const double half = 0.5 * (geom.r1 - geom.r0);
    const double wth = 2.0 * std::numbers::pi / theta_points;
    const double mu = cfg.mu;

    cplx total = 0.0;
    for (int i = 0; i < order; ++i) {
        const double r = mid + half * xg[i];
        const double wr = half * wg[i];
        for (int j = 0; j < theta_points; ++j) {
            const double th = wth * j;
            const double x = r * std::cos(th), y = r * std::sin(th);
            const Deriv3 df = f(x, y);
            const Deriv3 dg = g(x, y);
            const cplx g11 = std::conj(dg.f11), g12 = std::conj(dg.f12), g22 = std::conj(dg.f22);
            cplx dens = df.f11 * g11 + df.f22 * g22 + mu * (df.f11 * g22 + df.f22 * g11) +
                        2.0 * (1.0 - mu) * df.f12 * g12;
            total += wr * wth * dens * r;
        }
    }
    return total;
}

cplx c1_cartesian(const Deriv3& d, std::array<double, 2> point) {
    const double r = std::hypot(point[0], point[1]);
    const double n1 = point[0] / r, n2 = point[1] / r;
    return 2.0 * n1 * n2 * d.f12 - n1 * n1 * d.f22 - n2 * n2 * d.f11;
}

cplx c1_tangential(const Deriv3& d, std::array<double, 2> point) {
    const double r = std::hypot(point[0], point[1]);
    const double n1 = point[0] / r, n2 = point[1] / r;
    const double t1 = -n2, t2 = n1;
    // second tangential derivative along the circle: tau^T H tau + (dtau/ds).grad
    const cplx ttHt = t1 * t1 * d.f11 + 2.0 * t1 * t2 * d.f12 + t2 * t2 * d.f22;
    const cplx dtt = ttHt + (-n1 / r) * d.f1 + (-n2 / r) * d.f2;
    const double dtau_n1 = t1 / r, dtau_n2 = t2 / r;
    return -dtt - dtau_n2 * d.f1 + dtau_n1 * d.f2;
}

BoundaryOps boundary_operator_oracle(const AnalyticField& f, std::array<double, 2> point,
                                     const PlateConfig& cfg, const Annulus& geom) {
    const double r = std::hypot(point[0], point[1]);
    if (std::abs(r - geom.r1) > 1e-12 * geom.r1)
        throw std::invalid_argument("boundary_operator_oracle: point not on Gamma1");

    const Deriv3 d = f(point[0], point[1]);
    const double n1 = point[0] / r, n2 = point[1] / r;
    const double t1 = -n2, t2 = n1;
    const double mu = cfg.mu;

    BoundaryOps out;
    out.b1 = d.lap() + (1.0 - mu) * c1_cartesian(d, point);

    const cplx dnu_lap = n1 * (d.f111 + d.f122) + n2 * (d.f112 + d.f222);
    // dtau of C2 f along the circle; nu varies with arclength: dtau nu = tau / r
    const double dn1 = t1 / r, dn2 = t2 / r;
    const cplx dt_f12 = t1 * d.f112 + t2 * d.f122;
    const cplx dt_f11 = t1 * d.f111 + t2 * d.f112;
    const cplx dt_f22 = t1 * d.f122 + t2 * d.f222;
    const cplx dtau_c2 = (2.0 * n1 * dn1 - 2.0 * n2 * dn2) * d.f12 +
                         (n1 * n1 - n2 * n2) * dt_f12 -
                         (dn1 * n2 + n1 * dn2) * (d.f11 - d.f22) -
                         n1 * n2 * (dt_f11 - dt_f22);
    out.b2 = dnu_lap + (1.0 - mu) * dtau_c2;
    return out;
}

EnergyDensities energy_densities(const std::array<std::array<cplx, 2>, 2>& h,
                                 const PlateConfig& cfg) {
    const double a11 = std::norm(h[0][0]);
    const double a22 = std::norm(h[1][1]);
    const double a12 = std::norm(h[0][1]);
    const double cross = std::real(h[0][0] * std::conj(h[1][1]));
    EnergyDensities out;
    out.c = a11 + a22 + 2.0 * cfg.mu * cross + 2.0 * (1.0 - cfg.mu) * a12;
    out.d = a11 + a22 + 2.0 * a12;
    return out;
}

AnalyticField modal_field(std::function<double(double)> uhat,
                          std::function<double(double)> duhat,
                          std::function<double(double)> d2uhat,
                          std::function<double(double)> d3uhat, int n) {
    return [=](double x, double y) -> Deriv3 {
        const double r = std::hypot(x, y);
        const double th = std::atan2(y, x);
        Jet3 u;
        const double ur[4] = {uhat(r), duhat(r), d2uhat(r), d3uhat(r)};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; i + j < 4; ++j)
                u.d[i][j] = ur[i] * std::pow(double(n), j) * std::cos(n * th + j * std::numbers::pi / 2);

        const Jet3 ux = jet_Dx(u, r, th, 3);
        const Jet3 uy = jet_Dy(u, r, th, 3);
        const Jet3 uxx = jet_Dx(ux, r, th, 2);
        const Jet3 uxy = jet_Dy(ux, r, th, 2);
        const Jet3 uyy = jet_Dy(uy, r, th, 2);

        Deriv3 out;
        out.f = u.d[0][0];
        out.f1 = ux.d[0][0];
        out.f2 = uy.d[0][0];
        out.f11 = uxx.d[0][0];
        out.f12 = uxy.d[0][0];
        out.f22 = uyy.d[0][0];
        out.f111 = jet_Dx(uxx, r, th, 1).d[0][0];
        out.f112 = jet_Dy(uxx, r, th, 1).d[0][0];
        out.f122 = jet_Dy(uxy, r, th, 1).d[0][0];
        out.f222 = jet_Dy(uyy, r, th, 1).d[0][0];
        return out;
    };
}

}  // namespace platelab
