#include "platelab/ratefit.hpp"

#include <cmath>
#include <stdexcept>

namespace platelab {

namespace {

struct LsqResult {
    double slope;
    double r2;
};

LsqResult lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LsqResult out;
    out.slope = (sxx > 0.0) ? sxy / sxx : 0.0;
    out.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return out;
}

void collect_window(const std::vector<double>& times, const std::vector<double>& energies,
                    FitWindow w, bool log_time, std::vector<double>& x, std::vector<double>& y) {
    if (times.size() != energies.size())
        throw std::invalid_argument("ratefit: times/energies size mismatch");
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t < w.t_start || t > w.t_end) continue;
        const double e = energies[i];
        if (!(e > 0.0)) throw std::invalid_argument("ratefit: nonpositive energy in window");
        if (log_time && !(t > 0.0))
            throw std::invalid_argument("ratefit: power fit needs t_start > 0");
        x.push_back(log_time ? std::log(t) : t);
        y.push_back(std::log(e));
    }
    if (x.size() < 10) throw std::invalid_argument("ratefit: fewer than 10 samples in window");
}

}  // namespace

DecayFit fit_exponential(const std::vector<double>& times, const std::vector<double>& energies,
                         FitWindow window) {
    std::vector<double> x, y;
    collect_window(times, energies, window, false, x, y);
    const LsqResult r = lsq_slope(x, y);
    DecayFit fit;
    fit.kind = DecayKind::Exponential;
    fit.rate_or_exponent = -r.slope;
    fit.r_squared = r.r2;
    fit.t_start = window.t_start;
    fit.t_end = window.t_end;
    return fit;
}

DecayFit fit_power(const std::vector<double>& times, const std::vector<double>& energies,
                   FitWindow window) {
    std::vector<double> x, y;
    collect_window(times, energies, window, true, x, y);
    const LsqResult r = lsq_slope(x, y);
    DecayFit fit;
    fit.kind = DecayKind::Power;
    fit.rate_or_exponent = r.slope;
    fit.r_squared = r.r2;
    fit.t_start = window.t_start;
    fit.t_end = window.t_end;
    return fit;
}

FitWindow default_window(const std::vector<double>& times, const std::vector<double>& energies) {
    if (times.empty()) throw std::invalid_argument("default_window: empty series");
    const double t0 = times.front(), t1 = times.back();
    FitWindow w{t0 + 0.1 * (t1 - t0), t1};
    const double floor_e = 1e-13 * energies.front();
    for (size_t i = 0; i < times.size(); ++i) {
        if (energies[i] < floor_e) {
            w.t_end = times[i > 0 ? i - 1 : 0];
            break;
        }
    }
    return w;
}

}  // namespace platelab
