#pragma once

#include <vector>

namespace platelab {

enum class DecayKind { Exponential, Power };

struct DecayFit {
    DecayKind kind = DecayKind::Exponential;
    double rate_or_exponent = 0.0;  // decay rate (exp) or log-log slope (power)
    double r_squared = 0.0;
    double t_start = 0.0, t_end = 0.0;
};

struct FitWindow {
    double t_start;
    double t_end;
};

/// Least-squares slope of log E vs t in the window; rate = -slope.
DecayFit fit_exponential(const std::vector<double>& times, const std::vector<double>& energies,
                         FitWindow window);

/// Least-squares slope of log E vs log t in the window; exponent = slope.
DecayFit fit_power(const std::vector<double>& times, const std::vector<double>& energies,
                   FitWindow window);

/// Default window: skips the first 10% of the horizon and stops where the
/// energy falls below 1e-13 E(0).
FitWindow default_window(const std::vector<double>& times, const std::vector<double>& energies);

}  // namespace platelab
