#pragma once
#include <string>
#include <utility>
#include <vector>

#include "wfi/measure.hpp"
#include "wfi/rate.hpp"

namespace wfi {

/// Two-sided bounds lower <= C <= upper on the optimal WLSI constant for a given rate shape.
struct HardyBounds {
    double b_plus = 0.0, b_minus = 0.0, B_plus = 0.0, B_minus = 0.0;
    double x_b_plus = 0.0, x_b_minus = 0.0, x_B_plus = 0.0, x_B_minus = 0.0;
    double lower = 0.0, upper = 0.0;
    std::vector<std::string> divergent;
};

/// Evaluates the four suprema over the points of `x_grid` (default: 400 per side
/// log-spaced in tail mass from 0.49 to 1e-9). A supremum whose integrand is
/// still growing like a power of log(1/mass) over the last decile is reported
/// as +inf and listed in `divergent`.
HardyBounds hardy_bounds(const Measure1D& mu, const RateFunction& beta,
                         const std::vector<double>& x_grid = {});

/// Muckenhoupt-type upper bound 4 max_side sup_x mu(tail) R(m, x) on the Poincare constant.
double poincare_upper_bound(const Measure1D& mu, const std::vector<double>& x_grid = {});

struct SufficientCheck {
    bool pass = false;
    double max_curvature_ratio = 0.0;  ///< sup |Phi''| / Phi'^2 outside the interval
    double A = 0.0, A_prime = 0.0;
    double c = 0.0;
    std::string failed;
};

/// Checks the derivative conditions on Phi + log Z outside `interval`.
SufficientCheck sufficient_condition_check(const Potential& pot, const RateFunction& beta,
                                           double eps, std::pair<double, double> interval,
                                           std::size_t points_per_side = 400);

struct RateFit {
    double p = 0.0;
    double q = 0.0;
    double log_c = 0.0;
    double rms = 0.0;
    std::size_t samples = 0;
};

/// Least squares log beta = log C + p log(1/s) + q log log(1/s).
RateFit fit_rate_exponents(const std::vector<std::pair<double, double>>& samples);
/// Fits the table nodes (or a 60-point log grid over [1e-9, 1e-2] for other kinds).
RateFit fit_rate_exponents(const RateFunction& beta, double s_hi = 1e-2);

}  // namespace wfi
