#pragma once
#include <cstddef>
#include <vector>

#include "wfi/measure.hpp"
#include "wfi/rate.hpp"

namespace wfi {

/// Kernel of the necessary condition: log(1 + 1/(2 mu)) or log(1 + e^2/mu).
enum class NecessaryKernel { half_mass, e_squared };

/// Canonical s for a set of mass `mass`: (mass/2) times the kernel.
double s_star(double mass, NecessaryKernel kernel = NecessaryKernel::half_mass);

/// Integral of 1/rho over [a, b].
double resistance(const Measure1D& mu, double a, double b);

/// Capacity of the half-line beyond x, relative to the half-line from the median.
double cap_halfline(const Measure1D& mu, double x);

struct CapacityRow {
    double x = 0.0;
    double mass = 0.0;
    double cap = 0.0;
    double s_star = 0.0;
    double lhs = 0.0;    ///< s_star / beta(s_star)
    double ratio = 0.0;  ///< lhs / cap; > 1 is a violation
};

struct CapacityProfile {
    std::vector<CapacityRow> rows;
    std::size_t violations = 0;
    double max_ratio = 0.0;
};

/// Half-line sample points: `per_side` points per side, log-spaced in tail
/// mass from mass_hi down to mass_lo. Points within half a cell of the median are dropped.
std::vector<double> default_x_grid(const Measure1D& mu, std::size_t per_side = 400,
                                   double mass_hi = 0.49, double mass_lo = 1e-9);

CapacityProfile check_necessary(const Measure1D& mu, const RateFunction& beta,
                                const std::vector<double>& x_grid,
                                NecessaryKernel kernel = NecessaryKernel::half_mass);

/// The smallest non-increasing beta with s_A / beta(s_A) <= Cap(A) on the sampled half-lines.
RateFunction beta_from_capacity(const Measure1D& mu, const std::vector<double>& x_grid = {},
                                NecessaryKernel kernel = NecessaryKernel::half_mass);

}  // namespace wfi
