#pragma once
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "wfi/decay.hpp"
#include "wfi/measure.hpp"

namespace wfi {

/// mu = e^{-2V} dx / Z, the invariant law of dX = dB - V'(X) dt.
Measure1D stationary_measure(const Potential& V, const GridSpec& spec);

enum class Scheme { explicit_euler, implicit_euler };

const char* to_string(Scheme s);

struct SolverConfig {
    std::shared_ptr<const Measure1D> mu;
    GridFunction h0;
    double t_end = 1.0;
    Scheme scheme = Scheme::explicit_euler;
    /// Explicit: 0 picks min(0.4 dx_min^2, 0.95 dt_stable). Implicit: first step.
    double dt = 0.0;
    /// Implicit only: step k uses min(dt_cap, dt growth^k).
    double dt_growth = 1.0;
    double dt_cap = std::numeric_limits<double>::infinity();
    /// Empty: 0 plus `n_samples` log-spaced times in [t_first, t_end].
    std::vector<double> sample_times;
    std::size_t n_samples = 60;
    double t_first = 1e-3;
    bool keep_snapshots = false;
};

struct DecayTrace {
    std::vector<double> times;
    std::vector<double> entropy;
    std::vector<double> variance;
    std::vector<double> tv;
    std::vector<double> fisher;
    std::vector<double> dirichlet_sqrt;
    std::vector<double> mass;
    std::vector<double> law_mean;
    std::vector<double> law_variance;
    std::vector<std::vector<double>> snapshots;
    std::size_t steps = 0;
    double dt = 0.0;
    Scheme scheme = Scheme::explicit_euler;
};

/// Largest explicit step keeping the update a positive Markov kernel.
double explicit_stable_dt(const Measure1D& mu);

/// Finite-volume solution of d h/dt = h''/2 - V' h' in divergence form against mu,
/// with no-flux ends. Throws Instability on negative values or mass drift.
DecayTrace evolve(const SolverConfig& config);

/// Gaussian of standard deviation `width` around x0 (width 0 means 2 dx at x0),
/// divided by the density and normalized.
GridFunction dirac_initial(const Measure1D& mu, double x0, double width = 0.0);

/// lo on x < threshold, hi on x >= threshold, normalized.
GridFunction two_level_initial(const Measure1D& mu, double threshold, double lo, double hi);

/// Law of the Ornstein-Uhlenbeck process dX = dB - X dt at time t from N(x0, width^2), in dx.
double ou_transition_density(double x0, double t, double width, double u);

/// sum_i m_i |h_i - q(x_i)/rho_i|, the L1(dx) distance between h mu and q dx.
double l1_distance(const Measure1D& mu, const std::vector<double>& h,
                   const std::function<double(double)>& q);

struct ExplicitDensity {
    GridFunction term;
    double remainder_bound = 0.0;
};

/// Killed part of P_t delta_x for dX = dB - sign(X) dt, x > 0, as a density
/// against e^{-2|u|} du, and a bound on the first-passage remainder.
ExplicitDensity explicit_density_doubleexp(double x, double t,
                                           std::shared_ptr<const std::vector<double>> u_grid);
double explicit_term_doubleexp(double x, double t, double u);
double remainder_bound_doubleexp(double x, double t);

struct EmConfig {
    std::shared_ptr<const Measure1D> mu;
    double x0 = 0.0;
    double t_end = 1.0;
    double dt = 1e-3;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    std::vector<double> sample_times;
    std::size_t bins = 128;
};

struct EmTrace {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> tv;
    std::vector<double> bin_edges;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Euler-Maruyama paths of dX = dB - Phi'(X)/2 dt reflected at the grid ends;
/// TV is measured on equal-mass bins of mu.
EmTrace euler_maruyama(const EmConfig& config);

struct OverlayVerdict {
    std::string name;
    bool holds = true;
    double first_violation = std::numeric_limits<double>::quiet_NaN();
    std::size_t checked = 0;
    std::size_t violations = 0;
    double max_ratio = 0.0;  ///< max entropy / (prefactor curve)
    double fitted_constant = std::numeric_limits<double>::quiet_NaN();
    double prefactor = 1.0;
};

/// Compares the trace entropy with each curve at the sample times t >= t_from
/// inside the curve's range.
std::vector<OverlayVerdict> overlay_bounds(const DecayTrace& trace,
                                           const std::vector<BoundCurve>& curves,
                                           double osc_sqrt_h, double t_from = 0.0);

/// Slope of log entropy against t over the samples with t >= t_from and entropy > floor.
double measured_log_slope(const DecayTrace& trace, double t_from, double floor = 1e-12);

}  // namespace wfi
