#pragma once
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfi/measure.hpp"
#include "wfi/rate.hpp"

namespace wfi {

/// Which quantity of the initial density multiplies a curve when it is compared
/// with an entropy trace.
enum class Prefactor { none, osc2_sqrt_h, entropy0 };

const char* to_string(Prefactor p);

/// A predicted decay profile t -> bound(t) on [t_min, t_max].
struct BoundCurve {
    std::string name;
    std::function<double(double)> eval;
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::infinity();
    std::map<std::string, double> params;
    Prefactor prefactor = Prefactor::none;
    /// Shape known only up to a multiplicative constant; overlays fit it.
    bool free_constant = false;

    double operator()(double t) const { return eval(t); }
    /// Sampled check on n points of the validity range (log spaced when it is unbounded).
    bool non_increasing(std::size_t n = 200, double rel_tol = 1e-12) const;
    std::vector<double> sample_times(std::size_t n) const;
};

/// r in (0, eps] solving -beta(r) log(r / eps) / 2 = t, returned as log r.
double xi_log_radius(const RateFunction& beta, double eps, double t);
double xi_radius(const RateFunction& beta, double eps, double t);

/// Entropy decay profile (1/e + eps) r(t) / eps, to be multiplied by Osc^2(sqrt h).
/// Throws NotInvertible when r -> -beta(r) log(r/eps)/2 is not increasing as r decreases.
BoundCurve xi_from_beta(const RateFunction& beta, double eps);

struct ConverseResult {
    RateFunction rate;
    bool poincare = false;
};

/// beta(s) = psi^{-1}(s) with psi(t) = 2 sqrt(2 xi(t)).
ConverseResult converse_beta_from_xi(const BoundCurve& xi);

/// (e c + 2) (H / log K) log(log K / H); requires K >= e^2 and H <= log K / (2e).
double entropy_split_bound(double H, double K, double c);

/// Integral of h 1{h > K} against the lumped node masses.
double excess_mass(const Measure1D& mu, const GridFunction& h, double K);

/// C / log^{k(1-eps)}(1/xi(t)) with C = 1 and `free_constant` set.
BoundCurve iterated_decay_curve(const BoundCurve& xi, int k, double eps);

/// exp(1 - (t - t_offset)^gamma), gamma = (1-eps) alpha / (2 - eps alpha).
BoundCurve lo_decay_curve(double alpha, double eps, double t_offset = 0.0);

/// Exponential e^{-t/A} on [0, inf); multiply by Ent(h).
BoundCurve exponential_curve(double A);

struct RoyerBounds {
    double log_moment_ub = 0.0;
    double l2_ub = 0.0;
    double c_min = 0.0;
};

/// C_min = max(0, -min (V'^2 - V'')) over a grid of the potential's domain.
double c_min(const Potential& V, double half_width = 50.0, std::size_t n = 20001);

/// Literal right-hand sides of the log-moment and L^2 bounds for P_t delta_x in
/// dimension one; t must lie in (0, 1/(2 pi)).
RoyerBounds royer_bounds(const Potential& V, double x, double t, double p);

/// max over a grid of [-R, R]^2 of |y|^a / (2^{a-1} (|x|^a + |y-x|^2 + 1)).
double growth_domination_ratio(double alpha, double R = 20.0, std::size_t n = 201);

struct L2Membership {
    bool finite = false;
    double tail_exponent = 0.0;
};

/// log of int_0^inf e^x e^{-(u-x)^2/2t} (lambda/2) e^{-lambda x} dx.
double nosg_log_inner(double lambda, double t, double u);

/// Fits the exponential rate of the squared inner convolution over u in [U/2, U];
/// finite iff the rate is below -0.05.
L2Membership l2_membership(double lambda, double t, double U = 40.0);

struct TvScheduleInputs {
    const Measure1D* mu = nullptr;
    GridFunction h;
    std::vector<double> K_grid;
    std::optional<double> poincare_constant;
    /// Multiplicative entropy decay profile, equal to 1 at t = 0.
    std::optional<BoundCurve> entropy_factor;
};

/// t -> min over K of the variance or entropy route plus the truncation tail 2 int (h-K)_+.
BoundCurve tv_bound_schedule(const TvScheduleInputs& in);

struct StretchedFit {
    double log_c = 0.0;
    double d = 0.0;
    double gamma = 0.0;
    double rms = 0.0;
};

/// Least squares log y = log c - d t^gamma, gamma scanned on (0, 2].
StretchedFit fit_stretched_exponential(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace wfi
