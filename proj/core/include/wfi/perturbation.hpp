#pragma once
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wfi/measure.hpp"
#include "wfi/rate.hpp"

namespace wfi {

/// Lower growth profile G of |V'|^2 - 2 LV in terms of V.
struct Growth {
    std::string name;
    std::function<double(double)> G;

    /// c z^e for z > 0.
    static Growth power(double c, double e);
    static Growth zero();
};

/// Evidence that V is (G, mu)-good, with L = V''/2 - W' V' for the base
/// mu = e^{-2W} dx.
struct GoodPotentialReport {
    double A = 0.0;
    Growth growth;
    bool pass = false;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();  ///< min of lhs - G(V) on {V >= A}
    double worst_x = 0.0;
    double M_V = 0.0;     ///< sup over {V <= A} of 2 LV - |V'|^2
    double inf_V = 0.0;
    std::vector<double> b_grid;
    std::vector<double> h_of_b;  ///< sup_{A <= z <= b} 2 z / G(z)
    std::vector<double> s_b;     ///< inf{s : beta(s) <= h(b)}; filled when a base rate is given
    std::vector<double> moment_p;
    std::vector<double> moment;  ///< int e^{-p V} d(base); +inf when the tails do not decay
    bool moment_ok = false;

    Potential V;
    Potential base;  ///< Phi of the base measure, Phi = 2W
    double xmin = 0.0, xmax = 0.0;
};

/// Scans the base grid. `b_max` bounds the tabulated h(b).
GoodPotentialReport check_good(const Measure1D& base_mu, const Potential& V, const Growth& growth,
                               double A, const RateFunction* beta_wl_base = nullptr,
                               double b_max = 1e8);

/// sup_{A <= z <= b} 2 z / G(z) on a dense log grid.
double h_of(const GoodPotentialReport& r, double b);

/// inf{s : beta(s) <= h}; 0 if every s qualifies, +inf if none does.
double s_threshold(const RateFunction& beta, double h);

struct WitConstants {
    double C = 0.0;
    double D = 0.0;
    double h = 0.0;
    double s_b = 0.0;
    double tail = 0.0;  ///< int_{V >= b} 2V d nu_V
};

/// C(u,b) and D(u,b) for the perturbed law nu_V = e^{-2V} base / Z.
WitConstants wit_constants(const GoodPotentialReport& r, const RateFunction& beta_wl_base,
                           const RateFunction& beta_wp_nu, double u, double b);

struct CorollaryResult {
    bool h_premise = false;     ///< h(b)/b -> 0
    bool beta_premise = false;  ///< beta(s)/log(1/s) -> 0
    bool poincare = false;
    double h_ratio = 0.0;
    double beta_ratio = 0.0;
    std::optional<RateFunction> beta_v;
    double a = 1.0, a_prime = 1.0;
};

/// Tests both premises over their last decade; emits beta_v(s) = a h(a' log(1/s)).
CorollaryResult corollary_ts_check(const GoodPotentialReport& r, const RateFunction& beta_wl_base,
                                   const ConstantsPolicy& policy = {});

}  // namespace wfi
