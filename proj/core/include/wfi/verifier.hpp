#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "wfi/measure.hpp"
#include "wfi/rate.hpp"

namespace wfi {

enum class FamilyKind { capacity_ramps, tilts, indicators_smoothed, random_piecewise, custom };

const char* to_string(FamilyKind k);

/// Bounded test functions on a measure's grid.
struct FunctionFamily {
    FamilyKind kind = FamilyKind::custom;
    std::vector<GridFunction> members;
    std::vector<std::string> ids;

    std::size_t size() const { return members.size(); }
    void add(GridFunction f, std::string id);

    /// Ramps min(1, ((x-a)/(b-a))_+) between the tail-mass levels 2^{-k} and 2^{-k-1}
    /// on both sides, k = 1..levels.
    static FunctionFamily capacity_ramps(const Measure1D& mu, int levels = 25);
    /// min(e^{theta Phi/4}, clip), i.e. e^{theta V/2} for mu = e^{-2V}.
    static FunctionFamily tilts(const Measure1D& mu, const std::vector<double>& thetas,
                                double clip = 1e6);
    /// Smoothstep of width `width` centred at the tail-mass levels 2^{-k}, both sides.
    static FunctionFamily indicators_smoothed(const Measure1D& mu, int levels = 20,
                                              double width = 0.5);
    /// Piecewise linear through `knots` random quantile knots with values in [0, 1].
    static FunctionFamily random_piecewise(const Measure1D& mu, std::size_t n, std::uint64_t seed,
                                           int knots = 8);
};

struct WlsiMargin {
    std::vector<double> s;
    std::vector<double> lhs;     ///< Ent(f^2)
    std::vector<double> rhs;     ///< beta(s) Dirichlet(f) + s Osc^2(f)
    std::vector<double> margin;  ///< rhs - lhs
    double min_margin = 0.0;
    bool holds = true;
};

WlsiMargin check_wlsi(const Measure1D& mu, const GridFunction& f, const RateFunction& beta,
                      const std::vector<double>& s_grid);

struct EmpiricalBeta {
    RateFunction rate;
    std::vector<double> s;
    std::vector<double> beta;
    std::vector<std::string> worst_id;  ///< empty when every member contributes 0
};

/// Pointwise sup_f (Ent(f^2) - s Osc^2(f))_+ / Dirichlet(f) over the family.
EmpiricalBeta empirical_beta(const Measure1D& mu, const FunctionFamily& family,
                             const std::vector<double>& s_grid);

/// (int f^2 - (int |f|^p)^{2/p}) / T(2 - p).
double gbi_quotient(const Measure1D& mu, const GridFunction& f, const RateFunction& T, double p);

struct GbiMargin {
    double sup = 0.0;
    double p_star = 0.0;
    double dirichlet = 0.0;
    double margin = 0.0;  ///< dirichlet - sup
    bool holds = true;
};

/// Sup over a 64-point grid of (1, 2), refined once around the maximizer.
GbiMargin check_gbi(const Measure1D& mu, const GridFunction& f, const RateFunction& T);

/// sup Ent(f^2) / Osc^2(f) over the non-constant members.
double probe_entropy_osc_ratio(const Measure1D& mu, const FunctionFamily& family);

}  // namespace wfi
