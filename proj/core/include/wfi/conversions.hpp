#pragma once
#include "wfi/rate.hpp"

namespace wfi {

/// Literal WLSI -> WPI transform 24 beta((s/2) L) / L with L = log(1 + 1/(2s)).
double wpi_formula(const RateFunction& wl, double s);

/// WPI rate from a WLSI rate: the smallest non-increasing majorant of
/// `wpi_formula` on (0, 1/2], frozen above 1/2.
RateFunction wlsi_to_wpi(const RateFunction& wl);

/// WLSI rate c' beta_WP(c s / log(1/s)) log(1/s) for s < s0, frozen above s0.
RateFunction wpi_to_wlsi(const RateFunction& wp, const ConstantsPolicy& policy = {});

struct PoincareVerdict {
    bool poincare = false;
    double c1 = 0.0;  ///< beta(s) <= c1 log(c2 / s) on the sampled range
    double c2 = 0.0;
    double slope = 0.0;  ///< d log beta / d log log(1/s) over the last decade
    double s_lo = 0.0, s_hi = 0.0;
};

/// Poincare holds iff beta grows at most like log(1/s); decided from the slope
/// of log beta against log log(1/s) over the smallest-s decade (threshold 1.1).
PoincareVerdict detect_poincare(const RateFunction& wl);

struct SpiResult {
    RateFunction rate;  ///< beta_SP(t), t >= 1
    bool premise_ok = true;
};

/// beta_SP(t) = 2 beta(log(t/2)/(2t)) / log(t/2) for t >= 2e, constant on [1, 2e).
SpiResult wlsi_to_spi(const RateFunction& wl);

struct GbiResult {
    RateFunction T;  ///< T(t) = t beta(1/(4 t e^{1/t})) on (0, 1]
    bool nondecreasing = true;
    double t_a = 1.0;
    /// The function of the certified inequality, 20 T.
    RateFunction certified() const { return T.scaled(20.0); }
};

GbiResult wlsi_to_gbi(const RateFunction& wl, double t_a = 1.0);

/// beta(s) = C T(C' / log(1/s)) log(1/s). Throws ShapeViolation unless T is
/// non-decreasing and T(x)/x non-increasing on (0, 1].
RateFunction gbi_to_wlsi(const RateFunction& T, const ConstantsPolicy& policy = {});

/// beta_SWL(u) = 16 beta(kappa u^3 / log^6(1/u)) for u <= s0, frozen above.
RateFunction wlsi_to_swlsi(const RateFunction& wl, const ConstantsPolicy& policy = {});

struct RestrictedLs {
    double A = 0.0;
    double u_star = 0.0;
};

/// A = inf_u { beta_SWL(u) + u sqrt(3 C_P) ||f||_inf^2 } over u in (1e-12, u_max].
RestrictedLs restricted_ls_constant(const RateFunction& swl, double C_P, double sup_norm);

RateFunction tensorize(const RateFunction& wl, int n);
/// Dimension-free tensorization through the Beckner-type route.
RateFunction tensorize_gbi(const RateFunction& wl, int n, const ConstantsPolicy& policy = {});

/// Holley-Stroock style bounded perturbation mu_V ~ e^{-V} mu with Osc(V) = osc_v.
Certificate perturb_bounded(const Certificate& cert, double osc_v);

/// Inverse of s log(1 + e^2 / s) on (0, e^2).
double phi_inverse(double s);

/// Applies the conversion to `target` (tensorization and perturbation excluded).
Certificate convert(const Certificate& cert, CertKind target, const ConstantsPolicy& policy = {});

}  // namespace wfi
