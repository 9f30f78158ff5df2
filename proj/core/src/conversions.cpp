#include "wfi/conversions.hpp"

#include <algorithm>
#include <cmath>

#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

namespace {
constexpr double kTiny = 1e-300;

void require_positive_rate(const RateFunction& r, const char* what) {
    for (double s : {1e-12, 1e-6, 1e-2, 0.1})
        if (!(r(s) >= 0.0)) throw Error(ErrorCode::NonMonotoneBeta, std::string(what) + " is negative or NaN");
}
}  // namespace

double wpi_formula(const RateFunction& wl, double s) {
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "s must be positive");
    const double L = std::log1p(1.0 / (2.0 * s));
    return 24.0 * wl(0.5 * s * L) / L;
}

RateFunction wlsi_to_wpi(const RateFunction& wl) {
    require_positive_rate(wl, "beta_WL");
    return monotone_majorant("wlsi_to_wpi", [wl](double s) { return wpi_formula(wl, s); }, 1e-200, 0.5);
}

RateFunction wpi_to_wlsi(const RateFunction& wp, const ConstantsPolicy& pol) {
    require_positive_rate(wp, "beta_WP");
    const double s0 = std::min(pol.s0, 0.5);
    auto f = [wp, pol](double s) {
        const double l = std::log(1.0 / s);
        return pol.c_prime * wp(pol.c * s / l) * l;
    };
    return RateFunction::derived("wpi_to_wlsi", f, 0.0, s0);
}

PoincareVerdict detect_poincare(const RateFunction& wl) {
    PoincareVerdict v;
    if (wl.kind() == RateKind::table) {
        v.s_lo = wl.table_s().front();
        v.s_hi = std::min(wl.table_s().back(), 1e-2);
    } else {
        v.s_lo = 1e-12;
        v.s_hi = std::min(1e-2, wl.s_max());
    }
    if (!(v.s_hi / v.s_lo >= 999.0))
        throw Error(ErrorCode::InsufficientRange, "detect_poincare needs samples over >= 3 decades");
    std::vector<double> x, y;
    for (double s : logspace(v.s_lo, 10.0 * v.s_lo, 25)) {
        double b = wl(s);
        if (!(b > 0.0)) throw Error(ErrorCode::NonMonotoneBeta, "beta must be positive");
        x.push_back(std::log(std::log(1.0 / s)));
        y.push_back(std::log(b));
    }
    v.slope = fit_line(x, y).slope;
    v.poincare = v.slope <= 1.1;
    v.c2 = std::exp(1.0);
    for (double s : logspace(v.s_lo, v.s_hi, 200)) v.c1 = std::max(v.c1, wl(s) / std::log(v.c2 / s));
    return v;
}

SpiResult wlsi_to_spi(const RateFunction& wl) {
    require_positive_rate(wl, "beta_WL");
    SpiResult r;
    auto psi = [wl](double t) {
        const double l = std::log(t / 2.0);
        return wl(l / (2.0 * t)) / l;
    };
    double prev = std::numeric_limits<double>::infinity();
    for (double t : logspace(2.0 * (1.0 + 1e-6), 1e6, 400)) {
        double v = psi(t);
        if (v > prev * (1.0 + 1e-12)) {
            r.premise_ok = false;
            break;
        }
        prev = v;
    }
    const double t0 = 2.0 * std::exp(1.0);
    auto maj = monotone_majorant("wlsi_to_spi", [psi](double t) { return 2.0 * psi(t); }, t0, 1e12);
    r.rate = maj.clamped(t0, maj.s_max());
    return r;
}

GbiResult wlsi_to_gbi(const RateFunction& wl, double t_a) {
    require_positive_rate(wl, "beta_WL");
    GbiResult r;
    r.t_a = t_a;
    auto T = [wl](double t) {
        return t * wl.at_log_inverse(1.0 / t + std::log(4.0 * t));
    };
    r.T = RateFunction::derived("wlsi_to_gbi", T, 0.0, 1.0);
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : logspace(1e-4, t_a, 400)) {
        double v = T(t);
        if (v < prev * (1.0 - 1e-12)) {
            r.nondecreasing = false;
            break;
        }
        prev = v;
    }
    return r;
}

RateFunction gbi_to_wlsi(const RateFunction& T, const ConstantsPolicy& pol) {
    double prevT = -std::numeric_limits<double>::infinity();
    double prevRatio = std::numeric_limits<double>::infinity();
    for (double x : logspace(1e-6, 1.0, 400)) {
        double t = T(x);
        if (!(t > 0.0)) throw Error(ErrorCode::ShapeViolation, "T must be positive");
        if (t < prevT * (1.0 - 1e-10)) throw Error(ErrorCode::ShapeViolation, "T is not non-decreasing");
        if (t / x > prevRatio * (1.0 + 1e-10))
            throw Error(ErrorCode::ShapeViolation, "T(x)/x is not non-increasing");
        prevT = t;
        prevRatio = t / x;
    }
    const double s_top = std::min(pol.s0, std::exp(-pol.C_prime));
    auto f = [T, pol](double s) {
        const double l = std::log(1.0 / s);
        return pol.C * T(pol.C_prime / l) * l;
    };
    return RateFunction::derived("gbi_to_wlsi", f, 0.0, s_top);
}

RateFunction wlsi_to_swlsi(const RateFunction& wl, const ConstantsPolicy& pol) {
    require_positive_rate(wl, "beta_WL");
    const double u0 = std::min(pol.s0, 0.5);
    auto f = [wl, pol](double u) {
        const double l = std::log(1.0 / u);
        const double l6 = std::pow(l, 6.0);
        return 16.0 * wl(std::max(pol.kappa * u * u * u / l6, kTiny));
    };
    return RateFunction::derived("wlsi_to_swlsi", f, 0.0, u0);
}

RestrictedLs restricted_ls_constant(const RateFunction& swl, double C_P, double sup_norm) {
    if (!(C_P > 0.0) || !(sup_norm > 0.0))
        throw Error(ErrorCode::InvalidArgument, "restricted_ls_constant needs C_P > 0 and ||f|| > 0");
    const double k = std::sqrt(3.0 * C_P) * sup_norm * sup_norm;
    const double lo = 1e-12;
    const double hi = std::isfinite(swl.s_max()) ? swl.s_max() : 1e3;
    auto g = [&](double lu) {
        double u = std::exp(lu);
        return swl(u) + u * k;
    };
    std::vector<double> grid = linspace(std::log(lo), std::log(hi), 600);
    std::size_t best = 0;
    double bv = g(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double v = g(grid[i]);
        if (v < bv) {
            bv = v;
            best = i;
        }
    }
    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    double lu = golden_section_min(g, a, b, 1e-12);
    RestrictedLs r;
    r.A = g(lu);
    r.u_star = std::exp(lu);
    if (bv < r.A) {
        r.A = bv;
        r.u_star = std::exp(grid[best]);
    }
    return r;
}

RateFunction tensorize(const RateFunction& wl, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "tensorize needs n >= 1");
    if (n == 1) return wl;
    const double dn = n;
    return RateFunction::derived("tensorize", [wl, dn](double s) { return wl(s / dn); }, 0.0,
                                 wl.s_max() * dn);
}

RateFunction tensorize_gbi(const RateFunction& wl, int n, const ConstantsPolicy& pol) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "tensorize_gbi needs n >= 1");
    return gbi_to_wlsi(wlsi_to_gbi(wl).certified(), pol);
}

Certificate perturb_bounded(const Certificate& cert, double osc_v) {
    if (!(osc_v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Osc(V) must be >= 0");
    Certificate out = cert;
    const RateFunction b = cert.rate;
    const double e2 = std::exp(2.0 * osc_v);
    switch (cert.kind) {
        case CertKind::WLSI:
        case CertKind::WPI: {
            const double e1 = std::exp(-osc_v);
            out.rate = RateFunction::derived(
                "perturb_bounded", [b, e2, e1](double u) { return e2 * b(u * e1); }, 0.0,
                b.s_max() / e1);
            break;
        }
        case CertKind::SPI: {
            const double em = std::exp(-2.0 * osc_v);
            out.rate = RateFunction::derived(
                "perturb_bounded", [b, e2, em](double u) { return e2 * b(u * em); }, 0.0,
                b.s_max() / em);
            break;
        }
        default:
            throw Error(ErrorCode::UnsupportedKind,
                        std::string("bounded perturbation is not defined for ") + to_string(cert.kind));
    }
    out.provenance.push_back({"perturb_bounded", {{"osc_v", osc_v}}, ""});
    return out;
}

double phi_inverse(double s) {
    const double e2 = std::exp(2.0);
    if (!(s > 0.0) || !(s < e2)) throw Error(ErrorCode::InvalidArgument, "phi_inverse needs s in (0, e^2)");
    auto phi = [e2](double lx) {
        double x = std::exp(lx);
        return x * std::log1p(e2 / x);
    };
    double hi = 1.0;
    while (phi(std::log(hi)) < s) hi *= 2.0;
    return std::exp(bisect([&](double lx) { return phi(lx) - s; }, std::log(1e-300), std::log(hi)));
}

Certificate convert(const Certificate& cert, CertKind target, const ConstantsPolicy& pol) {
    Certificate out;
    out.kind = target;
    out.provenance = cert.provenance;
    out.warnings = cert.warnings;
    out.premise_ok = cert.premise_ok;
    std::map<std::string, double> params;
    std::string op;
    auto bad = [&]() {
        throw Error(ErrorCode::UnsupportedKind, std::string("no conversion ") + to_string(cert.kind) +
                                                    " -> " + to_string(target));
    };
    if (cert.kind == CertKind::WLSI && target == CertKind::WPI) {
        op = "wlsi_to_wpi";
        out.rate = wlsi_to_wpi(cert.rate);
        if (out.rate.isotonized()) out.warnings.push_back("wlsi_to_wpi: literal rate not monotone; majorant used");
    } else if (cert.kind == CertKind::WPI && target == CertKind::WLSI) {
        op = "wpi_to_wlsi";
        params = {{"c", pol.c}, {"c_prime", pol.c_prime}, {"s0", pol.s0}};
        out.rate = wpi_to_wlsi(cert.rate, pol);
    } else if (cert.kind == CertKind::WLSI && target == CertKind::SPI) {
        op = "wlsi_to_spi";
        auto r = wlsi_to_spi(cert.rate);
        out.rate = r.rate;
        if (!r.premise_ok) {
            out.premise_ok = false;
            out.warnings.push_back("wlsi_to_spi: premise violated (psi not non-increasing)");
        }
    } else if (cert.kind == CertKind::WLSI && target == CertKind::GBI) {
        op = "wlsi_to_gbi";
        auto r = wlsi_to_gbi(cert.rate);
        out.rate = r.certified();
        params = {{"t_a", r.t_a}};
        if (!r.nondecreasing) {
            out.premise_ok = false;
            out.warnings.push_back("wlsi_to_gbi: premise violated (T not non-decreasing)");
        }
    } else if (cert.kind == CertKind::GBI && target == CertKind::WLSI) {
        op = "gbi_to_wlsi";
        params = {{"C", pol.C}, {"C_prime", pol.C_prime}, {"s0", pol.s0}};
        out.rate = gbi_to_wlsi(cert.rate, pol);
    } else if (cert.kind == CertKind::WLSI && target == CertKind::RLSI) {
        op = "wlsi_to_swlsi";
        params = {{"kappa", pol.kappa}, {"s0", pol.s0}};
        out.rate = wlsi_to_swlsi(cert.rate, pol);
    } else {
        bad();
    }
    out.provenance.push_back({op, params, ""});
    return out;
}

}  // namespace wfi
