#include "wfi/decay.hpp"

#include <algorithm>
#include <cmath>

#include "wfi/conversions.hpp"
#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

namespace {

constexpr double kLogFloor = -700.0;
const double kInvE = std::exp(-1.0);

double xi_map(const RateFunction& beta, double y, double y0) {
    return -0.5 * beta(std::exp(y)) * (y - y0);
}

double log_norm_cdf(double z) {
    if (z > -30.0) return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
    // Mills ratio asymptotics
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * M_PI) +
           std::log1p(-1.0 / (z * z));
}

}  // namespace

const char* to_string(Prefactor p) {
    switch (p) {
        case Prefactor::none: return "none";
        case Prefactor::osc2_sqrt_h: return "osc2_sqrt_h";
        case Prefactor::entropy0: return "entropy0";
    }
    return "none";
}

std::vector<double> BoundCurve::sample_times(std::size_t n) const {
    if (n < 2) return {t_min};
    if (std::isfinite(t_max)) return linspace(t_min, t_max, n);
    std::vector<double> t{t_min};
    for (double d : logspace(1e-3, 1e3, n - 1)) t.push_back(t_min + d);
    return t;
}

bool BoundCurve::non_increasing(std::size_t n, double rel_tol) const {
    auto ts = sample_times(n);
    double prev = eval(ts.front());
    for (std::size_t i = 1; i < ts.size(); ++i) {
        double v = eval(ts[i]);
        if (std::isnan(v)) return false;
        if (v > prev * (1.0 + rel_tol) + 1e-300) return false;
        prev = v;
    }
    return true;
}

double xi_log_radius(const RateFunction& beta, double eps, double t) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (t < 0.0) throw Error(ErrorCode::TimeOutOfRange, "t must be non-negative");
    const double y0 = std::log(eps);
    if (t == 0.0) return y0;
    double step = 1.0;
    double y_lo = y0 - step;
    while (xi_map(beta, y_lo, y0) < t) {
        if (y_lo <= kLogFloor) {
            double b = beta(std::exp(kLogFloor));
            return y0 - 2.0 * t / b;
        }
        step *= 2.0;
        y_lo = std::max(y0 - step, kLogFloor);
    }
    double y_hi = y0;
    for (int i = 0; i < 200 && y_hi - y_lo > 1e-14 * (1.0 + std::fabs(y_lo)); ++i) {
        double mid = 0.5 * (y_lo + y_hi);
        if (xi_map(beta, mid, y0) < t)
            y_hi = mid;
        else
            y_lo = mid;
    }
    return 0.5 * (y_lo + y_hi);
}

double xi_radius(const RateFunction& beta, double eps, double t) {
    return std::exp(xi_log_radius(beta, eps, t));
}

BoundCurve xi_from_beta(const RateFunction& beta, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    const double y0 = std::log(eps);
    auto ys = linspace(y0 - 1e-6, kLogFloor, 200);
    double prev = xi_map(beta, ys.front(), y0);
    for (std::size_t i = 1; i < ys.size(); ++i) {
        double g = xi_map(beta, ys[i], y0);
        if (!(g > prev))
            throw Error(ErrorCode::NotInvertible,
                        "-beta(r) log(r/eps)/2 is not increasing at r = " +
                            std::to_string(std::exp(ys[i])));
        prev = g;
    }
    const double pre = (kInvE + eps) / eps;
    BoundCurve c;
    c.name = "xi";
    c.eval = [beta, eps, pre](double t) { return pre * xi_radius(beta, eps, std::max(t, 0.0)); };
    c.params = {{"eps", eps}, {"prefactor", pre}};
    c.prefactor = Prefactor::osc2_sqrt_h;
    return c;
}

ConverseResult converse_beta_from_xi(const BoundCurve& xi) {
    const double t0 = xi.t_min;
    auto ts = xi.sample_times(200);
    double prev = xi(ts.front());
    for (std::size_t i = 1; i < ts.size(); ++i) {
        double v = xi(ts[i]);
        if (v <= 0.0) break;
        if (!(v < prev))
            throw Error(ErrorCode::NotInvertible, "xi is not strictly decreasing at t = " +
                                                      std::to_string(ts[i]));
        prev = v;
    }
    const double xi0 = xi(t0);
    if (!(xi0 > 0.0) || !std::isfinite(xi0))
        throw Error(ErrorCode::NotInvertible, "xi(t_min) must be positive and finite");
    const double psi0 = 2.0 * std::sqrt(2.0 * xi0);
    auto inv = [xi, t0, xi0](double s) {
        const double target = s * s / 8.0;
        if (target >= xi0) return t0;
        double hi = std::max(1.0, 2.0 * t0);
        while (xi(hi) >= target) {
            hi *= 2.0;
            if (hi > 1e300 || hi > xi.t_max)
                throw Error(ErrorCode::NotInvertible, "xi does not reach s^2/8");
        }
        double lo = t0;
        for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
            double mid = 0.5 * (lo + hi);
            if (xi(mid) >= target)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    ConverseResult out;
    out.rate = RateFunction::derived("psi^{-1}(s) from " + xi.name, inv, 0.0, psi0 / std::exp(1.0));
    try {
        out.poincare = detect_poincare(out.rate).poincare;
    } catch (const Error&) {
        out.poincare = false;
    }
    return out;
}

double entropy_split_bound(double H, double K, double c) {
    if (H < 0.0) throw Error(ErrorCode::NegativeInput, "H must be non-negative");
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "c must be positive");
    if (!(K >= std::exp(2.0) * (1.0 - 1e-15)))
        throw Error(ErrorCode::PremiseViolated, "K must be at least e^2");
    const double L = std::log(K);
    if (H > L / (2.0 * M_E) * (1.0 + 1e-12))
        throw Error(ErrorCode::PremiseViolated, "H exceeds log(K)/(2e)");
    if (H == 0.0) return 0.0;
    return (M_E * c + 2.0) * (H / L) * std::log(L / H);
}

double excess_mass(const Measure1D& mu, const GridFunction& h, double K) {
    const auto& m = mu.node_mass();
    NeumaierSum s;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (h[i] > K) s.add(m[i] * h[i]);
    return s.value();
}

BoundCurve iterated_decay_curve(const BoundCurve& xi, int k, double eps) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    if (eps < 0.0 || eps > 1.0) throw Error(ErrorCode::InvalidArgument, "eps must lie in [0, 1]");
    double t_valid = xi.t_min;
    if (!(xi(t_valid) <= kInvE)) {
        double hi = std::max(1.0, 2.0 * t_valid);
        while (!(xi(hi) <= kInvE)) {
            hi *= 2.0;
            if (hi > 1e300) throw Error(ErrorCode::NotInvertible, "xi stays above 1/e");
        }
        double lo = t_valid;
        for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
            double mid = 0.5 * (lo + hi);
            if (xi(mid) <= kInvE)
                hi = mid;
            else
                lo = mid;
        }
        t_valid = hi;
    }
    const double e = k * (1.0 - eps);
    BoundCurve c;
    c.name = "iterated_k" + std::to_string(k);
    c.eval = [xi, e](double t) { return std::pow(std::log(1.0 / xi(t)), -e); };
    c.t_min = t_valid;
    c.t_max = xi.t_max;
    c.params = {{"k", double(k)}, {"eps", eps}, {"C", 1.0}};
    c.prefactor = Prefactor::none;
    c.free_constant = true;
    return c;
}

BoundCurve lo_decay_curve(double alpha, double eps, double t_offset) {
    if (alpha < 1.0 || alpha > 2.0) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [1, 2]");
    if (eps < 0.0 || eps > 1.0) throw Error(ErrorCode::InvalidArgument, "eps must lie in [0, 1]");
    const double gamma = (1.0 - eps) * alpha / (2.0 - eps * alpha);
    BoundCurve c;
    c.name = "latala_oleszkiewicz";
    c.eval = [gamma, t_offset](double t) {
        double tau = std::max(0.0, t - t_offset);
        return std::exp(1.0 - std::pow(tau, gamma));
    };
    c.params = {{"alpha", alpha}, {"eps", eps}, {"gamma", gamma}, {"t_offset", t_offset}};
    c.free_constant = true;
    return c;
}

BoundCurve exponential_curve(double A) {
    if (!(A > 0.0)) throw Error(ErrorCode::InvalidArgument, "A must be positive");
    BoundCurve c;
    c.name = "restricted_lsi_exp";
    c.eval = [A](double t) { return std::exp(-t / A); };
    c.params = {{"A", A}};
    c.prefactor = Prefactor::entropy0;
    return c;
}

double c_min(const Potential& V, double half_width, std::size_t n) {
    if (!V.has_derivatives()) throw Error(ErrorCode::DerivativeMissing, "c_min needs V' and V''");
    double lo = std::max(V.lo, -half_width), hi = std::min(V.hi, half_width);
    double m = std::numeric_limits<double>::infinity();
    for (double x : linspace(lo, hi, n)) {
        double d = V.dphi(x);
        m = std::min(m, d * d - V.d2phi(x));
    }
    return std::max(0.0, -m);
}

RoyerBounds royer_bounds(const Potential& V, double x, double t, double p) {
    if (!(t > 0.0 && t < 1.0 / (2.0 * M_PI)))
        throw Error(ErrorCode::TimeOutOfRange, "t must lie in (0, 1/(2 pi))");
    if (p < 1.0) throw Error(ErrorCode::InvalidArgument, "p must be at least 1");
    RoyerBounds r;
    r.c_min = c_min(V);
    const double v = V(x);
    const double vp = std::max(v, 0.0);
    const double C = r.c_min;
    r.log_moment_ub = std::pow(4.0, p - 1.0) *
                      (std::pow(vp, p) + std::pow(C * t / 2.0, p) +
                       std::pow(0.5 * std::log(1.0 / (2.0 * M_PI * t)), p) +
                       std::exp(v + p * (std::log(p) - 1.0) + C * t / 2.0));
    r.l2_ub = std::exp(-0.5 * std::log(2.0 * M_PI * t) + C * t + 2.0 * v);
    return r;
}

double growth_domination_ratio(double alpha, double R, std::size_t n) {
    double worst = 0.0;
    auto g = linspace(-R, R, n);
    const double D = std::pow(2.0, alpha - 1.0);
    for (double x : g)
        for (double y : g) {
            double rhs = D * (std::pow(std::fabs(x), alpha) + (y - x) * (y - x) + 1.0);
            worst = std::max(worst, std::pow(std::fabs(y), alpha) / rhs);
        }
    return worst;
}

double nosg_log_inner(double lambda, double t, double u) {
    const double a = 1.0 - lambda;
    const double z = (u + a * t) / std::sqrt(t);
    return std::log(lambda / 2.0) + a * u + a * a * t / 2.0 + 0.5 * std::log(2.0 * M_PI * t) +
           log_norm_cdf(z);
}

L2Membership l2_membership(double lambda, double t, double U) {
    if (!(lambda > 0.0) || !(t > 0.0))
        throw Error(ErrorCode::InvalidArgument, "lambda and t must be positive");
    auto us = linspace(U / 2.0, U, 41);
    std::vector<double> y;
    for (double u : us) y.push_back(2.0 * nosg_log_inner(lambda, t, u));
    L2Membership r;
    r.tail_exponent = fit_line(us, y).slope;
    r.finite = r.tail_exponent < -0.05;
    return r;
}

BoundCurve tv_bound_schedule(const TvScheduleInputs& in) {
    if (!in.mu) throw Error(ErrorCode::InvalidArgument, "measure missing");
    if (!in.poincare_constant && !in.entropy_factor)
        throw Error(ErrorCode::NoCertificate, "need a Poincare constant or an entropy decay profile");
    if (in.K_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty K grid");
    struct Level {
        double K, mass, var, ent, tail;
    };
    std::vector<Level> levels;
    const auto& m = in.mu->node_mass();
    for (double K : in.K_grid) {
        auto hk = in.h.map([K](double v) { return std::min(v, K); });
        NeumaierSum tail;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (in.h[i] > K) tail.add(m[i] * (in.h[i] - K));
        levels.push_back({K, mean(*in.mu, hk), variance(*in.mu, hk), entropy(*in.mu, hk),
                          2.0 * tail.value()});
    }
    auto cp = in.poincare_constant;
    auto ef = in.entropy_factor;
    BoundCurve c;
    c.name = "tv_schedule";
    c.eval = [levels, cp, ef](double t) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& L : levels) {
            double route = std::numeric_limits<double>::infinity();
            if (cp) route = std::min(route, std::sqrt(L.var * std::exp(-t / *cp)));
            if (ef) route = std::min(route, std::sqrt(2.0 * L.mass * L.ent * (*ef)(t)));
            best = std::min(best, route + L.tail);
        }
        return best;
    };
    if (cp) c.params["C_P"] = *cp;
    c.params["levels"] = double(levels.size());
    return c;
}

StretchedFit fit_stretched_exponential(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 4)
        throw Error(ErrorCode::InsufficientSamples, "need at least 4 samples");
    std::vector<double> ly;
    for (double v : y) {
        if (!(v > 0.0)) throw Error(ErrorCode::NegativeInput, "values must be positive");
        ly.push_back(std::log(v));
    }
    auto rms_at = [&](double g) {
        std::vector<double> tg;
        for (double s : t) tg.push_back(std::pow(s, g));
        return fit_line(tg, ly);
    };
    double best_g = 0.05, best = std::numeric_limits<double>::infinity();
    for (double g = 0.05; g <= 2.0 + 1e-12; g += 0.01) {
        double r = rms_at(g).rms_residual;
        if (r < best) {
            best = r;
            best_g = g;
        }
    }
    double g = golden_section_min([&](double x) { return rms_at(x).rms_residual; },
                                  std::max(0.01, best_g - 0.01), std::min(2.0, best_g + 0.01),
                                  1e-6);
    auto f = rms_at(g);
    return {f.intercept, -f.slope, g, f.rms_residual};
}

}  // namespace wfi
