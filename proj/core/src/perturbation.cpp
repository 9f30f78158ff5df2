#include "wfi/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

namespace {

constexpr double kNodesPerDecade = 50.0;

double z_floor(double A) { return A > 0.0 ? A : 1e-12; }

double h_ratio(const Growth& g, double z) {
    double gz = g.G(z);
    return gz > 0.0 ? 2.0 * z / gz : std::numeric_limits<double>::infinity();
}

double base_dphi(const Potential& base, double x) { return base.dphi ? base.dphi(x) : 0.0; }

// Integral over the grid of f restricted to {V >= b} (all cells when b = -inf).
double integrate_region(const GoodPotentialReport& r, const std::vector<double>& x,
                        const std::function<double(double)>& f, double b) {
    NeumaierSum s;
    const auto& V = r.V;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        double a = x[i], c = x[i + 1];
        bool in_a = V(a) >= b, in_c = V(c) >= b;
        if (!in_a && !in_c) continue;
        if (in_a != in_c) {
            double cut = bisect([&](double y) { return V(y) - b; }, a, c);
            if (in_a)
                c = cut;
            else
                a = cut;
        }
        s.add(integrate(f, a, c, 1e-10).value);
    }
    return s.value();
}

}  // namespace

Growth Growth::power(double c, double e) {
    return {"power(" + std::to_string(c) + "," + std::to_string(e) + ")",
            [c, e](double z) { return z > 0.0 ? c * std::pow(z, e) : 0.0; }};
}

Growth Growth::zero() {
    return {"zero", [](double) { return 0.0; }};
}

double h_of(const GoodPotentialReport& r, double b) {
    const double z0 = z_floor(r.A);
    const double ratio = std::pow(10.0, 1.0 / kNodesPerDecade);
    double best = h_ratio(r.growth, z0);
    double z = z0 * ratio;
    while (z <= b * (1.0 + 1e-12)) {
        best = std::max(best, h_ratio(r.growth, z));
        z *= ratio;
    }
    return best;
}

double s_threshold(const RateFunction& beta, double h) {
    double hi = std::isfinite(beta.s_max()) ? beta.s_max() : 1e300;
    const double lo = 1e-300;
    if (beta(hi) > h) return std::numeric_limits<double>::infinity();
    if (beta(lo) <= h) return 0.0;
    double a = std::log(lo), c = std::log(hi);
    for (int i = 0; i < 200 && c - a > 1e-12; ++i) {
        double m = 0.5 * (a + c);
        if (beta(std::exp(m)) <= h)
            c = m;
        else
            a = m;
    }
    return std::exp(c);
}

GoodPotentialReport check_good(const Measure1D& base_mu, const Potential& V, const Growth& growth,
                               double A, const RateFunction* beta_wl_base, double b_max) {
    if (!V.has_derivatives()) throw Error(ErrorCode::DerivativeMissing, "V needs V' and V''");
    const Potential& base = base_mu.potential();
    if (!base.dphi) throw Error(ErrorCode::DerivativeMissing, "base potential needs Phi'");
    GoodPotentialReport r;
    r.A = A;
    r.growth = growth;
    r.V = V;
    r.base = base;
    r.xmin = base_mu.xmin();
    r.xmax = base_mu.xmax();

    const auto& x = base_mu.x();
    double m_v = -std::numeric_limits<double>::infinity();
    r.inf_V = std::numeric_limits<double>::infinity();
    for (double xi : x) {
        const double v = V(xi), d = V.dphi(xi), d2 = V.d2phi(xi);
        const double wd = base_dphi(base, xi);  // 2 W'
        r.inf_V = std::min(r.inf_V, v);
        const double lhs = d * d - d2 + wd * d;  // |V'|^2 - 2 LV
        if (v >= A) {
            ++r.checked;
            const double g = growth.G(v);
            const double margin = lhs - g;
            if (margin < r.worst_margin) {
                r.worst_margin = margin;
                r.worst_x = xi;
            }
            if (margin < -1e-9 * (1.0 + std::fabs(g))) ++r.violations;
        } else {
            m_v = std::max(m_v, -lhs);
        }
    }
    r.M_V = std::isfinite(m_v) ? m_v : 0.0;
    r.pass = r.violations == 0;

    const double z0 = z_floor(A);
    r.b_grid = logspace(z0, std::max(b_max, 10.0 * z0), 161);
    for (double b : r.b_grid) r.h_of_b.push_back(h_of(r, b));
    if (beta_wl_base)
        for (double h : r.h_of_b) r.s_b.push_back(s_threshold(*beta_wl_base, h));

    double ref = std::numeric_limits<double>::infinity();
    for (double xi : x) ref = std::min(ref, base(xi));
    for (double p : {1.0, 1.5, 1.9}) {
        auto f = [&, p](double y) { return std::exp(-p * V(y) - (base(y) - ref)); };
        double peak = 0.0;
        for (double xi : x) peak = std::max(peak, f(xi));
        bool decays = f(x.front()) <= 1e-12 * peak && f(x.back()) <= 1e-12 * peak;
        double val = 0.0;
        if (decays) {
            NeumaierSum s;
            for (std::size_t i = 0; i + 1 < x.size(); ++i) s.add(integrate(f, x[i], x[i + 1], 1e-10).value);
            val = s.value() * std::exp(-ref);
        } else {
            val = std::numeric_limits<double>::infinity();
        }
        r.moment_p.push_back(p);
        r.moment.push_back(val);
        if (std::isfinite(val)) r.moment_ok = true;
    }
    return r;
}

WitConstants wit_constants(const GoodPotentialReport& r, const RateFunction& beta_wl_base,
                           const RateFunction& beta_wp_nu, double u, double b) {
    if (b < r.A) throw Error(ErrorCode::InvalidArgument, "b must be at least A");
    if (!(u > 0.0)) throw Error(ErrorCode::InvalidArgument, "u must be positive");
    WitConstants w;
    w.h = h_of(r, b);
    w.s_b = s_threshold(beta_wl_base, w.h);
    const double k = 2.0 + 2.0 * r.A + r.M_V * w.h;
    w.C = w.h + k * beta_wp_nu(u);

    auto x = linspace(r.xmin, r.xmax, 4097);
    double ref = std::numeric_limits<double>::infinity();
    for (double xi : x) ref = std::min(ref, 2.0 * r.V(xi) + r.base(xi));
    auto dens = [&](double y) { return std::exp(-(2.0 * r.V(y) + r.base(y) - ref)); };
    double peak = 0.0;
    for (double xi : x) peak = std::max(peak, 2.0 * std::fabs(r.V(xi)) * dens(xi));
    const double ends = std::max(2.0 * std::fabs(r.V(x.front())) * dens(x.front()),
                                 2.0 * std::fabs(r.V(x.back())) * dens(x.back()));
    if (ends > 1e-12 * peak)
        throw Error(ErrorCode::TailIntegralDiverges, "2V e^{-2V} does not decay inside the base grid");
    const double z = integrate_region(r, x, dens, -std::numeric_limits<double>::infinity());
    const double tail = integrate_region(r, x, [&](double y) { return 2.0 * r.V(y) * dens(y); }, b);
    w.tail = tail / z;
    w.D = w.s_b * std::exp(-2.0 * r.inf_V) + k * u + w.tail;
    return w;
}

CorollaryResult corollary_ts_check(const GoodPotentialReport& r, const RateFunction& beta_wl_base,
                                   const ConstantsPolicy& policy) {
    CorollaryResult c;
    c.a = policy.a;
    c.a_prime = policy.a_prime;
    const double b_hi = r.b_grid.empty() ? 1e8 : r.b_grid.back();
    auto bs = logspace(b_hi / 10.0, b_hi, 11);
    std::vector<double> hr;
    for (double b : bs) hr.push_back(h_of(r, b) / b);
    c.h_ratio = hr.back();
    c.h_premise = std::isfinite(c.h_ratio) && c.h_ratio < 0.2;
    for (std::size_t i = 1; i < hr.size(); ++i)
        if (!(hr[i] <= hr[i - 1])) c.h_premise = false;

    auto ss = logspace(1e-30, 1e-29, 11);
    std::vector<double> br;
    for (auto it = ss.rbegin(); it != ss.rend(); ++it) br.push_back(beta_wl_base(*it) / std::log(1.0 / *it));
    c.beta_ratio = br.back();
    c.beta_premise = c.beta_ratio < 0.2;
    for (std::size_t i = 1; i < br.size(); ++i)
        if (!(br[i] <= br[i - 1] * (1.0 + 1e-12))) c.beta_premise = false;

    c.poincare = c.h_premise && c.beta_premise;
    if (c.poincare) {
        GoodPotentialReport copy = r;
        const double a = c.a, ap = c.a_prime;
        c.beta_v = RateFunction::derived(
            "a h(a' log(1/s))",
            [copy, a, ap](double s) { return a * h_of(copy, ap * std::log(1.0 / s)); }, 0.0,
            std::exp(-1.0));
    }
    return c;
}

}  // namespace wfi
