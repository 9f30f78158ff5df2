#include "wfi/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wfi/capacity.hpp"
#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

namespace {

struct SidePoint {
    double x, mass, res;
};

std::vector<SidePoint> side_points(const Measure1D& mu, const std::vector<double>& xs, bool right) {
    const double m = mu.median();
    std::vector<SidePoint> pts;
    for (double x : xs) {
        if (right && x > m) pts.push_back({x, mu.tail_right(x) / mu.total_mass(), mu.resistance(m, x)});
        if (!right && x < m) pts.push_back({x, mu.tail_left(x) / mu.total_mass(), mu.resistance(x, m)});
    }
    // outward order: decreasing mass
    std::sort(pts.begin(), pts.end(), [](const SidePoint& a, const SidePoint& b) { return a.mass > b.mass; });
    return pts;
}

struct Sup {
    double value = 0.0;
    double x = 0.0;
    bool divergent = false;
};

Sup supremum(const std::vector<SidePoint>& pts, const std::vector<double>& integrand) {
    Sup s;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (integrand[i] > s.value) {
            s.value = integrand[i];
            s.x = pts[i].x;
        }
    const std::size_t n = pts.size();
    const std::size_t tail = std::max<std::size_t>(3, n / 10);
    if (n < tail + 1) return s;
    bool growing = true;
    std::vector<double> lx, ly;
    for (std::size_t i = n - tail; i < n; ++i) {
        if (i > n - tail && !(integrand[i] >= integrand[i - 1])) growing = false;
        if (integrand[i] > 0.0 && pts[i].mass < 1.0) {
            lx.push_back(std::log(std::log(1.0 / pts[i].mass)));
            ly.push_back(std::log(integrand[i]));
        }
    }
    if (growing && lx.size() >= 3 && fit_line(lx, ly).slope > 0.25) s.divergent = true;
    if (!std::isfinite(s.value)) s.divergent = true;
    return s;
}

}  // namespace

HardyBounds hardy_bounds(const Measure1D& mu, const RateFunction& beta, const std::vector<double>& x_grid) {
    const std::vector<double> xs = x_grid.empty() ? default_x_grid(mu) : x_grid;
    HardyBounds hb;
    const double e2 = std::exp(2.0);
    for (bool right : {true, false}) {
        auto pts = side_points(mu, xs, right);
        std::vector<double> small(pts.size()), big(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double m = pts[i].mass;
            const double s = s_star(m, NecessaryKernel::half_mass);
            small[i] = s / beta(s) * pts[i].res;
            const double k = m * std::log1p(e2 / m);
            big[i] = 16.0 * k / beta(14.0 / 3.0 * k) * pts[i].res;
        }
        Sup b = supremum(pts, small), B = supremum(pts, big);
        const char* nb = right ? "b_plus" : "b_minus";
        const char* nB = right ? "B_plus" : "B_minus";
        if (b.divergent) {
            hb.divergent.emplace_back(nb);
            b.value = std::numeric_limits<double>::infinity();
        }
        if (B.divergent) {
            hb.divergent.emplace_back(nB);
            B.value = std::numeric_limits<double>::infinity();
        }
        if (right) {
            hb.b_plus = b.value;
            hb.x_b_plus = b.x;
            hb.B_plus = B.value;
            hb.x_B_plus = B.x;
        } else {
            hb.b_minus = b.value;
            hb.x_b_minus = b.x;
            hb.B_minus = B.value;
            hb.x_B_minus = B.x;
        }
    }
    hb.lower = std::max(hb.b_plus, hb.b_minus);
    hb.upper = std::max(hb.B_plus, hb.B_minus);
    return hb;
}

double poincare_upper_bound(const Measure1D& mu, const std::vector<double>& x_grid) {
    const std::vector<double> xs = x_grid.empty() ? default_x_grid(mu) : x_grid;
    double sup = 0.0;
    for (bool right : {true, false})
        for (const auto& p : side_points(mu, xs, right)) sup = std::max(sup, p.mass * p.res);
    return 4.0 * sup;
}

SufficientCheck sufficient_condition_check(const Potential& pot, const RateFunction& beta, double eps,
                                           std::pair<double, double> interval,
                                           std::size_t points_per_side) {
    if (!pot.has_derivatives()) throw Error(ErrorCode::DerivativeMissing, "potential needs Phi' and Phi''");
    const GridSpec g = auto_grid(pot, 2048);
    const double log_z = Measure1D::build(pot, g).log_z();
    auto [x0, x1] = interval;
    if (!(x0 < x1) || x0 <= g.xmin || x1 >= g.xmax)
        throw Error(ErrorCode::InvalidArgument, "interval must lie inside the truncated domain");

    std::vector<double> xs;
    for (double d : logspace(1e-6, 1.0, points_per_side)) {
        xs.push_back(x1 + d * (g.xmax - x1));
        xs.push_back(x0 - d * (x0 - g.xmin));
    }
    SufficientCheck r;
    r.A = -std::numeric_limits<double>::infinity();
    r.A_prime = std::numeric_limits<double>::infinity();
    struct P {
        double phi, dphi;
    };
    std::vector<P> pts;
    for (double x : xs) {
        const double phi = pot.phi(x) + log_z;
        const double d1 = pot.dphi(x);
        const double d2 = pot.d2phi(x);
        if (d1 == 0.0) throw Error(ErrorCode::ZeroDerivative, "Phi'(" + std::to_string(x) + ") = 0");
        r.max_curvature_ratio = std::max(r.max_curvature_ratio, std::abs(d2) / (d1 * d1));
        if (phi > 0.0) {
            const double a = (phi + std::log(std::abs(d1))) / phi;
            r.A = std::max(r.A, a);
            r.A_prime = std::min(r.A_prime, a);
        }
        pts.push_back({phi, d1});
    }
    if (!(r.max_curvature_ratio <= 1.0 - eps)) {
        r.failed = "curvature";
        return r;
    }
    if (!(r.A_prime > 0.0) || !std::isfinite(r.A)) {
        r.failed = "log-derivative bracket";
        return r;
    }
    for (const auto& p : pts) {
        if (!(p.phi > 0.0)) continue;
        const double arg = r.A * std::exp(-p.phi) * p.phi / std::abs(p.dphi);
        const double b = beta(std::max(arg, std::numeric_limits<double>::min()));
        r.c = std::max(r.c, p.phi / (p.dphi * p.dphi) / b);
    }
    if (!std::isfinite(r.c)) {
        r.failed = "rate comparison";
        return r;
    }
    r.pass = true;
    return r;
}

RateFit fit_rate_exponents(const std::vector<std::pair<double, double>>& samples) {
    std::vector<double> x1, x2, y;
    double smin = 1.0, smax = 0.0;
    for (const auto& [s, b] : samples) {
        if (!(s > 0.0 && s < 1.0) || !(b > 0.0)) continue;
        const double l = std::log(1.0 / s);
        x1.push_back(l);
        x2.push_back(std::log(l));
        y.push_back(std::log(b));
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    if (y.size() < 12 || !(smax / smin >= 999.0))
        throw Error(ErrorCode::InsufficientRange, "fit needs >= 12 samples spanning >= 3 decades");
    RateFit f;
    auto c = fit_plane(x1, x2, y, &f.rms);
    f.log_c = c[0];
    f.p = c[1];
    f.q = c[2];
    f.samples = y.size();
    return f;
}

RateFit fit_rate_exponents(const RateFunction& beta, double s_hi) {
    std::vector<std::pair<double, double>> pts;
    if (beta.kind() == RateKind::table) {
        const auto& s = beta.table_s();
        const auto& b = beta.table_beta();
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] <= s_hi) pts.emplace_back(s[i], b[i]);
    } else {
        pts = sample_rate(beta, 1e-9, s_hi, 60);
    }
    return fit_rate_exponents(pts);
}

}  // namespace wfi
