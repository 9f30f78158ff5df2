#include "wfi/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

double s_star(double mass, NecessaryKernel kernel) {
    if (kernel == NecessaryKernel::half_mass) return 0.5 * mass * std::log1p(1.0 / (2.0 * mass));
    return 0.5 * mass * std::log1p(std::exp(2.0) / mass);
}

double resistance(const Measure1D& mu, double a, double b) { return mu.resistance(a, b); }

namespace {
struct HalfLine {
    double mass;
    double res;
};

HalfLine half_line(const Measure1D& mu, double x) {
    const double m = mu.median();
    const auto& g = mu.x();
    const std::size_t k = mu.locate(m);
    if (std::abs(x - m) < 0.5 * (g[k + 1] - g[k])) {
        std::ostringstream os;
        os << "x = " << x << " is within half a cell of the median " << m;
        throw Error(ErrorCode::AtMedian, os.str());
    }
    if (x > m) return {mu.tail_right(x), mu.resistance(m, x)};
    return {mu.tail_left(x), mu.resistance(x, m)};
}
}  // namespace

double cap_halfline(const Measure1D& mu, double x) {
    HalfLine h = half_line(mu, x);
    return 1.0 / h.res;
}

std::vector<double> default_x_grid(const Measure1D& mu, std::size_t per_side, double mass_hi,
                                   double mass_lo) {
    const double total = mu.total_mass();
    const double m = mu.median();
    const auto& g = mu.x();
    const std::size_t k = mu.locate(m);
    const double gap = 0.5 * (g[k + 1] - g[k]);
    std::vector<double> xs;
    for (double t : logspace(mass_hi, mass_lo, per_side)) xs.push_back(mu.left_quantile(t * total));
    std::reverse(xs.begin(), xs.end());
    for (double t : logspace(mass_hi, mass_lo, per_side)) xs.push_back(mu.right_quantile(t * total));
    xs.erase(std::remove_if(xs.begin(), xs.end(), [m, gap](double x) { return std::abs(x - m) < gap; }),
             xs.end());
    return xs;
}

CapacityProfile check_necessary(const Measure1D& mu, const RateFunction& beta,
                                const std::vector<double>& x_grid, NecessaryKernel kernel) {
    CapacityProfile prof;
    for (double x : x_grid) {
        HalfLine h = half_line(mu, x);
        CapacityRow r;
        r.x = x;
        r.mass = h.mass / mu.total_mass();
        r.cap = 1.0 / h.res;
        r.s_star = s_star(r.mass, kernel);
        double b = beta(r.s_star);
        r.lhs = std::isinf(b) ? 0.0 : r.s_star / b;
        r.ratio = r.cap > 0.0 ? r.lhs / r.cap : (r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (r.ratio > 1.0 + 1e-9) ++prof.violations;
        prof.max_ratio = std::max(prof.max_ratio, r.ratio);
        prof.rows.push_back(r);
    }
    return prof;
}

RateFunction beta_from_capacity(const Measure1D& mu, const std::vector<double>& x_grid,
                                NecessaryKernel kernel) {
    const std::vector<double> xs = x_grid.empty() ? default_x_grid(mu) : x_grid;
    std::vector<std::pair<double, double>> pts;
    double mmin = 1.0, mmax = 0.0;
    for (double x : xs) {
        HalfLine h = half_line(mu, x);
        double mass = h.mass / mu.total_mass();
        if (!(mass > 0.0) || !std::isfinite(h.res)) continue;
        double s = s_star(mass, kernel);
        pts.emplace_back(s, s * h.res);
        mmin = std::min(mmin, mass);
        mmax = std::max(mmax, mass);
    }
    if (pts.size() < 8 || !(mmax / mmin >= 999.0))
        throw Error(ErrorCode::InsufficientRange,
                    "beta_from_capacity needs >= 8 half-lines spanning >= 3 decades of mass");
    std::sort(pts.begin(), pts.end());
    std::vector<double> s, b;
    for (const auto& [sv, bv] : pts) {
        if (!s.empty() && sv <= s.back() * (1.0 + 1e-12)) {
            b.back() = std::max(b.back(), bv);
            continue;
        }
        s.push_back(sv);
        b.push_back(bv);
    }
    for (std::size_t i = b.size() - 1; i-- > 0;) b[i] = std::max(b[i], b[i + 1]);
    return RateFunction::table(std::move(s), std::move(b));
}

}  // namespace wfi
