#include "wfi/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

const char* to_string(Family f) {
    switch (f) {
        case Family::heavy_tail: return "heavy_tail";
        case Family::subexp: return "subexp";
        case Family::double_exp: return "double_exp";
        case Family::gaussian: return "gaussian";
        case Family::custom: return "custom";
    }
    return "custom";
}

std::string Potential::tag() const {
    std::ostringstream os;
    os << to_string(family);
    if (family == Family::heavy_tail || family == Family::subexp) os << "(" << alpha << ")";
    if (smoothed) os << "[smoothed]";
    return os.str();
}

namespace {
double sgn(double x) { return (x > 0) - (x < 0); }
}  // namespace

Potential Potential::subexp(double alpha, bool smoothed) {
    if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "subexp needs alpha > 0");
    Potential p;
    p.family = Family::subexp;
    p.alpha = alpha;
    p.smoothed = smoothed;
    if (smoothed) {
        p.phi = [alpha](double x) { return std::pow(1.0 + x * x, 0.5 * alpha); };
        p.dphi = [alpha](double x) { return alpha * x * std::pow(1.0 + x * x, 0.5 * alpha - 1.0); };
        p.d2phi = [alpha](double x) {
            double r = 1.0 + x * x;
            return alpha * std::pow(r, 0.5 * alpha - 2.0) * (1.0 + (alpha - 1.0) * x * x);
        };
    } else {
        p.phi = [alpha](double x) { return std::pow(std::abs(x), alpha); };
        p.dphi = [alpha](double x) {
            if (x == 0.0) return 0.0;
            return alpha * sgn(x) * std::pow(std::abs(x), alpha - 1.0);
        };
        p.d2phi = [alpha](double x) {
            if (alpha == 1.0) return 0.0;
            if (x == 0.0) {
                if (alpha < 2.0) return std::numeric_limits<double>::infinity();
                return alpha == 2.0 ? 2.0 : 0.0;
            }
            return alpha * (alpha - 1.0) * std::pow(std::abs(x), alpha - 2.0);
        };
    }
    return p;
}

Potential Potential::heavy_tail(double alpha, bool smoothed) {
    if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "heavy_tail needs alpha > 0");
    Potential p;
    p.family = Family::heavy_tail;
    p.alpha = alpha;
    p.smoothed = smoothed;
    const double k = 1.0 + alpha;
    if (smoothed) {
        p.phi = [k](double x) { return k * std::log1p(std::sqrt(1.0 + x * x)); };
        p.dphi = [k](double x) {
            double r = std::sqrt(1.0 + x * x);
            return k * x / (r * (1.0 + r));
        };
        p.d2phi = [k](double x) {
            double r = std::sqrt(1.0 + x * x);
            return k * (r * (1.0 + r) - (x * x / r) * (1.0 + 2.0 * r)) / (r * r * (1.0 + r) * (1.0 + r));
        };
    } else {
        p.phi = [k](double x) { return k * std::log1p(std::abs(x)); };
        p.dphi = [k](double x) { return k * sgn(x) / (1.0 + std::abs(x)); };
        p.d2phi = [k](double x) {
            double a = 1.0 + std::abs(x);
            return -k / (a * a);
        };
    }
    return p;
}

Potential Potential::double_exp(bool smoothed) {
    Potential p = subexp(1.0, smoothed);
    p.family = Family::double_exp;
    return p;
}

Potential Potential::gaussian() {
    Potential p = subexp(2.0, false);
    p.family = Family::gaussian;
    return p;
}

Potential Potential::uniform(double a, double b) {
    if (!(b > a)) throw Error(ErrorCode::InvalidArgument, "uniform needs a < b");
    Potential p;
    p.family = Family::custom;
    p.phi = [](double) { return 0.0; };
    p.dphi = [](double) { return 0.0; };
    p.d2phi = [](double) { return 0.0; };
    p.lo = a;
    p.hi = b;
    return p;
}

namespace {
double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    double t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    return ys[k] + t * (ys[k + 1] - ys[k]);
}

std::vector<double> node_derivative(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i == 0 ? 0 : i - 1;
        std::size_t b = i + 1 == n ? n - 1 : i + 1;
        d[i] = (ys[b] - ys[a]) / (xs[b] - xs[a]);
    }
    return d;
}
}  // namespace

Potential Potential::tabulated(std::vector<double> x, std::vector<double> phi) {
    if (x.size() < 3 || x.size() != phi.size())
        throw Error(ErrorCode::InvalidArgument, "tabulated potential needs >= 3 matching samples");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw Error(ErrorCode::InvalidArgument, "tabulated x must increase");
    for (double v : phi)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFinitePotential, "non-finite tabulated phi");
    auto xs = std::make_shared<std::vector<double>>(std::move(x));
    auto ys = std::make_shared<std::vector<double>>(std::move(phi));
    auto d1 = std::make_shared<std::vector<double>>(node_derivative(*xs, *ys));
    auto d2 = std::make_shared<std::vector<double>>(node_derivative(*xs, *d1));
    Potential p;
    p.family = Family::custom;
    p.phi = [xs, ys](double v) { return interp(*xs, *ys, v); };
    p.dphi = [xs, d1](double v) { return interp(*xs, *d1, v); };
    p.d2phi = [xs, d2](double v) { return interp(*xs, *d2, v); };
    p.lo = xs->front();
    p.hi = xs->back();
    return p;
}

Potential Potential::scaled(double c) const {
    Potential p = *this;
    auto f = phi;
    p.phi = [f, c](double x) { return c * f(x); };
    if (dphi) {
        auto g = dphi;
        p.dphi = [g, c](double x) { return c * g(x); };
    }
    if (d2phi) {
        auto h = d2phi;
        p.d2phi = [h, c](double x) { return c * h(x); };
    }
    return p;
}

GridSpec auto_grid(const Potential& pot, std::size_t n, double cut) {
    GridSpec spec;
    spec.n = n;
    double c = 0.0;
    if (std::isfinite(pot.lo) && std::isfinite(pot.hi)) {
        spec.xmin = pot.lo;
        spec.xmax = pot.hi;
        return spec;
    }
    if (std::isfinite(pot.lo) || std::isfinite(pot.hi))
        c = std::isfinite(pot.lo) ? pot.lo : pot.hi;
    const double base = pot.phi(c) + cut;
    auto reach = [&](double dir, double limit) {
        if (std::isfinite(limit)) return limit;
        double step = 1.0;
        while (pot.phi(c + dir * step) < base) {
            step *= 2.0;
            if (step > 1e300) throw Error(ErrorCode::InvalidArgument, "potential does not grow");
        }
        double r = bisect([&](double t) { return pot.phi(c + dir * t) - base; }, 0.0, step);
        return c + dir * r;
    };
    spec.xmin = reach(-1.0, pot.lo);
    spec.xmax = reach(1.0, pot.hi);
    spec.center = c;
    if (pot.family == Family::heavy_tail) spec.spacing = Spacing::graded;
    return spec;
}

std::vector<double> make_nodes(const GridSpec& spec) {
    if (spec.n < 2 || !(spec.xmax > spec.xmin))
        throw Error(ErrorCode::InvalidArgument, "grid needs xmin < xmax and n >= 2");
    if (spec.spacing == Spacing::uniform) return linspace(spec.xmin, spec.xmax, spec.n + 1);
    const double s = spec.scale;
    std::vector<double> y = linspace(std::asinh((spec.xmin - spec.center) / s),
                                     std::asinh((spec.xmax - spec.center) / s), spec.n + 1);
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = spec.center + s * std::sinh(y[i]);
    x.front() = spec.xmin;
    x.back() = spec.xmax;
    return x;
}

Measure1D Measure1D::build(const Potential& pot, const GridSpec& spec, bool is_probability) {
    if (!pot.phi) throw Error(ErrorCode::InvalidArgument, "potential without phi");
    if (spec.n < 64) throw Error(ErrorCode::InvalidArgument, "measure grids need n >= 64 cells");
    if (spec.xmin < pot.lo || spec.xmax > pot.hi)
        throw Error(ErrorCode::OutOfDomain, "grid extends beyond the potential's domain");
    Measure1D m;
    m.pot_ = pot;
    m.spec_ = spec;
    m.is_probability_ = is_probability;
    auto xs = std::make_shared<std::vector<double>>(make_nodes(spec));
    const auto& x = *xs;
    const std::size_t nn = x.size(), nc = nn - 1;

    std::vector<double> phi(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        phi[i] = pot.phi(x[i]);
        if (!std::isfinite(phi[i])) {
            std::ostringstream os;
            os << "phi(" << x[i] << ") = " << phi[i];
            throw Error(ErrorCode::NonFinitePotential, os.str());
        }
    }
    const double ref = *std::min_element(phi.begin(), phi.end());
    m.phi_ref_ = ref;

    std::vector<double> i0(nc), i1(nc), i2(nc);
    NeumaierSum total;
    for (std::size_t c = 0; c < nc; ++c) {
        const double a = x[c], h = x[c + 1] - x[c];
        double res[3];
        integrate_many(
            [&](double v, double* out) {
                double d = pot.phi(v) - ref;
                double e = std::exp(-d);
                out[0] = e;
                out[1] = e * (v - a) / h;
                out[2] = std::exp(d);
            },
            3, x[c], x[c + 1], res, 1e-13, 30);
        i0[c] = res[0];
        i1[c] = res[1];
        i2[c] = res[2] < std::numeric_limits<double>::infinity() ? res[2]
                                                               : std::numeric_limits<double>::infinity();
        total.add(res[0]);
    }
    const double S = total.value();
    if (!(S > 0) || !std::isfinite(S)) throw Error(ErrorCode::NonFinitePotential, "zero or infinite mass");

    if (is_probability) {
        auto outside = [&](double from, double limit, bool right) {
            if (from == limit) return 0.0;
            auto f = [&](double v) { return std::exp(-(pot.phi(v) - ref)); };
            if (std::isfinite(limit)) return right ? integrate(f, from, limit, 1e-8).value
                                                   : integrate(f, limit, from, 1e-8).value;
            return right ? integrate_to_infinity(f, from, 1e-8).value
                         : integrate_from_minus_infinity(f, from, 1e-8).value;
        };
        double deficit = (outside(x.back(), pot.hi, true) + outside(x.front(), pot.lo, false)) / S;
        if (!(deficit <= 1e-6)) {
            std::ostringstream os;
            os << "truncated mass fraction " << deficit << " exceeds 1e-6";
            throw Error(ErrorCode::MassDeficit, os.str());
        }
    }

    m.log_z_ = -ref + std::log(S);
    m.z_ = std::exp(m.log_z_);
    double mass_scale, res_scale;
    if (is_probability) {
        mass_scale = 1.0 / S;
        res_scale = S;
        m.total_ = 1.0;
    } else {
        mass_scale = std::exp(-ref);
        res_scale = std::exp(ref);
        m.total_ = m.z_;
    }
    m.dens_scale_ = mass_scale;
    m.cell_mass_.resize(nc);
    m.cell_res_.resize(nc);
    m.node_mass_.assign(nn, 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
        m.cell_mass_[c] = i0[c] * mass_scale;
        m.cell_res_[c] = i2[c] * res_scale;
        m.node_mass_[c] += (i0[c] - i1[c]) * mass_scale;
        m.node_mass_[c + 1] += i1[c] * mass_scale;
    }
    if (is_probability) {
        NeumaierSum s;
        for (double v : m.node_mass_) s.add(v);
        double k = 1.0 / s.value();
        for (double& v : m.node_mass_) v *= k;
    }
    m.rho_.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) m.rho_[i] = std::exp(-(phi[i] - ref)) * mass_scale;

    m.prefix_.assign(nc + 1, 0.0);
    m.suffix_.assign(nc + 1, 0.0);
    {
        NeumaierSum s;
        for (std::size_t c = 0; c < nc; ++c) {
            s.add(m.cell_mass_[c]);
            m.prefix_[c + 1] = s.value();
        }
        NeumaierSum r;
        for (std::size_t c = nc; c-- > 0;) {
            r.add(m.cell_mass_[c]);
            m.suffix_[c] = r.value();
        }
    }
    m.x_ = xs;
    m.median_ = m.quantile(0.5);
    return m;
}

std::size_t Measure1D::locate(double v) const {
    const auto& x = *x_;
    auto it = std::upper_bound(x.begin(), x.end(), v);
    std::ptrdiff_t k = (it - x.begin()) - 1;
    if (k < 0) k = 0;
    if (k > static_cast<std::ptrdiff_t>(cells()) - 1) k = static_cast<std::ptrdiff_t>(cells()) - 1;
    return static_cast<std::size_t>(k);
}

double Measure1D::density(double v) const {
    if (v < xmin() || v > xmax()) return 0.0;
    return std::exp(-(pot_.phi(v) - phi_ref_)) * dens_scale_;
}

double Measure1D::partial_mass(std::size_t, double a, double b) const {
    if (a >= b) return 0.0;
    return integrate([&](double v) { return std::exp(-(pot_.phi(v) - phi_ref_)); }, a, b, 1e-13)
               .value *
           dens_scale_;
}

double Measure1D::partial_resistance(std::size_t, double a, double b) const {
    if (a >= b) return 0.0;
    return integrate([&](double v) { return std::exp(pot_.phi(v) - phi_ref_); }, a, b, 1e-13)
               .value /
           dens_scale_;
}

double Measure1D::cdf(double v) const {
    if (v <= xmin()) return 0.0;
    if (v >= xmax()) return total_;
    std::size_t k = locate(v);
    return prefix_[k] + partial_mass(k, (*x_)[k], v);
}

double Measure1D::tail_left(double v) const { return cdf(v); }

double Measure1D::tail_right(double v) const {
    if (v <= xmin()) return total_;
    if (v >= xmax()) return 0.0;
    std::size_t k = locate(v);
    return suffix_[k + 1] + partial_mass(k, v, (*x_)[k + 1]);
}

double Measure1D::left_quantile(double tail) const {
    if (tail <= 0.0) return xmin();
    if (tail >= total_) return xmax();
    auto it = std::upper_bound(prefix_.begin(), prefix_.end(), tail);
    std::size_t k = static_cast<std::size_t>(it - prefix_.begin()) - 1;
    if (k >= cells()) k = cells() - 1;
    const double a = (*x_)[k], b = (*x_)[k + 1];
    const double base = prefix_[k];
    return bisect([&](double v) { return base + partial_mass(k, a, v) - tail; }, a, b, 0.0, 80);
}

double Measure1D::right_quantile(double tail) const {
    if (tail <= 0.0) return xmax();
    if (tail >= total_) return xmin();
    // suffix_ is non-increasing; find k with suffix_[k+1] <= tail < suffix_[k].
    std::size_t lo = 0, hi = cells();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (suffix_[mid] > tail)
            lo = mid;
        else
            hi = mid;
    }
    std::size_t k = lo;
    const double a = (*x_)[k], b = (*x_)[k + 1];
    const double base = suffix_[k + 1];
    return bisect([&](double v) { return base + partial_mass(k, v, b) - tail; }, a, b, 0.0, 80);
}

double Measure1D::quantile(double p) const {
    if (p <= 0.5) return left_quantile(p * total_);
    return right_quantile((1.0 - p) * total_);
}

double Measure1D::resistance(double a, double b) const {
    if (a > b) std::swap(a, b);
    if (a < xmin() || b > xmax()) throw Error(ErrorCode::OutOfDomain, "resistance outside the grid");
    std::size_t ka = locate(a), kb = locate(b);
    const double inf = std::numeric_limits<double>::infinity();
    auto finite_or_inf = [inf](double v) { return v < inf ? v : inf; };
    if (ka == kb) return finite_or_inf(partial_resistance(ka, a, b));
    NeumaierSum s;
    bool overflow = false;
    auto add = [&](double v) {
        if (v < inf)
            s.add(v);
        else
            overflow = true;
    };
    add(partial_resistance(ka, a, (*x_)[ka + 1]));
    for (std::size_t c = ka + 1; c < kb; ++c) add(cell_res_[c]);
    add(partial_resistance(kb, (*x_)[kb], b));
    return overflow ? inf : finite_or_inf(s.value());
}

GridFunction Measure1D::sample(const std::function<double(double)>& f) const {
    std::vector<double> v(nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f((*x_)[i]);
    return GridFunction(x_, std::move(v));
}

GridFunction Measure1D::constant(double c) const {
    return GridFunction(x_, std::vector<double>(nodes(), c));
}

GridFunction::GridFunction(std::shared_ptr<const std::vector<double>> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_ || grid_->size() != values_.size())
        throw Error(ErrorCode::InvalidArgument, "grid function size does not match its grid");
}

double GridFunction::operator()(double v) const {
    return interp(*grid_, values_, v);
}

std::vector<double> GridFunction::slopes() const {
    const auto& x = *grid_;
    std::vector<double> s(values_.size() - 1);
    for (std::size_t c = 0; c + 1 < values_.size(); ++c)
        s[c] = (values_[c + 1] - values_[c]) / (x[c + 1] - x[c]);
    return s;
}

GridFunction GridFunction::map(const std::function<double(double)>& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
    return GridFunction(grid_, std::move(v));
}

namespace {
void check_match(const Measure1D& mu, const GridFunction& f) {
    if (f.size() != mu.nodes()) throw Error(ErrorCode::InvalidArgument, "function not on this grid");
}
}  // namespace

double tail_mass(const Measure1D& mu, double x, bool right) {
    if (x < mu.xmin() || x > mu.xmax()) {
        std::ostringstream os;
        os << "x = " << x << " outside [" << mu.xmin() << ", " << mu.xmax() << "]";
        throw Error(ErrorCode::OutOfDomain, os.str());
    }
    return right ? mu.tail_right(x) : mu.tail_left(x);
}

double mean(const Measure1D& mu, const GridFunction& f) {
    check_match(mu, f);
    NeumaierSum s;
    const auto& m = mu.node_mass();
    for (std::size_t i = 0; i < m.size(); ++i) s.add(m[i] * f[i]);
    return s.value() / mu.total_mass();
}

double variance(const Measure1D& mu, const GridFunction& f) {
    const double mf = mean(mu, f);
    NeumaierSum s;
    const auto& m = mu.node_mass();
    for (std::size_t i = 0; i < m.size(); ++i) {
        double d = f[i] - mf;
        s.add(m[i] * d * d);
    }
    return s.value() / mu.total_mass();
}

double entropy_kernel(double u) {
    if (u <= 0.0) return 1.0;
    double d = u - 1.0;
    if (std::abs(d) < 0.1) {
        // sum_{k>=2} (-1)^k d^k / (k (k - 1))
        double term = d * d, sum = 0.0;
        for (int k = 2; k < 24; ++k) {
            sum += ((k % 2 == 0) ? 1.0 : -1.0) * term / (k * (k - 1.0));
            term *= d;
        }
        return sum;
    }
    return u * std::log(u) - u + 1.0;
}

double discrete_entropy(const std::vector<double>& m, const std::vector<double>& h) {
    NeumaierSum tot, mass;
    double scale = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) scale = std::max(scale, std::abs(h[i]));
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (h[i] < -1e-12 * scale) throw Error(ErrorCode::NegativeInput, "entropy of a negative function");
        tot.add(m[i]);
        mass.add(m[i] * std::max(h[i], 0.0));
    }
    const double mt = tot.value();
    const double M = mass.value() / mt;
    if (!(M > 0)) return 0.0;
    NeumaierSum s;
    for (std::size_t i = 0; i < m.size(); ++i) s.add(m[i] * entropy_kernel(std::max(h[i], 0.0) / M));
    return M * s.value() / mt;
}

double entropy(const Measure1D& mu, const GridFunction& g) {
    check_match(mu, g);
    return discrete_entropy(mu.node_mass(), g.values());
}

double oscillation(const Measure1D& mu, const GridFunction& f) {
    check_match(mu, f);
    auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
    return *hi - *lo;
}

double dirichlet(const Measure1D& mu, const GridFunction& f) {
    check_match(mu, f);
    const auto s = f.slopes();
    const auto& cm = mu.cell_mass();
    NeumaierSum acc;
    for (std::size_t c = 0; c < s.size(); ++c) acc.add(s[c] * s[c] * cm[c]);
    return acc.value();
}

}  // namespace wfi
