#include "wfi/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

namespace {

struct Operator {
    std::vector<double> m;  // node masses
    std::vector<double> g;  // half conductances, g_c / 2
};

Operator make_operator(const Measure1D& mu) {
    Operator op;
    op.m = mu.node_mass();
    const auto& r = mu.cell_resistance();
    op.g.resize(r.size());
    for (std::size_t c = 0; c < r.size(); ++c) op.g[c] = 0.5 / r[c];
    return op;
}

void explicit_step(const Operator& op, std::vector<double>& h, std::vector<double>& flux,
                   double dt) {
    const std::size_t nc = op.g.size();
    for (std::size_t c = 0; c < nc; ++c) flux[c] = op.g[c] * (h[c + 1] - h[c]);
    h[0] += dt * flux[0] / op.m[0];
    for (std::size_t i = 1; i < nc; ++i) h[i] += dt * (flux[i] - flux[i - 1]) / op.m[i];
    h[nc] -= dt * flux[nc - 1] / op.m[nc];
}

void implicit_step(const Operator& op, std::vector<double>& h, double dt) {
    const std::size_t n = h.size();
    std::vector<double> lo(n, 0.0), di(n), up(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double gl = i > 0 ? op.g[i - 1] : 0.0;
        double gr = i + 1 < n ? op.g[i] : 0.0;
        di[i] = op.m[i] + dt * (gl + gr);
        if (i > 0) lo[i] = -dt * gl;
        if (i + 1 < n) up[i] = -dt * gr;
        h[i] *= op.m[i];
    }
    solve_tridiagonal(std::move(lo), std::move(di), std::move(up), h);
}

double fisher_term(double a, double b) {
    if (a == b) return 0.0;
    if (a <= 0.0 || b <= 0.0) return std::numeric_limits<double>::infinity();
    return (b - a) * (std::log(b) - std::log(a));
}

void record(DecayTrace& tr, const Measure1D& mu, const Operator& op, std::vector<double>& h,
            double t, double mass0, bool keep) {
    double scale = 0.0;
    for (double v : h) scale = std::max(scale, std::fabs(v));
    for (double& v : h) {
        if (v < -1e-12 * scale)
            throw Error(ErrorCode::Instability, "negative density at t = " + std::to_string(t));
        if (v < 0.0) v = 0.0;
    }
    const auto& x = mu.x();
    NeumaierSum mass, first, second;
    for (std::size_t i = 0; i < h.size(); ++i) {
        mass.add(op.m[i] * h[i]);
        first.add(op.m[i] * h[i] * x[i]);
        second.add(op.m[i] * h[i] * x[i] * x[i]);
    }
    const double M = mass.value();
    if (std::fabs(M - mass0) > 1e-8)
        throw Error(ErrorCode::Instability, "mass drift " + std::to_string(M - mass0));
    NeumaierSum var, tv, fi, ds;
    bool fi_inf = false;
    for (std::size_t i = 0; i < h.size(); ++i) {
        var.add(op.m[i] * (h[i] - M) * (h[i] - M));
        tv.add(op.m[i] * std::fabs(h[i] - 1.0));
    }
    for (std::size_t c = 0; c + 1 < h.size(); ++c) {
        double gc = 2.0 * op.g[c];
        double ft = fisher_term(h[c], h[c + 1]);
        if (std::isinf(ft))
            fi_inf = true;
        else
            fi.add(gc * ft);
        double d = std::sqrt(h[c + 1]) - std::sqrt(h[c]);
        ds.add(gc * d * d);
    }
    tr.times.push_back(t);
    tr.entropy.push_back(discrete_entropy(op.m, h));
    tr.variance.push_back(var.value());
    tr.tv.push_back(tv.value());
    tr.fisher.push_back(fi_inf ? std::numeric_limits<double>::infinity() : fi.value());
    tr.dirichlet_sqrt.push_back(ds.value());
    tr.mass.push_back(M);
    double lm = first.value() / M;
    tr.law_mean.push_back(lm);
    tr.law_variance.push_back(second.value() / M - lm * lm);
    if (keep) tr.snapshots.push_back(h);
}

}  // namespace

Measure1D stationary_measure(const Potential& V, const GridSpec& spec) {
    return Measure1D::build(V.scaled(2.0), spec);
}

const char* to_string(Scheme s) {
    return s == Scheme::explicit_euler ? "explicit" : "implicit";
}

double explicit_stable_dt(const Measure1D& mu) {
    auto op = make_operator(mu);
    double dt = std::numeric_limits<double>::infinity();
    const std::size_t n = op.m.size();
    for (std::size_t i = 0; i < n; ++i) {
        double out = (i > 0 ? op.g[i - 1] : 0.0) + (i + 1 < n ? op.g[i] : 0.0);
        if (out > 0.0) dt = std::min(dt, op.m[i] / out);
    }
    return dt;
}

DecayTrace evolve(const SolverConfig& cfg) {
    if (!cfg.mu) throw Error(ErrorCode::InvalidArgument, "solver config has no measure");
    const Measure1D& mu = *cfg.mu;
    if (cfg.h0.size() != mu.nodes())
        throw Error(ErrorCode::InvalidArgument, "initial density does not match the grid");
    if (!(cfg.t_end > 0.0)) throw Error(ErrorCode::TimeOutOfRange, "t_end must be positive");
    auto op = make_operator(mu);
    std::vector<double> h = cfg.h0.values();
    NeumaierSum m0;
    for (std::size_t i = 0; i < h.size(); ++i) m0.add(op.m[i] * h[i]);
    const double mass0 = m0.value();
    if (std::fabs(mass0 - 1.0) > 1e-8)
        throw Error(ErrorCode::InvalidArgument, "initial density must have mass 1");

    std::vector<double> ts = cfg.sample_times;
    if (ts.empty()) {
        ts.push_back(0.0);
        double first = std::min(cfg.t_first, cfg.t_end);
        if (first < cfg.t_end)
            for (double t : logspace(first, cfg.t_end, cfg.n_samples)) ts.push_back(t);
        else
            ts.push_back(cfg.t_end);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    DecayTrace tr;
    tr.scheme = cfg.scheme;
    double dt = cfg.dt;
    if (cfg.scheme == Scheme::explicit_euler) {
        double dx = std::numeric_limits<double>::infinity();
        const auto& x = mu.x();
        for (std::size_t i = 0; i + 1 < x.size(); ++i) dx = std::min(dx, x[i + 1] - x[i]);
        double cap = std::min(0.4 * dx * dx, 0.95 * explicit_stable_dt(mu));
        dt = dt > 0.0 ? std::min(dt, cap) : cap;
    } else if (!(dt > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "implicit scheme needs dt > 0");
    }
    tr.dt = dt;

    std::vector<double> flux(op.g.size());
    double t = 0.0;
    std::size_t k = 0;
    for (double target : ts) {
        if (target < 0.0) throw Error(ErrorCode::TimeOutOfRange, "negative sample time");
        while (t < target) {
            double step = dt;
            if (cfg.scheme == Scheme::implicit_euler)
                step = std::min(cfg.dt_cap, cfg.dt * std::pow(cfg.dt_growth, double(k)));
            bool last = t + step >= target * (1.0 - 1e-14);
            if (last) step = target - t;
            if (step > 0.0) {
                if (cfg.scheme == Scheme::explicit_euler)
                    explicit_step(op, h, flux, step);
                else
                    implicit_step(op, h, step);
            }
            t = last ? target : t + step;
            ++k;
        }
        record(tr, mu, op, h, target, mass0, cfg.keep_snapshots);
    }
    tr.steps = k;
    return tr;
}

GridFunction dirac_initial(const Measure1D& mu, double x0, double width) {
    const auto& x = mu.x();
    if (x0 < x.front() || x0 > x.back()) throw Error(ErrorCode::OutOfDomain, "x0 outside the grid");
    if (!(width > 0.0)) {
        std::size_t c = mu.locate(x0);
        width = 2.0 * (x[c + 1] - x[c]);
    }
    const auto& rho = mu.rho();
    const auto& m = mu.node_mass();
    std::vector<double> h(x.size());
    NeumaierSum s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double z = (x[i] - x0) / width;
        h[i] = rho[i] > 0.0 ? std::exp(-0.5 * z * z) / rho[i] : 0.0;
        s.add(m[i] * h[i]);
    }
    for (double& v : h) v /= s.value();
    return GridFunction(mu.grid(), std::move(h));
}

GridFunction two_level_initial(const Measure1D& mu, double threshold, double lo, double hi) {
    if (lo < 0.0 || hi < 0.0) throw Error(ErrorCode::NegativeInput, "levels must be non-negative");
    const auto& x = mu.x();
    const auto& m = mu.node_mass();
    std::vector<double> h(x.size());
    NeumaierSum s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        h[i] = x[i] >= threshold ? hi : lo;
        s.add(m[i] * h[i]);
    }
    if (!(s.value() > 0.0)) throw Error(ErrorCode::InvalidArgument, "two-level density has no mass");
    for (double& v : h) v /= s.value();
    return GridFunction(mu.grid(), std::move(h));
}

double ou_transition_density(double x0, double t, double width, double u) {
    const double e = std::exp(-t);
    const double var = 0.5 * (1.0 - e * e) + width * width * e * e;
    const double d = u - x0 * e;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

double l1_distance(const Measure1D& mu, const std::vector<double>& h,
                   const std::function<double(double)>& q) {
    const auto& x = mu.x();
    const auto& rho = mu.rho();
    const auto& m = mu.node_mass();
    NeumaierSum s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (rho[i] <= 0.0) continue;
        s.add(m[i] * std::fabs(h[i] - q(x[i]) / rho[i]));
    }
    return s.value();
}

double explicit_term_doubleexp(double x, double t, double u) {
    if (u < 0.0) return 0.0;
    const double c = std::exp(-0.5 * t) / std::sqrt(2.0 * M_PI * t);
    const double d = x - u;
    return c * std::exp(x + u - d * d / (2.0 * t)) * -std::expm1(-2.0 * x * u / t);
}

double remainder_bound_doubleexp(double x, double t) {
    if (!(x > 0.0) || !(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "x and t must be positive");
    auto hit = [x](double T) {
        if (T <= 0.0) return 0.0;
        return x * std::exp(-x * x / (2.0 * T)) / std::sqrt(2.0 * M_PI * T * T * T);
    };
    // T = t - w^2 removes the (t - T)^{-1/2} singularity
    const double a = integrate([&](double w) { return 2.0 * hit(t - w * w); }, 0.0, std::sqrt(t),
                               1e-10)
                         .value *
                     std::sqrt(2.0 / M_PI) * std::exp(0.5 * t);
    const double b =
        integrate([&](double T) { return hit(T) * 2.0 * std::exp(t - T); }, 0.0, t, 1e-10).value;
    return 0.5 * std::exp(-0.5 * t) * (a + b);
}

ExplicitDensity explicit_density_doubleexp(double x, double t,
                                           std::shared_ptr<const std::vector<double>> u_grid) {
    if (!(x > 0.0) || !(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "x and t must be positive");
    std::vector<double> v;
    v.reserve(u_grid->size());
    for (double u : *u_grid) v.push_back(explicit_term_doubleexp(x, t, u));
    return {GridFunction(std::move(u_grid), std::move(v)), remainder_bound_doubleexp(x, t)};
}

EmTrace euler_maruyama(const EmConfig& cfg) {
    if (!cfg.mu) throw Error(ErrorCode::InvalidArgument, "Monte Carlo config has no measure");
    const Measure1D& mu = *cfg.mu;
    const Potential& pot = mu.potential();
    if (!pot.dphi) throw Error(ErrorCode::DerivativeMissing, "drift needs Phi'");
    if (cfg.n_paths < 2 || !(cfg.dt > 0.0) || cfg.bins < 1)
        throw Error(ErrorCode::InvalidArgument, "bad Monte Carlo parameters");
    const double a = mu.xmin(), b = mu.xmax();
    EmTrace out;
    out.n_paths = cfg.n_paths;
    out.seed = cfg.seed;
    out.bin_edges.push_back(a);
    for (std::size_t k = 1; k < cfg.bins; ++k) out.bin_edges.push_back(mu.quantile(double(k) / cfg.bins));
    out.bin_edges.push_back(b);

    std::vector<double> ts = cfg.sample_times;
    if (ts.empty()) ts = {cfg.t_end};
    std::sort(ts.begin(), ts.end());

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> X(cfg.n_paths, cfg.x0);
    auto reflect = [a, b](double v) {
        const double L = b - a;
        double y = std::fmod(v - a, 2.0 * L);
        if (y < 0.0) y += 2.0 * L;
        return y <= L ? a + y : b - (y - L);
    };
    double t = 0.0;
    for (double target : ts) {
        while (t < target) {
            double step = std::min(cfg.dt, target - t);
            double sq = std::sqrt(step);
            for (double& x : X) x = reflect(x - 0.5 * pot.dphi(x) * step + sq * normal(rng));
            t = (target - t <= cfg.dt) ? target : t + step;
        }
        NeumaierSum s1;
        for (double x : X) s1.add(x);
        double m = s1.value() / double(X.size());
        NeumaierSum s2;
        for (double x : X) s2.add((x - m) * (x - m));
        std::vector<double> counts(cfg.bins, 0.0);
        for (double x : X) {
            auto it = std::upper_bound(out.bin_edges.begin() + 1, out.bin_edges.end() - 1, x);
            counts[std::size_t(it - (out.bin_edges.begin() + 1))] += 1.0;
        }
        NeumaierSum tv;
        for (double c : counts) tv.add(std::fabs(c / double(X.size()) - 1.0 / double(cfg.bins)));
        out.times.push_back(target);
        out.mean.push_back(m);
        out.variance.push_back(s2.value() / double(X.size() - 1));
        out.tv.push_back(tv.value());
    }
    return out;
}

std::vector<OverlayVerdict> overlay_bounds(const DecayTrace& trace,
                                           const std::vector<BoundCurve>& curves,
                                           double osc_sqrt_h, double t_from) {
    if (trace.times.empty()) throw Error(ErrorCode::InvalidArgument, "empty trace");
    const double ent0 = trace.entropy.front();
    std::vector<OverlayVerdict> out;
    for (const auto& c : curves) {
        OverlayVerdict v;
        v.name = c.name;
        v.prefactor = c.prefactor == Prefactor::osc2_sqrt_h ? osc_sqrt_h * osc_sqrt_h
                      : c.prefactor == Prefactor::entropy0  ? ent0
                                                             : 1.0;
        for (std::size_t i = 0; i < trace.times.size(); ++i) {
            const double t = trace.times[i];
            if (t < t_from || t < c.t_min || t > c.t_max) continue;
            const double bound = v.prefactor * c(t);
            const double e = trace.entropy[i];
            ++v.checked;
            double ratio = bound > 0.0 ? e / bound : (e > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            v.max_ratio = std::max(v.max_ratio, ratio);
            if (!c.free_constant && e > bound * (1.0 + 1e-9) + 1e-15) {
                ++v.violations;
                if (v.holds) v.first_violation = t;
                v.holds = false;
            }
        }
        if (c.free_constant) v.fitted_constant = v.max_ratio;
        out.push_back(v);
    }
    return out;
}

double measured_log_slope(const DecayTrace& trace, double t_from, double floor) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        if (trace.times[i] >= t_from && trace.entropy[i] > floor) {
            t.push_back(trace.times[i]);
            y.push_back(std::log(trace.entropy[i]));
        }
    if (t.size() < 2) throw Error(ErrorCode::InsufficientSamples, "need two samples above the floor");
    return fit_line(t, y).slope;
}

}  // namespace wfi
