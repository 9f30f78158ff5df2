#include "wfi/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

double smoothstep(double t) {
    t = clamp01(t);
    return t * t * (3.0 - 2.0 * t);
}

struct Stats {
    double ent2 = 0.0;
    double osc2 = 0.0;
    double dir = 0.0;
};

Stats stats(const Measure1D& mu, const GridFunction& f) {
    auto f2 = f.map([](double v) { return v * v; });
    double o = oscillation(mu, f);
    return {entropy(mu, f2), o * o, dirichlet(mu, f)};
}

}  // namespace

const char* to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::capacity_ramps: return "capacity_ramps";
        case FamilyKind::tilts: return "tilts";
        case FamilyKind::indicators_smoothed: return "indicators_smoothed";
        case FamilyKind::random_piecewise: return "random_piecewise";
        case FamilyKind::custom: return "custom";
    }
    return "custom";
}

void FunctionFamily::add(GridFunction f, std::string id) {
    members.push_back(std::move(f));
    ids.push_back(std::move(id));
}

FunctionFamily FunctionFamily::capacity_ramps(const Measure1D& mu, int levels) {
    FunctionFamily fam;
    fam.kind = FamilyKind::capacity_ramps;
    for (int k = 1; k <= levels; ++k) {
        const double m0 = std::ldexp(1.0, -k), m1 = std::ldexp(1.0, -k - 1);
        try {
            double a = mu.right_quantile(m0), b = mu.right_quantile(m1);
            if (b - a > 1e-12)
                fam.add(mu.sample([a, b](double x) { return clamp01((x - a) / (b - a)); }),
                        "ramp_right_" + std::to_string(k));
        } catch (const Error&) {
        }
        try {
            double a = mu.left_quantile(m0), b = mu.left_quantile(m1);
            if (a - b > 1e-12)
                fam.add(mu.sample([a, b](double x) { return clamp01((a - x) / (a - b)); }),
                        "ramp_left_" + std::to_string(k));
        } catch (const Error&) {
        }
    }
    return fam;
}

FunctionFamily FunctionFamily::tilts(const Measure1D& mu, const std::vector<double>& thetas,
                                     double clip) {
    FunctionFamily fam;
    fam.kind = FamilyKind::tilts;
    const Potential& pot = mu.potential();
    const double lc = std::log(clip);
    for (double th : thetas) {
        fam.add(mu.sample([&pot, th, lc](double x) { return std::exp(std::min(th * pot(x) / 4.0, lc)); }),
                "tilt_" + std::to_string(th));
    }
    return fam;
}

FunctionFamily FunctionFamily::indicators_smoothed(const Measure1D& mu, int levels, double width) {
    FunctionFamily fam;
    fam.kind = FamilyKind::indicators_smoothed;
    for (int k = 1; k <= levels; ++k) {
        const double m = std::ldexp(1.0, -k);
        try {
            double c = mu.right_quantile(m);
            fam.add(mu.sample([c, width](double x) { return smoothstep((x - c) / width + 0.5); }),
                    "ind_right_" + std::to_string(k));
        } catch (const Error&) {
        }
        try {
            double c = mu.left_quantile(m);
            fam.add(mu.sample([c, width](double x) { return smoothstep((c - x) / width + 0.5); }),
                    "ind_left_" + std::to_string(k));
        } catch (const Error&) {
        }
    }
    return fam;
}

FunctionFamily FunctionFamily::random_piecewise(const Measure1D& mu, std::size_t n,
                                                std::uint64_t seed, int knots) {
    if (knots < 2) throw Error(ErrorCode::InvalidArgument, "need at least two knots");
    FunctionFamily fam;
    fam.kind = FamilyKind::random_piecewise;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> kx, kv;
        for (int i = 0; i < knots; ++i) kx.push_back(mu.quantile(1e-4 + (1.0 - 2e-4) * unif(rng)));
        std::sort(kx.begin(), kx.end());
        for (int i = 0; i < knots; ++i) kv.push_back(unif(rng));
        fam.add(mu.sample([kx, kv](double x) {
                    if (x <= kx.front()) return kv.front();
                    if (x >= kx.back()) return kv.back();
                    auto it = std::upper_bound(kx.begin(), kx.end(), x);
                    std::size_t i = std::size_t(it - kx.begin()) - 1;
                    double w = kx[i + 1] - kx[i];
                    return w > 0.0 ? kv[i] + (kv[i + 1] - kv[i]) * (x - kx[i]) / w : kv[i + 1];
                }),
                "random_" + std::to_string(j));
    }
    return fam;
}

WlsiMargin check_wlsi(const Measure1D& mu, const GridFunction& f, const RateFunction& beta,
                      const std::vector<double>& s_grid) {
    const Stats st = stats(mu, f);
    const double scale = std::max({st.ent2, st.osc2, 1e-300});
    WlsiMargin r;
    r.min_margin = std::numeric_limits<double>::infinity();
    for (double s : s_grid) {
        double rhs = beta(s) * st.dir + s * st.osc2;
        r.s.push_back(s);
        r.lhs.push_back(st.ent2);
        r.rhs.push_back(rhs);
        r.margin.push_back(rhs - st.ent2);
        r.min_margin = std::min(r.min_margin, rhs - st.ent2);
    }
    r.holds = s_grid.empty() || r.min_margin >= -1e-10 * scale;
    return r;
}

EmpiricalBeta empirical_beta(const Measure1D& mu, const FunctionFamily& family,
                             const std::vector<double>& s_grid) {
    if (s_grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two s values");
    if (family.size() > 10000) throw Error(ErrorCode::InvalidArgument, "family larger than 1e4");
    EmpiricalBeta out;
    out.s = s_grid;
    std::sort(out.s.begin(), out.s.end());
    out.beta.assign(out.s.size(), 0.0);
    out.worst_id.assign(out.s.size(), "");
    bool any_excess = false, any_energy = false;
    for (std::size_t j = 0; j < family.size(); ++j) {
        const Stats st = stats(mu, family.members[j]);
        const bool energetic = st.dir >= 1e-14;
        any_energy = any_energy || energetic;
        for (std::size_t k = 0; k < out.s.size(); ++k) {
            double excess = st.ent2 - out.s[k] * st.osc2;
            if (excess <= 0.0) continue;
            any_excess = true;
            if (!energetic) continue;
            double b = excess / st.dir;
            if (b > out.beta[k]) {
                out.beta[k] = b;
                out.worst_id[k] = family.ids[j];
            }
        }
    }
    if (any_excess && !any_energy)
        throw Error(ErrorCode::DegenerateFamily, "every member has Dirichlet energy below 1e-14");
    out.rate = RateFunction::table(out.s, out.beta);
    return out;
}

double gbi_quotient(const Measure1D& mu, const GridFunction& f, const RateFunction& T, double p) {
    const auto& m = mu.node_mass();
    NeumaierSum s2, sp;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double a = std::fabs(f[i]);
        s2.add(m[i] * a * a);
        sp.add(m[i] * std::pow(a, p));
    }
    double num = s2.value() - std::pow(sp.value(), 2.0 / p);
    return num / T(2.0 - p);
}

GbiMargin check_gbi(const Measure1D& mu, const GridFunction& f, const RateFunction& T) {
    GbiMargin r;
    r.dirichlet = dirichlet(mu, f);
    const int n = 64;
    auto eval = [&](double p) { return gbi_quotient(mu, f, T, p); };
    std::vector<double> ps;
    for (int k = 1; k <= n; ++k) ps.push_back(1.0 + double(k) / (n + 1));
    std::size_t best = 0;
    r.sup = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ps.size(); ++k) {
        double v = eval(ps[k]);
        if (v > r.sup) {
            r.sup = v;
            best = k;
        }
    }
    r.p_star = ps[best];
    double lo = best > 0 ? ps[best - 1] : 1.0, hi = best + 1 < ps.size() ? ps[best + 1] : 2.0;
    for (int k = 1; k <= n; ++k) {
        double p = lo + (hi - lo) * double(k) / (n + 1);
        double v = eval(p);
        if (v > r.sup) {
            r.sup = v;
            r.p_star = p;
        }
    }
    r.margin = r.dirichlet - r.sup;
    NeumaierSum f2;
    for (std::size_t i = 0; i < f.size(); ++i) f2.add(mu.node_mass()[i] * f[i] * f[i]);
    r.holds = r.margin >= -1e-10 * std::max({r.dirichlet, f2.value(), 1e-300});
    return r;
}

double probe_entropy_osc_ratio(const Measure1D& mu, const FunctionFamily& family) {
    double best = 0.0;
    bool any = false;
    for (const auto& f : family.members) {
        double o = oscillation(mu, f);
        if (o <= 0.0) continue;
        any = true;
        auto f2 = f.map([](double v) { return v * v; });
        best = std::max(best, entropy(mu, f2) / (o * o));
    }
    if (!any) throw Error(ErrorCode::DegenerateFamily, "every member is constant");
    return best;
}

}  // namespace wfi
