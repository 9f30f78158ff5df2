#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <wfi/conversions.hpp>
#include <wfi/decay.hpp>
#include <wfi/error.hpp>
#include <wfi/hardy.hpp>
#include <wfi/numerics.hpp>
#include <wfi/semigroup.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "manifest.hpp"

#ifndef WFI_VERSION
#define WFI_VERSION "0.0.0"
#endif

namespace wfi::cli {

namespace {

RunManifest make_manifest(const Context& ctx) {
    RunManifest m;
    m.command = ctx.command;
    m.config = ctx.config;
    m.constants = ctx.constants;
    m.seed = ctx.seed;
    m.version = tool_version();
    m.seal();
    return m;
}

void say(const Context& ctx, const std::string& line) {
    if (ctx.log) *ctx.log << line << "\n";
}

/// Rate shape implied by the family: log(1/s)^{(2-a)/a} for subexp(a <= 2), constant otherwise.
RateFunction default_shape(const Potential& pot) {
    double a = pot.alpha;
    if (pot.family == Family::double_exp) a = 1.0;
    if (pot.family == Family::gaussian) a = 2.0;
    if (pot.family == Family::subexp || pot.family == Family::double_exp || pot.family == Family::gaussian) {
        if (a >= 2.0) return RateFunction::constant(1.0);
        return RateFunction::power(1.0, 0.0, (2.0 - a) / a);
    }
    if (pot.family == Family::heavy_tail) return RateFunction::power(1.0, 2.0 / pot.alpha, 0.0);
    throw Error(ErrorCode::ConfigError, "config.bounds.rate is required for this measure");
}

GridFunction initial_from(const json& j, const Measure1D& mu, double* x0, double* width) {
    const std::string w = "config.initial";
    require_keys(j, {"type", "x0", "width", "threshold", "lo", "hi"}, w);
    const std::string type = get_string(j, "type", "", w);
    if (type == "dirac") {
        *x0 = get_number(j, "x0", 0.0, w);
        *width = get_number(j, "width", 0.0, w);
        return dirac_initial(mu, *x0, *width);
    }
    if (type == "two_level")
        return two_level_initial(mu, get_number(j, "threshold", 0.0, w), get_number(j, "lo", 0.0, w),
                                 get_number(j, "hi", 1.0, w));
    if (type == "constant") return mu.constant(1.0);
    throw Error(ErrorCode::ConfigError, w + ".type: expected dirac, two_level or constant");
}

BoundCurve curve_from(const json& j, const ConstantsPolicy&, std::size_t idx) {
    const std::string w = "config.curves[" + std::to_string(idx) + "]";
    const std::string type = get_string(j, "type", "", w);
    if (type == "xi") {
        require_keys(j, {"type", "rate", "eps"}, w);
        return xi_from_beta(rate_from_config(get_object(j, "rate", w), w + ".rate"), get_number(j, "eps", 0.1, w));
    }
    if (type == "exponential") {
        require_keys(j, {"type", "A"}, w);
        return exponential_curve(get_number(j, "A", 1.0, w));
    }
    if (type == "lo") {
        require_keys(j, {"type", "alpha", "eps", "t_offset"}, w);
        return lo_decay_curve(get_number(j, "alpha", 2.0, w), get_number(j, "eps", 0.1, w),
                              get_number(j, "t_offset", 0.0, w));
    }
    if (type == "iterated") {
        require_keys(j, {"type", "rate", "eps_xi", "k", "eps"}, w);
        auto xi = xi_from_beta(rate_from_config(get_object(j, "rate", w), w + ".rate"), get_number(j, "eps_xi", 0.1, w));
        return iterated_decay_curve(xi, int(get_count(j, "k", 1, w)), get_number(j, "eps", 0.0, w));
    }
    throw Error(ErrorCode::ConfigError, w + ".type: expected xi, exponential, lo or iterated");
}

}  // namespace

const char* tool_version() { return WFI_VERSION; }

int cmd_simulate(const Context& ctx) {
    const json& cfg = ctx.config;
    require_keys(cfg, {"measure", "initial", "solver", "bounds", "oracle", "monte_carlo"}, "config");
    auto [pot, spec] = measure_from_json(get_object(cfg, "measure", "config"), "config.measure");
    auto mu = std::make_shared<const Measure1D>(Measure1D::build(pot, spec));
    double x0 = 0.0, width = 0.0;
    GridFunction h0 = initial_from(get_object(cfg, "initial", "config"), *mu, &x0, &width);

    const json& sj = get_object(cfg, "solver", "config");
    const std::string sw = "config.solver";
    require_keys(sj, {"t_end", "scheme", "dt", "dt_growth", "dt_cap", "n_samples", "t_first", "times"}, sw);
    SolverConfig sc;
    sc.mu = mu;
    sc.h0 = h0;
    sc.t_end = get_number(sj, "t_end", 1.0, sw);
    const std::string scheme = get_string(sj, "scheme", "explicit", sw);
    if (scheme == "implicit")
        sc.scheme = Scheme::implicit_euler;
    else if (scheme != "explicit")
        throw Error(ErrorCode::ConfigError, sw + ".scheme: expected explicit or implicit");
    sc.dt = get_number(sj, "dt", 0.0, sw);
    sc.dt_growth = get_number(sj, "dt_growth", 1.0, sw);
    sc.dt_cap = get_number(sj, "dt_cap", INFINITY, sw);
    sc.n_samples = get_count(sj, "n_samples", 60, sw);
    sc.t_first = get_number(sj, "t_first", 1e-3, sw);
    if (sj.contains("times")) sc.sample_times = sj.at("times").get<std::vector<double>>();
    const std::string oracle = get_string(cfg, "oracle", "", "config");
    if (!oracle.empty() && oracle != "ou") throw Error(ErrorCode::ConfigError, "config.oracle: expected \"ou\"");
    sc.keep_snapshots = oracle == "ou";
    DecayTrace tr = evolve(sc);

    double hmax = 0.0, hmin = INFINITY;
    for (double v : h0.values()) {
        hmax = std::max(hmax, v);
        hmin = std::min(hmin, v);
    }
    const double osc = std::sqrt(hmax) - std::sqrt(std::max(hmin, 0.0));

    std::vector<BoundCurve> curves;
    json notes = json::array();
    double t_from = 0.0;
    if (cfg.contains("bounds")) {
        const json& bj = get_object(cfg, "bounds", "config");
        const std::string bw = "config.bounds";
        require_keys(bj, {"eps", "rate", "t_from", "xi", "restricted_lsi"}, bw);
        t_from = get_number(bj, "t_from", 0.05, bw);
        RateFunction shape = bj.contains("rate") ? rate_from_config(bj.at("rate"), bw + ".rate") : default_shape(pot);
        HardyBounds hb = hardy_bounds(*mu, shape);
        if (std::isfinite(hb.upper)) {
            RateFunction beta = shape.scaled(hb.upper);
            if (get_bool(bj, "xi", true, bw)) curves.push_back(xi_from_beta(beta, get_number(bj, "eps", 0.1, bw)));
            double cp = poincare_upper_bound(*mu);
            if (get_bool(bj, "restricted_lsi", true, bw)) {
                if (std::isfinite(cp)) {
                    auto A = restricted_ls_constant(wlsi_to_swlsi(beta, ctx.constants), cp, std::sqrt(hmax));
                    curves.push_back(exponential_curve(A.A));
                } else {
                    notes.push_back("no finite Poincare bound; restricted-LSI curve skipped");
                }
            }
        } else {
            notes.push_back("Hardy upper bound infinite; certified curves skipped");
        }
        BoundCurve trivial;
        trivial.name = "initial_entropy";
        trivial.eval = [](double) { return 1.0; };
        trivial.prefactor = Prefactor::entropy0;
        curves.push_back(trivial);
    }
    auto verdicts = overlay_bounds(tr, curves, osc, t_from);

    RunManifest man = make_manifest(ctx);
    OutputDir out(ctx.out, man);
    std::ostringstream rows, mom, crv;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        rows << fmt(tr.times[i]) << "," << fmt(tr.entropy[i]) << "," << fmt(tr.variance[i]) << ","
             << fmt(tr.tv[i]) << "," << fmt(tr.fisher[i]) << "\n";
        mom << fmt(tr.times[i]) << "," << fmt(tr.mass[i]) << "," << fmt(tr.law_mean[i]) << ","
            << fmt(tr.law_variance[i]) << "," << fmt(tr.dirichlet_sqrt[i]) << "\n";
    }
    out.write_csv("trace.csv", "t,entropy,variance,tv,fisher", rows.str());
    out.write_csv("moments.csv", "t,mass,law_mean,law_variance,dirichlet_sqrt", mom.str());
    for (std::size_t c = 0; c < curves.size(); ++c)
        for (double t : tr.times)
            if (t >= curves[c].t_min && t <= curves[c].t_max)
                crv << fmt(t) << "," << fmt(verdicts[c].prefactor * curves[c](t)) << "," << curves[c].name << "\n";
    out.write_csv("curves.csv", "t,bound,name", crv.str());

    bool all_hold = true;
    json vj = json::array();
    for (std::size_t c = 0; c < verdicts.size(); ++c) {
        const auto& v = verdicts[c];
        all_hold = all_hold && v.holds;
        json params = curves[c].params;
        vj.push_back({{"name", v.name},
                      {"holds", v.holds},
                      {"checked", v.checked},
                      {"violations", v.violations},
                      {"first_violation", std::isnan(v.first_violation) ? json(nullptr) : json(v.first_violation)},
                      {"max_ratio", v.max_ratio},
                      {"prefactor", v.prefactor},
                      {"fitted_constant", std::isnan(v.fitted_constant) ? json(nullptr) : json(v.fitted_constant)},
                      {"params", params}});
    }
    json summary = {{"verdict", curves.empty() ? "no bounds requested" : all_hold ? "all bounds hold" : "bound violations"},
                    {"curves", vj},
                    {"notes", notes},
                    {"steps", tr.steps},
                    {"dt", tr.dt},
                    {"scheme", to_string(tr.scheme)},
                    {"osc_sqrt_h", osc},
                    {"entropy_final", tr.entropy.back()}};
    if (oracle == "ou") {
        const double t = tr.times.back();
        double l1 = l1_distance(*mu, tr.snapshots.back(),
                                [&](double u) { return ou_transition_density(x0, t, width, u); });
        summary["ou"] = {{"t", t},
                         {"mean", tr.law_mean.back()},
                         {"mean_expected", x0 * std::exp(-t)},
                         {"variance", tr.law_variance.back()},
                         {"variance_expected", 0.5 * (1.0 - std::exp(-2.0 * t))},
                         {"l1", l1}};
    }
    if (cfg.contains("monte_carlo")) {
        const json& mj = get_object(cfg, "monte_carlo", "config");
        const std::string mw = "config.monte_carlo";
        require_keys(mj, {"n_paths", "dt", "bins", "x0", "times"}, mw);
        EmConfig ec;
        ec.mu = mu;
        ec.x0 = get_number(mj, "x0", x0, mw);
        ec.t_end = sc.t_end;
        ec.dt = get_number(mj, "dt", 1e-3, mw);
        ec.n_paths = get_count(mj, "n_paths", 10000, mw);
        ec.bins = get_count(mj, "bins", 128, mw);
        ec.seed = ctx.seed;
        if (mj.contains("times")) ec.sample_times = mj.at("times").get<std::vector<double>>();
        EmTrace em = euler_maruyama(ec);
        std::ostringstream mc;
        for (std::size_t i = 0; i < em.times.size(); ++i)
            mc << fmt(em.times[i]) << "," << fmt(em.mean[i]) << "," << fmt(em.variance[i]) << "," << fmt(em.tv[i]) << "\n";
        out.write_csv("monte_carlo.csv", "t,mean,variance,tv", mc.str());
        summary["monte_carlo"] = {{"n_paths", em.n_paths}, {"seed", em.seed}, {"bins", ec.bins}, {"dt", ec.dt}};
    }
    out.write_json("verdicts.json", summary);
    out.finish();
    say(ctx, summary["verdict"].get<std::string>() + "; final entropy " + fmt(tr.entropy.back()));
    return all_hold ? kExitOk : kExitPremise;
}

int cmd_bounds(const Context& ctx) {
    const json& cfg = ctx.config;
    require_keys(cfg, {"t_min", "t_max", "n", "curves", "l2_membership", "entropy_split"}, "config");
    const double t_min = get_number(cfg, "t_min", 0.0, "config");
    const double t_max = get_number(cfg, "t_max", 10.0, "config");
    const std::size_t n = get_count(cfg, "n", 101, "config");
    std::vector<BoundCurve> curves;
    if (cfg.contains("curves")) {
        if (!cfg.at("curves").is_array()) throw Error(ErrorCode::ConfigError, "config.curves: expected an array");
        std::size_t i = 0;
        for (const auto& c : cfg.at("curves")) curves.push_back(curve_from(c, ctx.constants, i++));
    }
    RunManifest man = make_manifest(ctx);
    OutputDir out(ctx.out, man);
    std::ostringstream rows;
    for (const auto& c : curves)
        for (double t : linspace(t_min, t_max, n))
            if (t >= c.t_min && t <= c.t_max) rows << fmt(t) << "," << fmt(c(t)) << "," << c.name << "\n";
    out.write_csv("bounds.csv", "t,bound,name", rows.str());
    json summary = json::object();
    int code = kExitOk;
    if (cfg.contains("l2_membership")) {
        const json& lj = get_object(cfg, "l2_membership", "config");
        require_keys(lj, {"lambdas", "t"}, "config.l2_membership");
        const double t = get_number(lj, "t", 1.0, "config.l2_membership");
        std::ostringstream l2;
        json arr = json::array();
        for (double lam : lj.value("lambdas", std::vector<double>{0.5, 1.0, 1.5})) {
            auto r = l2_membership(lam, t);
            l2 << fmt(lam) << "," << fmt(t) << "," << (r.finite ? "finite" : "infinite") << "," << fmt(r.tail_exponent) << "\n";
            arr.push_back({{"lambda", lam}, {"finite", r.finite}, {"tail_exponent", r.tail_exponent}});
        }
        out.write_csv("l2_membership.csv", "lambda,t,status,tail_exponent", l2.str());
        summary["l2_membership"] = arr;
    }
    if (cfg.contains("entropy_split")) {
        json arr = json::array();
        for (const auto& e : cfg.at("entropy_split")) {
            require_keys(e, {"H", "K", "c"}, "config.entropy_split");
            double H = get_number(e, "H", 0.0, "config.entropy_split"), K = get_number(e, "K", M_E * M_E, "config.entropy_split"),
                   c = get_number(e, "c", 1.0, "config.entropy_split");
            try {
                arr.push_back({{"H", H}, {"K", K}, {"c", c}, {"bound", entropy_split_bound(H, K, c)}});
            } catch (const Error& err) {
                if (err.code() != ErrorCode::PremiseViolated) throw;
                arr.push_back({{"H", H}, {"K", K}, {"c", c}, {"premise", err.what()}});
                code = kExitPremise;
            }
        }
        summary["entropy_split"] = arr;
    }
    json cj = json::array();
    for (const auto& c : curves)
        cj.push_back({{"name", c.name}, {"params", c.params}, {"prefactor", to_string(c.prefactor)},
                      {"free_constant", c.free_constant}, {"non_increasing", c.non_increasing()}});
    summary["curves"] = cj;
    out.write_json("bounds.json", summary);
    out.finish();
    say(ctx, std::to_string(curves.size()) + " curves written");
    return code;
}

int cmd_report(const Context& ctx) {
    namespace fs = std::filesystem;
    std::vector<fs::path> dirs;
    if (ctx.config.contains("dirs")) {
        require_keys(ctx.config, {"dirs"}, "config");
        for (const auto& d : ctx.config.at("dirs")) dirs.emplace_back(d.get<std::string>());
    } else {
        require_keys(ctx.config, {}, "config");
        if (fs::exists(ctx.out / "manifest.json")) dirs.push_back(ctx.out);
        if (fs::is_directory(ctx.out))
            for (const auto& e : fs::directory_iterator(ctx.out))
                if (e.is_directory() && fs::exists(e.path() / "manifest.json")) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    json runs = json::array();
    std::ostringstream md;
    md << "| run | command | digest | outputs |\n|---|---|---|---|\n";
    for (const auto& d : dirs) {
        json m = load_json(d / "manifest.json");
        runs.push_back({{"dir", d.string()}, {"manifest", m}});
        md << "| " << d.filename().string() << " | " << m.value("command", "?") << " | "
           << m.value("config_digest", "?").substr(0, 12) << " | " << m.value("outputs", json::array()).size() << " |\n";
    }
    fs::create_directories(ctx.out);
    std::ofstream(ctx.out / "report.json", std::ios::binary) << json{{"runs", runs}}.dump(2) << "\n";
    std::ofstream(ctx.out / "report.md", std::ios::binary) << md.str();
    say(ctx, std::to_string(dirs.size()) + " runs summarized");
    return kExitOk;
}

int run(const Context& ctx) {
    if (ctx.command == "measure") return cmd_measure(ctx);
    if (ctx.command == "beta") return cmd_beta(ctx);
    if (ctx.command == "convert") return cmd_convert(ctx);
    if (ctx.command == "verify") return cmd_verify(ctx);
    if (ctx.command == "capacity") return cmd_capacity(ctx);
    if (ctx.command == "simulate") return cmd_simulate(ctx);
    if (ctx.command == "bounds") return cmd_bounds(ctx);
    if (ctx.command == "report") return cmd_report(ctx);
    throw Error(ErrorCode::ConfigError, "unknown command " + ctx.command);
}

}  // namespace wfi::cli
