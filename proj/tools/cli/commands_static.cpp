#include <cmath>
#include <ostream>
#include <sstream>

#include <wfi/capacity.hpp>
#include <wfi/conversions.hpp>
#include <wfi/error.hpp>
#include <wfi/hardy.hpp>
#include <wfi/numerics.hpp>
#include <wfi/verifier.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "manifest.hpp"

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

NecessaryKernel kernel_from(const json& cfg, const std::string& where) {
    const std::string k = get_string(cfg, "kernel", "half_mass", where);
    if (k == "half_mass") return NecessaryKernel::half_mass;
    if (k == "e_squared") return NecessaryKernel::e_squared;
    throw Error(ErrorCode::ConfigError, where + ".kernel: expected half_mass or e_squared");
}

void say(const Context& ctx, const std::string& line) {
    if (ctx.log) *ctx.log << line << "\n";
}

std::string rate_rows(const RateFunction& r, double lo, double hi, std::size_t n) {
    std::ostringstream os;
    for (auto [s, b] : sample_rate(r, lo, hi, n)) os << fmt(s) << "," << fmt(b) << "\n";
    return os.str();
}

}  // namespace

int cmd_measure(const Context& ctx) {
    const json& cfg = ctx.config;
    require_keys(cfg, {"measure", "tail_points"}, "config");
    auto [pot, spec] = measure_from_json(get_object(cfg, "measure", "config"), "config.measure");
    auto mu = Measure1D::build(pot, spec);
    RunManifest man = make_manifest(ctx);
    OutputDir out(ctx.out, man);

    json tails = json::array();
    if (cfg.contains("tail_points"))
        for (const auto& v : cfg.at("tail_points")) {
            if (!v.is_number()) throw Error(ErrorCode::ConfigError, "config.tail_points: expected numbers");
            double x = v.get<double>();
            tails.push_back({{"x", x}, {"right", tail_mass(mu, x, true)}, {"left", tail_mass(mu, x, false)}});
        }
    json summary = {{"potential", pot.tag()}, {"z", mu.z()},           {"log_z", mu.log_z()},
                    {"median", mu.median()},  {"xmin", mu.xmin()},     {"xmax", mu.xmax()},
                    {"nodes", mu.nodes()},    {"spacing", spec.spacing == Spacing::graded ? "graded" : "uniform"},
                    {"tails", tails}};
    out.write_json("measure.json", summary);
    std::ostringstream rows;
    const auto& x = mu.x();
    for (std::size_t i = 0; i < x.size(); ++i)
        rows << fmt(x[i]) << "," << fmt(mu.rho()[i]) << "," << fmt(mu.cdf(x[i])) << "\n";
    out.write_csv("density.csv", "x,density,cdf", rows.str());
    out.finish();
    say(ctx, "measure " + pot.tag() + ": Z = " + fmt(mu.z()) + ", median = " + fmt(mu.median()));
    return kExitOk;
}

int cmd_beta(const Context& ctx) {
    const json& cfg = ctx.config;
    require_keys(cfg, {"measure", "rate", "kernel", "fit_s_hi"}, "config");
    auto [pot, spec] = measure_from_json(get_object(cfg, "measure", "config"), "config.measure");
    auto mu = Measure1D::build(pot, spec);
    const auto kernel = kernel_from(cfg, "config");
    const double s_hi = get_number(cfg, "fit_s_hi", 1e-2, "config");
    auto xg = default_x_grid(mu);
    RateFunction cap = beta_from_capacity(mu, xg, kernel);
    RateFit fit = fit_rate_exponents(cap, s_hi);
    RateFunction shape = cfg.contains("rate") ? rate_from_config(cfg.at("rate"), "config.rate") : cap;
    HardyBounds hb = hardy_bounds(mu, shape, xg);
    bool poincare = false;
    try {
        poincare = detect_poincare(cap).poincare;
    } catch (const Error&) {
    }
    double bmin = INFINITY, bmax = 0.0;
    for (auto [s, b] : sample_rate(cap, 1e-6, 1e-1, 61)) {
        bmin = std::min(bmin, b);
        bmax = std::max(bmax, b);
    }
    const bool bounded = bmin > 0.0 && bmax / bmin <= 3.0;
    std::string summary = bounded    ? "bounded β (LSI regime)"
                          : poincare ? "unbounded β with Poincaré inequality"
                                     : "no Poincaré inequality";
    int code = kExitOk;
    json hj = {{"lower", hb.lower},     {"upper", hb.upper},   {"b_plus", hb.b_plus},
               {"b_minus", hb.b_minus}, {"B_plus", hb.B_plus}, {"B_minus", hb.B_minus},
               {"divergent", hb.divergent}};
    std::size_t violations = 0;
    if (std::isfinite(hb.upper)) {
        violations = check_necessary(mu, shape.scaled(hb.upper), xg, kernel).violations;
    } else {
        code = kExitPremise;
    }
    if (violations > 0) code = kExitPremise;

    RunManifest man = make_manifest(ctx);
    OutputDir out(ctx.out, man);
    json j = {{"summary", summary},
              {"fit", {{"p", fit.p}, {"q", fit.q}, {"log_c", fit.log_c}, {"rms", fit.rms}, {"samples", fit.samples}}},
              {"poincare", poincare},
              {"max_over_min", bmin > 0.0 ? bmax / bmin : INFINITY},
              {"hardy", hj},
              {"necessary_violations", violations},
              {"capacity_rate", rate_to_json(cap)},
              {"shape_rate", rate_to_json(shape)}};
    out.write_json("beta.json", j);
    std::ostringstream rows;
    for (auto [s, b] : sample_rate(cap, cap.table_s().front(), cap.s_max(), 121)) {
        double cert = std::isfinite(hb.upper) ? hb.upper * shape(s) : INFINITY;
        rows << fmt(s) << "," << fmt(b) << "," << fmt(cert) << "\n";
    }
    out.write_csv("beta_table.csv", "s,beta_capacity,beta_certified", rows.str());
    out.finish();
    say(ctx, pot.tag() + ": " + summary + "; p = " + fmt(fit.p) + ", q = " + fmt(fit.q) +
                 "; Hardy " + fmt(hb.lower) + " <= C <= " + fmt(hb.upper));
    return code;
}

int cmd_convert(const Context& ctx) {
    const json& cfg = ctx.config;
    require_keys(cfg, {"certificate", "target", "osc_v", "tensorize", "sample"}, "config");
    Certificate cert;
    try {
        json cj = get_object(cfg, "certificate", "config");
        cj.erase("manifest");
        cert = certificate_from_json(cj);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("config.certificate: ") + e.what());
    }
    if (cfg.contains("osc_v")) cert = perturb_bounded(cert, get_number(cfg, "osc_v", 0.0, "config"));
    if (cfg.contains("tensorize")) {
        std::size_t n = get_count(cfg, "tensorize", 1, "config");
        if (cert.kind != CertKind::WLSI)
            throw Error(ErrorCode::UnsupportedKind, "tensorization needs a WLSI certificate");
        cert.rate = tensorize(cert.rate, int(n));
        cert.provenance.push_back({"tensorize", {{"n", double(n)}}, ""});
    }
    const std::string target = get_string(cfg, "target", to_string(cert.kind), "config");
    Certificate res = target == to_string(cert.kind) ? cert
                                                     : convert(cert, cert_kind_from_string(target), ctx.constants);
    json sample = cfg.contains("sample") ? get_object(cfg, "sample", "config") : json::object();
    require_keys(sample, {"lo", "hi", "n"}, "config.sample");
    const bool spi = res.kind == CertKind::SPI;
    double lo = get_number(sample, "lo", spi ? 1.0 : 1e-8, "config.sample");
    double hi = get_number(sample, "hi", spi ? 1e6 : 0.5, "config.sample");
    std::size_t n = get_count(sample, "n", 81, "config.sample");
    if (res.kind == CertKind::GBI) hi = std::min(hi, 1.0);

    RunManifest man = make_manifest(ctx);
    OutputDir out(ctx.out, man);
    out.write_json("certificate.json", certificate_to_json(res));
    out.write_csv("rate.csv", spi ? "t,beta" : "s,beta", rate_rows(res.rate, lo, hi, n));
    out.finish();
    say(ctx, std::string("converted to ") + to_string(res.kind) +
                 (res.premise_ok ? "" : " (premise not certified)"));
    return res.premise_ok ? kExitOk : kExitPremise;
}

int cmd_capacity(const Context& ctx) {
    const json& cfg = ctx.config;
    require_keys(cfg, {"measure", "rate", "kernel", "per_side", "mass_lo"}, "config");
    auto [pot, spec] = measure_from_json(get_object(cfg, "measure", "config"), "config.measure");
    auto mu = Measure1D::build(pot, spec);
    const auto kernel = kernel_from(cfg, "config");
    auto xg = default_x_grid(mu, get_count(cfg, "per_side", 400, "config"), 0.49,
                             get_number(cfg, "mass_lo", 1e-9, "config"));
    RateFunction beta = cfg.contains("rate") ? rate_from_config(cfg.at("rate"), "config.rate")
                                             : beta_from_capacity(mu, xg, kernel);
    CapacityProfile prof = check_necessary(mu, beta, xg, kernel);
    RunManifest man = make_manifest(ctx);
    OutputDir out(ctx.out, man);
    std::ostringstream rows;
    for (const auto& r : prof.rows)
        rows << fmt(r.x) << "," << fmt(r.mass) << "," << fmt(r.cap) << "," << fmt(r.s_star) << ","
             << fmt(r.lhs) << "," << fmt(r.ratio) << "\n";
    out.write_csv("capacity.csv", "x,mass,cap,s_star,lhs,ratio", rows.str());
    out.write_json("capacity.json", {{"violations", prof.violations}, {"max_ratio", prof.max_ratio},
                                     {"rate", rate_to_json(beta)}});
    out.finish();
    say(ctx, "necessary condition: " + std::to_string(prof.violations) + " violations, max ratio " +
                 fmt(prof.max_ratio));
    return prof.violations == 0 ? kExitOk : kExitPremise;
}

int cmd_verify(const Context& ctx) {
    const json& cfg = ctx.config;
    require_keys(cfg, {"measure", "rate", "scale_by_hardy", "families", "s_grid"}, "config");
    auto [pot, spec] = measure_from_json(get_object(cfg, "measure", "config"), "config.measure");
    auto mu = Measure1D::build(pot, spec);
    RateFunction beta = rate_from_config(get_object(cfg, "rate", "config"), "config.rate");
    double scale = 1.0;
    if (get_bool(cfg, "scale_by_hardy", false, "config")) {
        scale = hardy_bounds(mu, beta).upper;
        if (!std::isfinite(scale)) throw Error(ErrorCode::Divergent, "Hardy upper bound is infinite");
        beta = beta.scaled(scale);
    }
    json sg = cfg.contains("s_grid") ? get_object(cfg, "s_grid", "config") : json::object();
    require_keys(sg, {"lo", "hi", "n"}, "config.s_grid");
    auto s_grid = logspace(get_number(sg, "lo", 1e-6, "config.s_grid"), get_number(sg, "hi", 1e-1, "config.s_grid"),
                           get_count(sg, "n", 26, "config.s_grid"));

    json fams = cfg.contains("families") ? get_object(cfg, "families", "config")
                                         : json{{"capacity_ramps", json::object()}, {"indicators_smoothed", json::object()}};
    require_keys(fams, {"capacity_ramps", "tilts", "indicators_smoothed", "random_piecewise"}, "config.families");
    FunctionFamily fam;
    auto merge = [&fam](const FunctionFamily& f) {
        for (std::size_t i = 0; i < f.size(); ++i) fam.add(f.members[i], f.ids[i]);
    };
    for (auto it = fams.begin(); it != fams.end(); ++it) {
        const std::string w = "config.families." + it.key();
        const json& o = it.value();
        if (it.key() == "capacity_ramps") {
            require_keys(o, {"levels"}, w);
            merge(FunctionFamily::capacity_ramps(mu, int(get_count(o, "levels", 25, w))));
        } else if (it.key() == "indicators_smoothed") {
            require_keys(o, {"levels", "width"}, w);
            merge(FunctionFamily::indicators_smoothed(mu, int(get_count(o, "levels", 20, w)),
                                                      get_number(o, "width", 0.5, w)));
        } else if (it.key() == "random_piecewise") {
            require_keys(o, {"n", "knots"}, w);
            merge(FunctionFamily::random_piecewise(mu, get_count(o, "n", 200, w), ctx.seed,
                                                   int(get_count(o, "knots", 8, w))));
        } else {
            require_keys(o, {"thetas", "clip"}, w);
            std::vector<double> th = o.value("thetas", std::vector<double>{0.25, 0.5, 0.75});
            merge(FunctionFamily::tilts(mu, th, get_number(o, "clip", 1e6, w)));
        }
    }
    EmpiricalBeta eb = empirical_beta(mu, fam, s_grid);
    std::vector<std::string> failed;
    double worst = INFINITY;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        auto m = check_wlsi(mu, fam.members[i], beta, s_grid);
        worst = std::min(worst, m.min_margin);
        if (!m.holds) failed.push_back(fam.ids[i]);
    }
    RunManifest man = make_manifest(ctx);
    OutputDir out(ctx.out, man);
    std::ostringstream rows;
    for (std::size_t k = 0; k < eb.s.size(); ++k)
        rows << fmt(eb.s[k]) << "," << fmt(eb.beta[k]) << "," << (eb.worst_id[k].empty() ? "-" : eb.worst_id[k]) << "\n";
    out.write_csv("verify.csv", "s,beta_emp,worst_f_id", rows.str());
    out.write_json("verify.json", {{"members", fam.size()},
                                   {"violations", failed},
                                   {"min_margin", worst},
                                   {"hardy_scale", scale},
                                   {"entropy_osc_ratio", probe_entropy_osc_ratio(mu, fam)}});
    out.finish();
    say(ctx, "checked " + std::to_string(fam.size()) + " functions: " + std::to_string(failed.size()) +
                 " violations");
    return failed.empty() ? kExitOk : kExitPremise;
}

}  // namespace wfi::cli
