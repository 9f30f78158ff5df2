#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <wfi/capacity.hpp>
#include <wfi/conversions.hpp>
#include <wfi/decay.hpp>
#include <wfi/hardy.hpp>
#include <wfi/numerics.hpp>
#include <wfi/semigroup.hpp>

#include "property_suite.hpp"

#ifdef WFI_HAVE_CLI
#include "commands.hpp"
#include "config.hpp"
#endif

using namespace wfi;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[FAILED " << what << "] ";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int prec = 4) {
    std::ostringstream o;
    o.precision(prec);
    o << v;
    return o.str();
}

struct Case {
    std::string label;
    Potential pot;
    double alpha;
    bool heavy;
};

std::vector<Case> measures() {
    return {{"heavy_tail(1)", Potential::heavy_tail(1.0), 1.0, true},
            {"heavy_tail(2)", Potential::heavy_tail(2.0), 2.0, true},
            {"subexp(1)", Potential::subexp(1.0), 1.0, false},
            {"subexp(1.5)", Potential::subexp(1.5), 1.5, false},
            {"subexp(2)", Potential::subexp(2.0), 2.0, false}};
}

void rate_exponents(Outcome& o) {
    for (const auto& c : measures()) {
        auto t0 = Clock::now();
        auto mu = Measure1D::build(c.pot, auto_grid(c.pot));
        auto beta = beta_from_capacity(mu);
        if (c.heavy) {
            auto f = fit_rate_exponents(beta);
            o.detail << c.label << " p=" << num(f.p) << " ";
            o.require(std::fabs(f.p - 2.0 / c.alpha) <= 0.15, c.label + " p");
        } else if (c.alpha < 2.0) {
            auto f = fit_rate_exponents(beta);
            o.detail << c.label << " p=" << num(f.p) << " q=" << num(f.q) << " ";
            o.require(std::fabs(f.p) <= 0.1, c.label + " p");
            o.require(std::fabs(f.q - (2.0 - c.alpha) / c.alpha) <= 0.2, c.label + " q");
        } else {
            double lo = INFINITY, hi = 0.0;
            for (double s : logspace(1e-6, 1e-1, 60)) {
                lo = std::min(lo, beta(s));
                hi = std::max(hi, beta(s));
            }
            o.detail << c.label << " max/min=" << num(hi / lo) << " ";
            o.require(hi / lo <= 3.0, c.label + " bounded");
        }
        double dt = seconds_since(t0);
        o.require(dt <= 30.0, c.label + " runtime " + num(dt));
    }
}

void hardy_sandwich(Outcome& o) {
    auto t0 = Clock::now();
    for (const auto& c : measures()) {
        auto mu = Measure1D::build(c.pot, auto_grid(c.pot));
        auto beta = beta_from_capacity(mu);
        auto hb = hardy_bounds(mu, beta);
        bool finite = std::isfinite(hb.lower) && std::isfinite(hb.upper);
        o.require(finite && hb.lower <= hb.upper, c.label + " lower <= upper");
        std::size_t viol = 0;
        if (finite) viol = check_necessary(mu, beta.scaled(hb.upper), default_x_grid(mu)).violations;
        o.require(viol == 0, c.label + " necessary violations " + std::to_string(viol));
        o.detail << c.label << " [" << num(hb.lower) << ", " << num(hb.upper) << "] ";
    }
    double dt = seconds_since(t0);
    o.require(dt <= 10.0, "runtime " + num(dt));
}

void conversion_identities(Outcome& o) {
    const double b0 = 3.0;
    auto k = RateFunction::constant(b0);
    double spi = wlsi_to_spi(k).rate(2.0 * std::exp(2.0));
    o.require(std::fabs(spi - b0) <= 1e-12, "spi " + num(spi, 17));

    auto b = RateFunction::power(2.0, 0.3, 1.0);
    Certificate c;
    c.rate = b;
    auto p = perturb_bounded(c, 0.0).rate;
    auto t = tensorize(b, 1);
    double worst = 0.0;
    for (double s : logspace(1e-9, 0.3, 50)) {
        worst = std::max(worst, std::fabs(p(s) - b(s)) / b(s));
        worst = std::max(worst, std::fabs(t(s) - b(s)) / b(s));
    }
    o.require(worst <= 1e-12, "identities " + num(worst));

    auto A = restricted_ls_constant(RateFunction::power(1.0, 0.5, 0.0), 1.0, 1.0);
    o.require(std::fabs(A.A - 2.270) <= 1e-3, "A " + num(A.A, 8));
    o.detail << "spi=" << num(spi, 15) << " A=" << num(A.A, 8) << " ";
}

void poincare_detection(Outcome& o) {
    auto lin = RateFunction::power(3.0, 0.0, 1.0);
    auto mu1 = Measure1D::build(Potential::subexp(1.0), auto_grid(Potential::subexp(1.0)));
    auto muh = Measure1D::build(Potential::heavy_tail(1.0), auto_grid(Potential::heavy_tail(1.0)));
    o.require(detect_poincare(lin).poincare, "c log(1/s)");
    o.require(detect_poincare(beta_from_capacity(mu1)).poincare, "subexp(1)");
    o.require(!detect_poincare(RateFunction::power(1.0, 0.0, 1.5)).poincare, "log^1.5");
    o.require(!detect_poincare(beta_from_capacity(muh)).poincare, "heavy_tail(1)");
}

void ou_benchmark(Outcome& o) {
    auto t0 = Clock::now();
    auto V = Potential::subexp(2.0).scaled(0.5);
    auto mu = std::make_shared<const Measure1D>(stationary_measure(V, auto_grid(V.scaled(2.0), 2048)));
    const double t = std::log(2.0);
    SolverConfig c;
    c.mu = mu;
    c.h0 = dirac_initial(*mu, 1.0, 0.05);
    c.t_end = t;
    c.sample_times = {0.0, t};
    c.keep_snapshots = true;
    auto tr = evolve(c);
    double m = tr.law_mean.back(), v = tr.law_variance.back();
    double l1 = l1_distance(*mu, tr.snapshots.back(), [&](double u) { return ou_transition_density(1.0, t, 0.05, u); });
    o.require(std::fabs(m - 0.5) <= 0.005, "mean");
    o.require(std::fabs(v - 0.375) <= 0.005, "variance");
    o.require(l1 <= 2e-3, "L1");
    double dt = seconds_since(t0);
    o.require(dt <= 60.0, "runtime");
    o.detail << "mean=" << num(m, 6) << " var=" << num(v, 6) << " L1=" << num(l1, 3) << " ";
}

struct SubexpRun {
    std::shared_ptr<const Measure1D> mu;
    RateFunction beta;
    double cp = 0.0;
    DecayTrace trace;
};

SubexpRun subexp_run(double alpha) {
    SubexpRun r;
    auto p = Potential::subexp(alpha, true);
    r.mu = std::make_shared<const Measure1D>(Measure1D::build(p, auto_grid(p, 2048)));
    auto shape = RateFunction::power(1.0, 0.0, (2.0 - alpha) / alpha);
    r.beta = shape.scaled(hardy_bounds(*r.mu, shape).upper);
    r.cp = poincare_upper_bound(*r.mu);
    SolverConfig c;
    c.mu = r.mu;
    c.h0 = two_level_initial(*r.mu, 0.0, 0.0, 1.0);
    c.t_end = 50.0 * r.cp;
    c.scheme = Scheme::implicit_euler;
    c.dt = 1e-4;
    c.dt_growth = 1.01;
    c.dt_cap = 0.02;
    c.n_samples = 80;
    c.t_first = 0.01;
    r.trace = evolve(c);
    return r;
}

void decay_bounds_hold(Outcome& o) {
    auto r = subexp_run(1.5);
    o.require(std::isfinite(r.beta(1e-3)) && std::isfinite(r.cp), "certified inputs finite");
    if (!o.pass) return;
    const double hmax = 2.0;
    auto A = restricted_ls_constant(wlsi_to_swlsi(r.beta), r.cp, std::sqrt(hmax));
    auto v = overlay_bounds(r.trace, {xi_from_beta(r.beta, 0.1), exponential_curve(A.A)}, std::sqrt(hmax), 0.05);
    for (const auto& x : v) {
        o.require(x.holds && x.checked > 0, x.name + " violations " + std::to_string(x.violations));
        o.detail << x.name << ": " << x.checked << " samples, max ratio " << num(x.max_ratio) << " ";
    }
}

void stretched_regime(Outcome& o) {
    for (double alpha : {1.0, 1.5}) {
        auto r = subexp_run(alpha);
        std::vector<double> ts, ys;
        for (std::size_t i = 0; i < r.trace.times.size(); ++i)
            if (r.trace.times[i] >= 0.05 && r.trace.entropy[i] > 1e-12) {
                ts.push_back(r.trace.times[i]);
                ys.push_back(r.trace.entropy[i]);
            }
        auto f = fit_stretched_exponential(ts, ys);
        o.require(f.gamma >= alpha / 2.0 - 0.15 && f.gamma <= 1.0, "alpha " + num(alpha) + " gamma " + num(f.gamma));
        o.detail << "subexp(" << alpha << ") gamma=" << num(f.gamma) << " ";
    }
}

void l2_threshold(Outcome& o) {
    for (double l : {1.2, 1.5, 2.0}) o.require(l2_membership(l, 1.0).finite, "lambda " + num(l));
    for (double l : {0.5, 0.8, 1.0}) o.require(!l2_membership(l, 1.0).finite, "lambda " + num(l));
}

void property_suites(Outcome& o) {
    std::vector<props::Result> all = {props::popoviciu(1), props::variance_below_entropy(2), props::tail_bound(3)};
    for (auto& r : props::trace_properties(4)) all.push_back(r);
    all.push_back(props::conversions_monotone(5));
    for (const auto& r : all) {
        o.require(r.ok(), r.name + " " + std::to_string(r.failures) + "/" + std::to_string(r.cases) + " " + r.first_failure);
        o.detail << r.name << " " << r.cases - r.failures << "/" << r.cases << " ";
    }
}

void determinism(Outcome& o) {
#ifdef WFI_HAVE_CLI
    namespace fs = std::filesystem;
    auto go = [](const std::string& dir) {
        cli::Context c;
        c.command = "simulate";
        c.seed = 42;
        c.config = cli::parse_json_text(
            R"({"measure": {"family": "double_exp", "smoothed": true, "grid": {"n": 512}},
                "initial": {"type": "two_level", "threshold": 0, "lo": 0.5, "hi": 1.5},
                "solver": {"t_end": 4, "n_samples": 40},
                "monte_carlo": {"n_paths": 10000, "dt": 1e-2}})",
            "determinism");
        c.out = fs::path("acceptance_out") / dir;
        fs::remove_all(c.out);
        cli::run(c);
        std::ifstream in(c.out / "trace.csv", std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        std::ifstream mc(c.out / "monte_carlo.csv", std::ios::binary);
        s << mc.rdbuf();
        return s.str();
    };
    std::string a = go("a"), b = go("b");
    o.require(!a.empty() && a == b, "trace.csv differs");
    o.detail << a.size() << " bytes compared ";
#else
    o.require(false, "built without the CLI");
#endif
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"rate exponents", rate_exponents},
        {"Hardy sandwich", hardy_sandwich},
        {"conversion identities", conversion_identities},
        {"Poincare detection", poincare_detection},
        {"OU benchmark", ou_benchmark},
        {"decay bounds dominate traces", decay_bounds_hold},
        {"stretched-exponential regime", stretched_regime},
        {"L2 membership threshold", l2_threshold},
        {"property suites", property_suites},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto t0 = Clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::printf("%s %2zu %s: %s[%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.str().c_str(), seconds_since(t0));
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
