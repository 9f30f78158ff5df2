#include <cmath>

#include <wfi/conversions.hpp>
#include <wfi/hardy.hpp>
#include <wfi/numerics.hpp>
#include <wfi/semigroup.hpp>

#include "testing.hpp"

using namespace wfi;

namespace {

std::shared_ptr<const Measure1D> ou_measure(std::size_t n = 2048) {
    auto V = Potential::subexp(2.0).scaled(0.5);
    return std::make_shared<const Measure1D>(stationary_measure(V, auto_grid(V.scaled(2.0), n)));
}

std::shared_ptr<const Measure1D> shared(const Potential& p, std::size_t n = 2048) {
    return std::make_shared<const Measure1D>(Measure1D::build(p, auto_grid(p, n)));
}

double ou_entropy_at(std::size_t n, double t) {
    auto mu = ou_measure(n);
    SolverConfig c;
    c.mu = mu;
    c.h0 = dirac_initial(*mu, 1.0, 0.05);
    c.t_end = t;
    c.sample_times = {0.0, t};
    return evolve(c).entropy.back();
}

}  // namespace

TEST_CASE("stationary_measure uses e^{-2V}") {
    auto mu = ou_measure();
    CHECK(mu->z() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-8));
    CHECK(variance(*mu, mu->sample([](double x) { return x; })) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("evolve: OU benchmark") {
    auto mu = ou_measure();
    const double t = std::log(2.0);
    SolverConfig c;
    c.mu = mu;
    c.h0 = dirac_initial(*mu, 1.0, 0.05);
    c.t_end = t;
    c.sample_times = {0.0, t};
    c.keep_snapshots = true;
    auto tr = evolve(c);
    CHECK(std::fabs(tr.law_mean.back() - 0.5) <= 0.005);
    CHECK(std::fabs(tr.law_variance.back() - 0.375) <= 0.005);
    // the initial law N(1, 0.05^2) adds 0.05^2 e^{-2t} to the variance
    CHECK(tr.law_variance.back() == doctest::Approx(0.375 + 0.0025 * 0.25).epsilon(1e-3));
    CHECK(l1_distance(*mu, tr.snapshots.back(), [&](double u) { return ou_transition_density(1.0, t, 0.05, u); }) <=
          2e-3);
    CHECK(std::fabs(tr.mass.back() - 1.0) <= 1e-10);
}

TEST_CASE("ou_transition_density is a normalized Gaussian") {
    auto q = [](double u) { return ou_transition_density(1.0, std::log(2.0), 0.0, u); };
    CHECK(integrate(q, -10.0, 10.0, 1e-12).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate([&](double u) { return u * q(u); }, -10.0, 10.0, 1e-12).value ==
          doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("evolve: stationarity") {
    auto mu = shared(Potential::double_exp(true), 512);
    SolverConfig c;
    c.mu = mu;
    c.h0 = mu->constant(1.0);
    c.t_end = 2.0;
    c.n_samples = 10;
    auto tr = evolve(c);
    for (double e : tr.entropy) CHECK(std::fabs(e) <= 1e-13);
    for (double v : tr.tv) CHECK(v <= 1e-12);
    c.scheme = Scheme::implicit_euler;
    c.dt = 0.05;
    tr = evolve(c);
    for (double e : tr.entropy) CHECK(std::fabs(e) <= 1e-12);
}

TEST_CASE("evolve: double exponential decays by three orders within 50 C_P") {
    auto mu = shared(Potential::double_exp(true), 2048);
    const double cp = poincare_upper_bound(*mu);
    REQUIRE(std::isfinite(cp));
    SolverConfig c;
    c.mu = mu;
    c.h0 = two_level_initial(*mu, 0.0, 0.5, 1.5);
    c.t_end = 50.0 * cp;
    c.scheme = Scheme::implicit_euler;
    c.dt = 1e-4;
    c.dt_growth = 1.01;
    c.dt_cap = 0.02;
    c.n_samples = 60;
    c.t_first = 0.01;
    auto tr = evolve(c);
    for (std::size_t i = 1; i < tr.times.size(); ++i) {
        if (tr.entropy[i - 1] > 1e-14) CHECK(tr.entropy[i] < tr.entropy[i - 1]);
    }
    CHECK(tr.entropy.back() < 1e-3 * tr.entropy.front());
}

TEST_CASE("evolve: de Bruijn identity") {
    auto mu = shared(Potential::double_exp(true), 1024);
    SolverConfig c;
    c.mu = mu;
    c.h0 = two_level_initial(*mu, 0.0, 0.5, 1.5);
    c.t_end = 12.0;
    c.sample_times = linspace(0.0, 12.0, 2401);
    auto tr = evolve(c);
    std::size_t checked = 0;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < tr.times.size(); ++i) {
        if (tr.times[i] < 0.1 || tr.entropy[i] <= 1e-8) continue;
        double d = (tr.entropy[i + 1] - tr.entropy[i - 1]) / (tr.times[i + 1] - tr.times[i - 1]);
        worst = std::max(worst, std::fabs(d / (-0.5 * tr.fisher[i]) - 1.0));
        ++checked;
    }
    CHECK(checked > 100);
    CHECK(worst <= 0.05);
}

TEST_CASE("evolve: grid convergence on the OU benchmark") {
    for (double t : {0.1, 0.4, 1.0}) {
        double coarse = ou_entropy_at(1024, t), fine = ou_entropy_at(2048, t);
        CHECK(std::fabs(coarse - fine) <= 0.01 * fine);
    }
}

TEST_CASE("evolve: Instability on a signed initial datum") {
    auto mu = shared(Potential::double_exp(true), 256);
    std::vector<double> v(mu->nodes(), 1.0);
    v[mu->nodes() / 2] = -50.0;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += mu->node_mass()[i] * v[i];
    for (double& x : v) x /= s;
    SolverConfig c;
    c.mu = mu;
    c.h0 = GridFunction(mu->grid(), v);
    c.t_end = 0.1;
    CHECK_WFI_ERROR(evolve(c), ErrorCode::Instability);
}

TEST_CASE("evolve: bad configurations") {
    auto mu = shared(Potential::double_exp(true), 256);
    SolverConfig c;
    c.mu = mu;
    c.h0 = mu->constant(2.0);
    CHECK_WFI_ERROR(evolve(c), ErrorCode::InvalidArgument);
    c.h0 = mu->constant(1.0);
    c.scheme = Scheme::implicit_euler;
    CHECK_WFI_ERROR(evolve(c), ErrorCode::InvalidArgument);
    c.t_end = 0.0;
    CHECK_WFI_ERROR(evolve(c), ErrorCode::TimeOutOfRange);
}

TEST_CASE("explicit density for the sign drift") {
    for (double x : {0.5, 2.0})
        for (double t : {0.1, 1.0}) CHECK(explicit_term_doubleexp(x, t, 0.0) == 0.0);

    auto g = std::make_shared<const std::vector<double>>(linspace(0.0, 12.0, 4001));
    auto ed = explicit_density_doubleexp(2.0, 0.5, g);
    double grid_max = 0.0;
    for (double v : ed.term.values()) grid_max = std::max(grid_max, v);
    double fine_max = 0.0;
    for (double u : linspace(0.0, 12.0, 40001)) fine_max = std::max(fine_max, explicit_term_doubleexp(2.0, 0.5, u));
    CHECK(std::isfinite(grid_max));
    CHECK(grid_max == doctest::Approx(fine_max).epsilon(1e-4));
    CHECK(ed.remainder_bound > 0.0);
    CHECK_WFI_ERROR(remainder_bound_doubleexp(-1.0, 0.5), ErrorCode::InvalidArgument);
}

TEST_CASE("explicit density agrees with the solver up to the remainder") {
    GridSpec gs;
    gs.xmin = -12;
    gs.xmax = 12;
    gs.n = 4096;
    auto mu = std::make_shared<const Measure1D>(stationary_measure(Potential::double_exp(), gs));
    SolverConfig c;
    c.mu = mu;
    c.h0 = dirac_initial(*mu, 2.0);
    c.t_end = 0.5;
    c.sample_times = {0.0, 0.5};
    c.keep_snapshots = true;
    c.scheme = Scheme::implicit_euler;
    c.dt = 1e-6;
    c.dt_growth = 1.01;
    c.dt_cap = 2e-5;
    auto tr = evolve(c);
    auto ed = explicit_density_doubleexp(2.0, 0.5, mu->grid());
    std::size_t checked = 0;
    for (std::size_t i = 0; i < mu->nodes(); ++i) {
        double u = mu->x()[i];
        if (u < 0.5 || u > 6.0) continue;
        ++checked;
        CHECK(std::fabs(tr.snapshots.back()[i] - ed.term[i]) <= ed.remainder_bound);
    }
    CHECK(checked > 500);
}

TEST_CASE("euler_maruyama") {
    SUBCASE("OU mean") {
        EmConfig c;
        c.mu = ou_measure();
        c.x0 = 1.0;
        c.t_end = std::log(2.0);
        c.n_paths = 10000;
        c.seed = 11;
        auto tr = euler_maruyama(c);
        const double sigma = std::sqrt(0.375);
        CHECK(std::fabs(tr.mean.back() - 0.5) <= 3.0 * sigma / std::sqrt(10000.0));
        CHECK(tr.bin_edges.size() == 129);
    }
    SUBCASE("free motion on an interval") {
        EmConfig c;
        c.mu = shared(Potential::uniform(0.0, 1.0), 256);
        c.x0 = 0.2;
        c.t_end = 3.0;
        c.dt = 1e-3;
        c.sample_times = {0.01, 3.0};
        c.seed = 5;
        auto tr = euler_maruyama(c);
        CHECK(tr.tv.front() > 1.0);
        CHECK(tr.tv.back() < 0.15);
        CHECK(tr.mean.back() == doctest::Approx(0.5).epsilon(0.02));
    }
    SUBCASE("double exponential variance") {
        EmConfig c;
        c.mu = shared(Potential::double_exp(), 2048);
        c.t_end = 30.0;
        c.dt = 1e-2;
        c.seed = 3;
        auto tr = euler_maruyama(c);
        CHECK(std::fabs(tr.variance.back() - 2.0) <= 4.0 * std::sqrt(20.0 / 10000.0));
    }
    SUBCASE("determinism") {
        EmConfig c;
        c.mu = ou_measure(512);
        c.x0 = 1.0;
        c.t_end = 0.3;
        c.seed = 99;
        auto a = euler_maruyama(c), b = euler_maruyama(c);
        CHECK(a.mean == b.mean);
        CHECK(a.variance == b.variance);
        CHECK(a.tv == b.tv);
        c.seed = 100;
        CHECK(euler_maruyama(c).mean != a.mean);
    }
}

TEST_CASE("overlay_bounds on subexp(1.5)") {
    auto mu = shared(Potential::subexp(1.5, true), 2048);
    auto shape = RateFunction::power(1.0, 0.0, 1.0 / 3.0);
    auto hb = hardy_bounds(*mu, shape);
    REQUIRE(std::isfinite(hb.upper));
    auto beta = shape.scaled(hb.upper);
    const double cp = poincare_upper_bound(*mu);
    SolverConfig c;
    c.mu = mu;
    c.h0 = two_level_initial(*mu, 0.0, 0.0, 1.0);
    c.t_end = 50.0 * cp;
    c.scheme = Scheme::implicit_euler;
    c.dt = 1e-4;
    c.dt_growth = 1.01;
    c.dt_cap = 0.02;
    c.n_samples = 80;
    c.t_first = 0.01;
    auto tr = evolve(c);

    auto A = restricted_ls_constant(wlsi_to_swlsi(beta), cp, std::sqrt(2.0));
    BoundCurve trivial;
    trivial.name = "initial_entropy";
    trivial.eval = [](double) { return 1.0; };
    trivial.prefactor = Prefactor::entropy0;
    auto v = overlay_bounds(tr, {xi_from_beta(beta, 0.1), exponential_curve(A.A), trivial}, std::sqrt(2.0), 0.05);
    REQUIRE(v.size() == 3);
    for (const auto& r : v) {
        CHECK(r.holds);
        CHECK(r.violations == 0);
        CHECK(r.checked > 50);
        CHECK(std::isnan(r.first_violation));
    }
    CHECK(v[0].prefactor == doctest::Approx(2.0));
    CHECK(v[1].prefactor == doctest::Approx(tr.entropy.front()));
    CHECK(measured_log_slope(tr, 1.0) <= -1.0 / A.A);
}

TEST_CASE("overlay_bounds reports violations and fits free constants") {
    DecayTrace tr;
    tr.times = {0.0, 1.0, 2.0, 3.0};
    tr.entropy = {1.0, 0.5, 0.25, 0.125};
    BoundCurve tight = exponential_curve(1.0);
    auto v = overlay_bounds(tr, {tight}, 1.0);
    CHECK_FALSE(v[0].holds);
    CHECK(v[0].first_violation == doctest::Approx(1.0));
    CHECK(v[0].violations == 3);

    BoundCurve lo = lo_decay_curve(2.0, 0.0);
    auto f = overlay_bounds(tr, {lo}, 1.0);
    CHECK(std::isfinite(f[0].fitted_constant));
}
