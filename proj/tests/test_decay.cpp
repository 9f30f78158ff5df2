#include <cmath>

#include <wfi/decay.hpp>
#include <wfi/numerics.hpp>
#include <wfi/semigroup.hpp>

#include "testing.hpp"

using namespace wfi;

namespace {

BoundCurve curve(std::string name, std::function<double(double)> f, double t_min = 0.0) {
    BoundCurve c;
    c.name = std::move(name);
    c.eval = std::move(f);
    c.t_min = t_min;
    return c;
}

double log_log_slope(const std::function<double(double)>& f, double t0, double t1) {
    std::vector<double> x, y;
    for (double t : logspace(t0, t1, 40)) {
        x.push_back(std::log(t));
        y.push_back(std::log(f(t)));
    }
    return fit_line(x, y).slope;
}

}  // namespace

TEST_CASE("xi_from_beta: constant rate inverts in closed form") {
    const double b0 = 3.0, eps = 0.1;
    auto beta = RateFunction::constant(b0);
    for (double t : {0.0, 0.5, 4.0, 40.0}) {
        CHECK(xi_radius(beta, eps, t) == doctest::Approx(eps * std::exp(-2.0 * t / b0)).epsilon(1e-9));
        CHECK(xi_log_radius(beta, eps, t) == doctest::Approx(std::log(eps) - 2.0 * t / b0).epsilon(1e-9));
    }
    auto c = xi_from_beta(beta, eps);
    CHECK(c.prefactor == Prefactor::osc2_sqrt_h);
    CHECK(c(2.0) == doctest::Approx((std::exp(-1.0) + eps) * std::exp(-4.0 / b0)).epsilon(1e-9));
    CHECK(c.params.at("eps") == eps);
    CHECK(c.non_increasing());
}

TEST_CASE("xi_from_beta: stretched exponential for log^{1/3}") {
    auto beta = RateFunction::power(1.0, 0.0, 1.0 / 3.0);
    std::vector<double> t, y;
    for (double s : linspace(10.0, 1000.0, 60)) {
        t.push_back(s);
        y.push_back(xi_radius(beta, 0.1, s));
    }
    auto f = fit_stretched_exponential(t, y);
    CHECK(std::fabs(f.gamma - 0.75) <= 0.1);
}

TEST_CASE("xi_from_beta: polynomial decay for s^{-2}") {
    auto beta = RateFunction::power(1.0, 2.0, 0.0);
    double slope = log_log_slope([&](double t) { return xi_radius(beta, 0.1, t); }, 1e4, 1e10);
    CHECK(std::fabs(slope + 0.5) <= 0.1);
}

TEST_CASE("xi_from_beta: not invertible") {
    auto up = RateFunction::derived("s", [](double s) { return s; }, 0.0, 1.0);
    CHECK_WFI_ERROR(xi_from_beta(up, 0.1), ErrorCode::NotInvertible);
}

TEST_CASE("converse_beta_from_xi") {
    auto e = curve("exp", [](double t) { return std::exp(-t); });
    auto r = converse_beta_from_xi(e);
    for (double s : {1e-6, 1e-3, 0.1}) CHECK(r.rate(s) == doctest::Approx(2.0 * std::log(2.0 * std::sqrt(2.0) / s)).epsilon(1e-6));
    CHECK(r.poincare);

    auto p = curve("t^-2", [](double t) { return 1.0 / (t * t); }, 1.0);
    CHECK_FALSE(converse_beta_from_xi(p).poincare);
}

TEST_CASE("converse_beta_from_xi round trip dominates up to a constant") {
    auto beta = RateFunction::power(1.0, 0.0, 1.0);
    auto xi = xi_from_beta(beta, 0.1);
    auto back = converse_beta_from_xi(xi).rate;
    double lo = INFINITY, hi = 0.0;
    for (double s : logspace(1e-6, 1e-2, 30)) {
        double q = back(s) / beta(s);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo <= 3.0);
}

TEST_CASE("entropy_split_bound") {
    CHECK(entropy_split_bound(0.1, std::exp(10.0), 1.0) == doctest::Approx(0.21728490805508974).epsilon(1e-12));
    CHECK(entropy_split_bound(0.0, std::exp(10.0), 1.0) == 0.0);
    CHECK(entropy_split_bound(1e-12, std::exp(10.0), 1.0) < 1e-9);
    const double K = std::exp(4.0), e = std::exp(1.0);
    CHECK(entropy_split_bound(4.0 / (2 * e), K, 2.0) == doctest::Approx((2 * e + 2) / (2 * e) * std::log(2 * e)).epsilon(1e-12));
    CHECK_WFI_ERROR(entropy_split_bound(1.0, K, 1.0), ErrorCode::PremiseViolated);
    CHECK_WFI_ERROR(entropy_split_bound(0.1, 2.0, 1.0), ErrorCode::PremiseViolated);
    CHECK_WFI_ERROR(entropy_split_bound(-0.1, K, 1.0), ErrorCode::NegativeInput);
}

TEST_CASE("iterated_decay_curve") {
    auto e = curve("exp", [](double t) { return std::exp(-t); });
    auto c1 = iterated_decay_curve(e, 1, 0.0);
    CHECK(c1.free_constant);
    for (double t : {2.0, 10.0, 100.0}) CHECK(c1(t) == doctest::Approx(1.0 / t).epsilon(1e-12));

    auto r = curve("exp sqrt", [](double t) { return std::exp(-std::sqrt(t)); });
    auto c2 = iterated_decay_curve(r, 2, 0.1);
    for (double t : {4.0, 50.0, 900.0}) CHECK(c2(t) == doctest::Approx(std::pow(t, -0.9)).epsilon(1e-10));

    auto m1 = curve("m1", [](double t) { return 0.5 / (std::sqrt(t) * std::pow(std::log(t), 2.0)); }, 3.0);
    auto c3 = iterated_decay_curve(m1, 1, 0.2);
    // log(1/xi) ~ log(t)/2, so c3 log^{0.8}(t) -> 2^{0.8}
    CHECK(c3(1e300) * std::pow(std::log(1e300), 0.8) == doctest::Approx(std::pow(2.0, 0.8)).epsilon(0.05));
    CHECK(c3(1e300) < c3(1e100));
    CHECK(c3.non_increasing());
    CHECK(c3.t_min >= 3.0);
}

TEST_CASE("lo_decay_curve") {
    auto a = lo_decay_curve(1.0, 0.2);
    CHECK(a.params.at("gamma") == doctest::Approx(0.8 / 1.8).epsilon(1e-12));
    CHECK(a(0.0) == doctest::Approx(std::exp(1.0)));
    auto g = lo_decay_curve(2.0, 1e-9);
    CHECK(g.params.at("gamma") == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(g(3.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
    CHECK(a.non_increasing());
    CHECK(a.free_constant);
}

TEST_CASE("exponential_curve") {
    auto c = exponential_curve(4.0);
    CHECK(c(8.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(c.prefactor == Prefactor::entropy0);
}

TEST_CASE("royer_bounds") {
    auto v = Potential::subexp(2.0);
    CHECK(c_min(v) == doctest::Approx(2.0).epsilon(1e-9));
    auto r = royer_bounds(v, 0.0, 0.1, 1.0);
    CHECK(r.l2_ub == doctest::Approx(1.5408805107995244).epsilon(1e-9));

    // V_+(0) = 0 and the log term vanishes as t -> 1/(2 pi)
    const double t = 1.0 / (2.0 * M_PI) - 1e-12;
    auto near = royer_bounds(v, 0.0, t, 1.0);
    const double expect = 0.0 + 2.0 * t / 2.0 + 0.0 + std::exp(0.0 + 1.0 * (0.0 - 1.0) + 2.0 * t / 2.0);
    CHECK(near.log_moment_ub == doctest::Approx(expect).epsilon(1e-9));

    CHECK_WFI_ERROR(royer_bounds(v, 0.0, 0.2, 1.0), ErrorCode::TimeOutOfRange);
    CHECK_WFI_ERROR(royer_bounds(v, 0.0, 0.0, 1.0), ErrorCode::TimeOutOfRange);
}

TEST_CASE("growth domination for |x|^a") {
    for (double a : {1.0, 1.5, 2.0}) CHECK(growth_domination_ratio(a) <= 1.0 + 1e-12);
}

TEST_CASE("l2_membership") {
    for (double lam : {1.2, 1.5, 2.0}) CHECK(l2_membership(lam, 1.0).finite);
    for (double lam : {0.5, 0.8, 1.0}) CHECK_FALSE(l2_membership(lam, 1.0).finite);
    // the squared inner integral grows like e^{2(1-lam)u}
    CHECK(l2_membership(0.5, 1.0).tail_exponent == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("tv_bound_schedule") {
    GridSpec g;
    g.xmin = -40;
    g.xmax = 40;
    g.n = 2048;
    Measure1D mu = Measure1D::build(Potential::double_exp(), g);
    auto h = two_level_initial(mu, 0.0, 0.5, 1.5);
    const double hmax = 1.5;

    TvScheduleInputs in;
    in.mu = &mu;
    in.h = h;
    in.K_grid = {hmax, 10.0};
    in.poincare_constant = 4.0;
    auto c = tv_bound_schedule(in);
    for (double t : {0.0, 1.0, 10.0}) CHECK(c(t) <= std::sqrt(hmax * std::exp(-t / 4.0)) + 1e-12);

    in.h = mu.constant(1.0);
    auto flat = tv_bound_schedule(in);
    CHECK(flat(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(flat(5.0) == doctest::Approx(0.0).epsilon(1e-12));

    TvScheduleInputs e;
    e.mu = &mu;
    e.h = h;
    e.K_grid = {1e300};
    e.entropy_factor = curve("one", [](double) { return 1.0; });
    CHECK(tv_bound_schedule(e)(3.0) == doctest::Approx(std::sqrt(2.0 * entropy(mu, h))).epsilon(1e-12));

    TvScheduleInputs none;
    none.mu = &mu;
    none.h = h;
    none.K_grid = {10.0};
    CHECK_WFI_ERROR(tv_bound_schedule(none), ErrorCode::NoCertificate);
}

TEST_CASE("fit_stretched_exponential recovers its model") {
    std::vector<double> t, y;
    for (double s : linspace(0.5, 30.0, 50)) {
        t.push_back(s);
        y.push_back(2.0 * std::exp(-0.7 * std::pow(s, 0.6)));
    }
    auto f = fit_stretched_exponential(t, y);
    CHECK(f.gamma == doctest::Approx(0.6).epsilon(1e-3));
    CHECK(f.d == doctest::Approx(0.7).epsilon(1e-3));
    CHECK(f.log_c == doctest::Approx(std::log(2.0)).epsilon(1e-3));
}
