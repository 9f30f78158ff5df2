#include <cmath>

#include <wfi/capacity.hpp>
#include <wfi/hardy.hpp>
#include <wfi/numerics.hpp>

#include "testing.hpp"

using namespace wfi;

namespace {

GridSpec grid(double a, double b, std::size_t n) {
    GridSpec g;
    g.xmin = a;
    g.xmax = b;
    g.n = n;
    return g;
}

Measure1D double_exp() { return Measure1D::build(Potential::double_exp(), grid(-40, 40, 4096)); }

}  // namespace

TEST_CASE("resistance closed forms") {
    auto de = double_exp();
    CHECK(resistance(de, 0.0, 1.0) == doctest::Approx(3.4365636569180905).epsilon(1e-9));

    auto u = Measure1D::build(Potential::uniform(0, 1), grid(0, 1, 256));
    CHECK(resistance(u, 0.2, 0.7) == doctest::Approx(0.5).epsilon(1e-12));

    auto ht = Measure1D::build(Potential::heavy_tail(1.0), auto_grid(Potential::heavy_tail(1.0)));
    CHECK(resistance(ht, 0.0, 1.0) == doctest::Approx(14.0 / 3.0).epsilon(1e-8));
    CHECK_WFI_ERROR(resistance(de, 0.0, 100.0), ErrorCode::OutOfDomain);
}

TEST_CASE("resistance overflows to +inf in deep gaussian tails") {
    GridSpec g = grid(-40, 40, 8192);
    auto mu = Measure1D::build(Potential::gaussian(), g, true);
    CHECK(std::isinf(resistance(mu, 0.0, 39.0)));
}

TEST_CASE("cap_halfline") {
    auto de = double_exp();
    CHECK(cap_halfline(de, 1.0) == doctest::Approx(0.29098835343466321).epsilon(1e-9));
    CHECK(cap_halfline(de, -1.0) == doctest::Approx(0.29098835343466321).epsilon(1e-9));

    auto u = Measure1D::build(Potential::uniform(0, 1), grid(0, 1, 256));
    CHECK(cap_halfline(u, 0.75) == doctest::Approx(4.0).epsilon(1e-12));

    CHECK_WFI_ERROR(cap_halfline(de, 1e-9), ErrorCode::AtMedian);
}

TEST_CASE("s_star kernels") {
    CHECK(s_star(0.1) == doctest::Approx(0.05 * std::log(1.0 + 5.0)));
    CHECK(s_star(0.1, NecessaryKernel::e_squared) == doctest::Approx(0.05 * std::log(1.0 + std::exp(2.0) / 0.1)));
}

TEST_CASE("check_necessary") {
    auto de = double_exp();
    std::vector<double> xs = linspace(0.5, 20.0, 80);

    auto big = RateFunction::derived("10 log(e^2/s)", [](double s) { return 10.0 * std::log(std::exp(2.0) / s); }, 0.0, 1.0);
    auto ok = check_necessary(de, big, xs);
    CHECK(ok.violations == 0);
    CHECK(ok.max_ratio <= 1.0);

    auto one = check_necessary(de, RateFunction::constant(1.0), xs);
    CHECK(one.violations > 0);
    // lhs/cap grows linearly in x
    const auto& r = one.rows;
    CHECK(r.back().ratio > r[r.size() / 2].ratio);
    CHECK(r.back().ratio / r.back().x == doctest::Approx(r[r.size() - 5].ratio / r[r.size() - 5].x).epsilon(0.1));

    auto inf = check_necessary(de, RateFunction::constant(INFINITY), xs);
    CHECK(inf.violations == 0);
}

TEST_CASE("beta_from_capacity shapes") {
    SUBCASE("gaussian is bounded") {
        auto mu = Measure1D::build(Potential::subexp(2.0), auto_grid(Potential::subexp(2.0)));
        auto b = beta_from_capacity(mu);
        double lo = INFINITY, hi = 0;
        for (double s : logspace(1e-8, 1e-1, 50)) {
            lo = std::min(lo, b(s));
            hi = std::max(hi, b(s));
        }
        CHECK(hi / lo <= 3.0);
    }
    SUBCASE("exponential tail gives log(1/s)") {
        auto mu = Measure1D::build(Potential::subexp(1.0), auto_grid(Potential::subexp(1.0)));
        auto fit = fit_rate_exponents(beta_from_capacity(mu));
        CHECK(std::fabs(fit.p) <= 0.1);
        CHECK(fit.q == doctest::Approx(1.0).epsilon(0.15));
    }
    SUBCASE("heavy tail alpha = 2 gives 1/s") {
        auto mu = Measure1D::build(Potential::heavy_tail(2.0), auto_grid(Potential::heavy_tail(2.0)));
        auto fit = fit_rate_exponents(beta_from_capacity(mu));
        CHECK(std::fabs(fit.p - 1.0) <= 0.15);
    }
}

TEST_CASE("beta_from_capacity needs range") {
    auto de = double_exp();
    CHECK_WFI_ERROR(beta_from_capacity(de, {1.0, 2.0, 3.0}), ErrorCode::InsufficientRange);
}

TEST_CASE("beta_from_capacity is stable under grid refinement") {
    auto p = Potential::subexp(1.5);
    auto a = beta_from_capacity(Measure1D::build(p, auto_grid(p, 4096)));
    auto b = beta_from_capacity(Measure1D::build(p, auto_grid(p, 8192)));
    for (double s : logspace(1e-7, 1e-2, 12)) CHECK(a(s) == doctest::Approx(b(s)).epsilon(0.01));
}

TEST_CASE("sandwich: specific s <= sup over s grid") {
    auto de = double_exp();
    auto beta = RateFunction::derived("log(e^2/s)", [](double s) { return std::log(std::exp(2.0) / s); }, 0.0, 1.0);
    for (double x : {1.0, 3.0, 8.0}) {
        const double m = tail_mass(de, x, true);
        const double L = std::log(1.0 + 1.0 / (2.0 * m));
        const double ss = s_star(m);
        const double specific = (m * L - ss) / beta(ss);
        double sup = 0.0;
        for (double s : logspace(1e-12, m * L, 200)) sup = std::max(sup, (m * L - s) / beta(s));
        CHECK(specific <= sup * (1.0 + 1e-12));
    }
}
