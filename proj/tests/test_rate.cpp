#include <cmath>
#include <nlohmann/json.hpp>

#include <wfi/capacity.hpp>
#include <wfi/conversions.hpp>
#include <wfi/hardy.hpp>
#include <wfi/numerics.hpp>
#include <wfi/rate.hpp>

#include "testing.hpp"

using namespace wfi;

namespace {

RateFunction log_inv() { return RateFunction::power(1.0, 0.0, 1.0); }

double log_slope(const RateFunction& r, double x0, double x1) {
    return std::log(r(x1) / r(x0)) / std::log(x1 / x0);
}

}  // namespace

TEST_CASE("RateFunction basics") {
    auto c = RateFunction::constant(3.0);
    CHECK(c(1e-9) == 3.0);
    auto p = RateFunction::power(2.0, 1.0, 2.0);
    CHECK(p(1e-3) == doctest::Approx(2.0 * 1e3 * std::pow(std::log(1e3), 2.0)));
    // frozen above s_max = 1/e
    CHECK(p(0.9) == doctest::Approx(p(std::exp(-1.0))));
    auto t = RateFunction::table({1e-4, 1e-2, 1e-1}, {100.0, 10.0, 5.0});
    CHECK(t(1e-3) == doctest::Approx(std::sqrt(1000.0)).epsilon(1e-12));
    CHECK(t(0.5) == 5.0);
    CHECK(p.scaled(3.0)(1e-3) == doctest::Approx(3.0 * p(1e-3)));
    CHECK_WFI_ERROR(RateFunction::table({1e-2, 1e-3}, {1, 2}), ErrorCode::InvalidArgument);
    CHECK_WFI_ERROR(RateFunction::constant(-1), ErrorCode::InvalidArgument);
}

TEST_CASE("rate JSON round trip") {
    auto r = rate_from_json(nlohmann::json{{"type", "power"}, {"c", 2.0}, {"p", 0.5}, {"q", 1.0}});
    CHECK(r(1e-4) == doctest::Approx(2.0 * 100.0 * std::log(1e4)));
    auto back = rate_from_json(rate_to_json(r));
    CHECK(back(1e-4) == doctest::Approx(r(1e-4)));
    CHECK_WFI_ERROR(rate_from_json(nlohmann::json{{"type", "power"}, {"x", 1}}), ErrorCode::ConfigError);
    CHECK_WFI_ERROR(policy_from_json(nlohmann::json{{"kappa", -1.0}}), ErrorCode::ConfigError);
    CHECK_WFI_ERROR(policy_from_json(nlohmann::json{{"zeta", 1.0}}), ErrorCode::ConfigError);
}

TEST_CASE("wlsi_to_wpi") {
    const double s = 1.0 / (2.0 * (std::exp(1.0) - 1.0));
    CHECK(wpi_formula(RateFunction::constant(1.5), s) == doctest::Approx(24.0 * 1.5).epsilon(1e-12));

    double sup = 0.0;
    for (double x : logspace(1e-8, 1e-2, 200)) sup = std::max(sup, wpi_formula(log_inv(), x));
    CHECK(sup <= 30.0);

    auto inv = RateFunction::power(1.0, 1.0, 0.0);
    const double s4 = 1e-4;
    const double L = std::log(1.0 + 1.0 / (2.0 * s4));
    CHECK(wpi_formula(inv, s4) == doctest::Approx(24.0 / (s4 / 2.0 * L) / L).epsilon(1e-12));
    CHECK(wpi_formula(inv, s4) == doctest::Approx(6616.4928423700807).epsilon(1e-10));

    auto wp = wlsi_to_wpi(log_inv());
    CHECK(is_non_increasing(wp, 1e-8, 0.5));
    CHECK(wp(1e-8) >= wpi_formula(log_inv(), 1e-8));
}

TEST_CASE("wpi_to_wlsi") {
    ConstantsPolicy pol;
    auto wl = wpi_to_wlsi(RateFunction::constant(2.0), pol);
    for (double s : {1e-6, 1e-3, 0.05}) CHECK(wl(s) == doctest::Approx(2.0 * std::log(1.0 / s)).epsilon(1e-12));
    CHECK(detect_poincare(wl).poincare);

    double K = 0.0;
    auto rt = wlsi_to_wpi(wl);
    for (double s : logspace(1e-8, 0.05, 60)) K = std::max(K, rt(s) / 2.0);
    CHECK(std::isfinite(K));
    CHECK(K < 100.0);

    auto wl2 = wpi_to_wlsi(RateFunction::power(1.0, 0.5, 0.0), pol);
    const double s = 1e-6;
    CHECK(wl2(s) == doctest::Approx(std::pow(s / std::log(1 / s), -0.5) * std::log(1 / s)).epsilon(1e-12));
    CHECK(wl2(s) == doctest::Approx(51351.177743186623).epsilon(1e-10));
}

TEST_CASE("detect_poincare") {
    auto lin = RateFunction::derived("5 log(1/s) + 2", [](double s) { return 5 * std::log(1 / s) + 2; }, 0.0, 0.5);
    CHECK(detect_poincare(lin).poincare);
    CHECK_FALSE(detect_poincare(RateFunction::power(1.0, 0.0, 1.5)).poincare);
    auto mu = Measure1D::build(Potential::subexp(1.0), auto_grid(Potential::subexp(1.0)));
    CHECK(detect_poincare(beta_from_capacity(mu)).poincare);
    CHECK(detect_poincare(lin.scaled(1e3)).poincare == detect_poincare(lin).poincare);
}

TEST_CASE("wlsi_to_spi") {
    auto r = wlsi_to_spi(RateFunction::constant(1.7));
    const double e2 = std::exp(2.0);
    CHECK(std::fabs(r.rate(2.0 * e2) - 1.7) <= 1e-12);
    CHECK(r.rate(1e12) == doctest::Approx(2.0 * 1.7 / std::log(0.5e12)).epsilon(1e-9));
    // frozen at the 2e value below 2e
    CHECK(r.rate(1.5) == doctest::Approx(r.rate(2.0 * std::exp(1.0))));

    auto l = wlsi_to_spi(log_inv());
    const double t = 1e6;
    CHECK(l.rate(t) >= 1.8);
    CHECK(l.rate(t) <= 2.6);
    // the literal value 1.8189 increases towards 2, so the certified rate is its majorant
    CHECK_FALSE(l.premise_ok);
    CHECK(l.rate(t) >= 1.8189314672245429 * (1 - 1e-9));
    CHECK(is_non_increasing(l.rate, 1.0, 1e12));
}

TEST_CASE("wlsi_to_gbi") {
    auto g = wlsi_to_gbi(log_inv());
    CHECK(g.T(0.1) == doctest::Approx(0.90837092681258449).epsilon(1e-10));
    CHECK(g.T(1e-3) == doctest::Approx(1.0 + 1e-3 * std::log(4e-3)).epsilon(1e-10));
    CHECK(g.certified()(0.1) == doctest::Approx(20.0 * g.T(0.1)));

    auto c = wlsi_to_gbi(RateFunction::constant(2.5));
    for (double t : {0.01, 0.3, 1.0}) CHECK(c.T(t) == doctest::Approx(2.5 * t).epsilon(1e-12));
    CHECK(c.nondecreasing);

    auto a = wlsi_to_gbi(RateFunction::power(1.0, 0.0, 1.0 / 3.0));
    std::vector<double> lx, ly;
    for (double x : logspace(0.01, 0.3, 30)) {
        lx.push_back(std::log(x));
        ly.push_back(std::log(a.T(x)));
    }
    CHECK(std::fabs(fit_line(lx, ly).slope - 2.0 / 3.0) <= 0.1);
}

TEST_CASE("gbi_to_wlsi") {
    ConstantsPolicy pol;
    pol.C = 2.0;
    pol.C_prime = 3.0;
    auto lin = RateFunction::derived("x", [](double x) { return x; }, 0.0, 1.0);
    auto a = gbi_to_wlsi(lin, pol);
    for (double s : {1e-9, 1e-4, 0.01}) CHECK(a(s) == doctest::Approx(6.0).epsilon(1e-12));

    auto b = gbi_to_wlsi(RateFunction::constant(0.7), pol);
    CHECK(b(1e-5) == doctest::Approx(2.0 * 0.7 * std::log(1e5)).epsilon(1e-12));
    CHECK(detect_poincare(b).poincare);

    auto c = gbi_to_wlsi(RateFunction::derived("x^{2/3}", [](double x) { return std::pow(x, 2.0 / 3.0); }, 0.0, 1.0));
    auto f = fit_rate_exponents(c);
    CHECK(std::fabs(f.q - 1.0 / 3.0) <= 0.05);

    auto bad = RateFunction::derived("x^2", [](double x) { return x * x + 1e-9; }, 0.0, 1.0);
    CHECK_WFI_ERROR(gbi_to_wlsi(bad), ErrorCode::ShapeViolation);
}

TEST_CASE("wlsi_to_swlsi") {
    auto c = wlsi_to_swlsi(RateFunction::constant(0.5));
    CHECK(c(1e-3) == doctest::Approx(8.0));
    auto l = wlsi_to_swlsi(log_inv());
    CHECK(l(1e-3) == doctest::Approx(517.10614784708487).epsilon(1e-10));
    CHECK(is_non_increasing(l, 1e-12, 0.1));
}

TEST_CASE("restricted_ls_constant") {
    auto c = restricted_ls_constant(RateFunction::constant(4.0), 1.0, 1.0);
    CHECK(c.A == doctest::Approx(4.0).epsilon(1e-9));
    auto r = restricted_ls_constant(RateFunction::power(1.0, 0.5, 0.0), 1.0, 1.0);
    CHECK(std::fabs(r.A - 2.270) <= 1e-3);
    CHECK(r.A == doctest::Approx(2.2696286241343524).epsilon(1e-8));
    CHECK(r.u_star == doctest::Approx(0.43679023236814943).epsilon(1e-5));
    CHECK_WFI_ERROR(restricted_ls_constant(RateFunction::constant(1), 0.0, 1.0), ErrorCode::InvalidArgument);
}

TEST_CASE("restricted_ls_constant grows like log^{2/a - 1} of the sup norm") {
    auto p = Potential::subexp(1.0);
    auto mu = Measure1D::build(p, auto_grid(p));
    auto beta = RateFunction::power(1.0, 0.0, 1.0).scaled(hardy_bounds(mu, RateFunction::power(1, 0, 1)).upper);
    auto swl = wlsi_to_swlsi(beta);
    const double cp = poincare_upper_bound(mu);
    std::vector<double> lx, ly;
    for (double L : linspace(1.0, 10.0, 19)) {
        lx.push_back(std::log(1.0 + L));
        ly.push_back(std::log(restricted_ls_constant(swl, cp, std::exp(L)).A));
    }
    CHECK(std::fabs(fit_line(lx, ly).slope - 1.0) <= 0.15);
}

TEST_CASE("tensorize") {
    auto b = log_inv();
    auto t1 = tensorize(b, 1);
    for (double s : {1e-6, 1e-2}) CHECK(t1(s) == b(s));
    auto t10 = tensorize(b, 10);
    CHECK(t10(1e-4) == doctest::Approx(std::log(1e4) + std::log(10.0)).epsilon(1e-12));
    CHECK_WFI_ERROR(tensorize(b, 0), ErrorCode::InvalidArgument);

    auto third = RateFunction::power(1.0, 0.0, 1.0 / 3.0);
    auto fa = fit_rate_exponents(tensorize_gbi(third, 1));
    auto fb = fit_rate_exponents(tensorize_gbi(third, 50));
    auto f0 = fit_rate_exponents(third);
    CHECK(std::fabs(fa.p - f0.p) <= 0.05);
    CHECK(std::fabs(fa.q - f0.q) <= 0.05);
    CHECK(fb.q == doctest::Approx(fa.q).epsilon(1e-12));
}

TEST_CASE("perturb_bounded") {
    Certificate c;
    c.rate = log_inv();
    auto same = perturb_bounded(c, 0.0);
    CHECK(same.rate(1e-3) == doctest::Approx(c.rate(1e-3)).epsilon(1e-15));

    Certificate k;
    k.rate = RateFunction::constant(2.0);
    CHECK(perturb_bounded(k, 1.0).rate(0.01) == doctest::Approx(std::exp(2.0) * 2.0));

    CHECK(perturb_bounded(c, 2.0).rate(1e-3) == doctest::Approx(486.34695918039934).epsilon(1e-10));
    CHECK_FALSE(perturb_bounded(c, 2.0).provenance.empty());

    Certificate g;
    g.kind = CertKind::GBI;
    g.rate = RateFunction::constant(1.0);
    CHECK_WFI_ERROR(perturb_bounded(g, 1.0), ErrorCode::UnsupportedKind);
}

TEST_CASE("phi_inverse and its asymptotic bracket") {
    for (double s : logspace(1e-8, 1.0, 20)) {
        double v = phi_inverse(s);
        CHECK(v * std::log(1.0 + std::exp(2.0) / v) == doctest::Approx(s).epsilon(1e-10));
    }
    double lo = INFINITY, hi = 0.0;
    for (double s : logspace(1e-12, 0.01, 100)) {
        double r = phi_inverse(s) * std::log(1 / s) / s;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(lo > 0.5);
    CHECK(hi < 2.0);
}

TEST_CASE("convert records provenance with constants") {
    Certificate c;
    c.rate = RateFunction::constant(1.0);
    c.provenance.push_back({"input", {}, ""});
    auto spi = convert(c, CertKind::SPI);
    CHECK(spi.kind == CertKind::SPI);
    CHECK(spi.provenance.size() == 2);
    auto j = certificate_to_json(spi);
    CHECK(j.contains("provenance"));
    auto back = certificate_from_json(j);
    CHECK(back.kind == CertKind::SPI);
}
