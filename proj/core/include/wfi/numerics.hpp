#pragma once
#include <array>
#include <cstddef>
#include <functional>
#include <vector>
#include <cmath>

namespace wfi {

/// Compensated (Neumaier) summation.
class NeumaierSum {
public:
    void add(double v);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, double abs_tol = 0.0, int max_depth = 40);

/// Vector-valued variant: integrates `m` integrands that share one evaluation
/// callback. The callback writes m values for abscissa x into `out`.
void integrate_many(const std::function<void(double x, double* out)>& f, std::size_t m, double a,
                    double b, double* result, double rel_tol = 1e-12, int max_depth = 40);

/// Integral over [a, +inf) using the map x = a + t/(1-t).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double rel_tol = 1e-10);
/// Integral over (-inf, b].
QuadResult integrate_from_minus_infinity(const std::function<double(double)>& f, double b,
                                         double rel_tol = 1e-10);

std::vector<double> linspace(double a, double b, std::size_t n);
/// n points log-spaced between a and b (both positive), endpoints included.
std::vector<double> logspace(double a, double b, std::size_t n);

/// Root of a monotone function on [a, b] by bisection; f(a) and f(b) must bracket 0.
double bisect(const std::function<double(double)>& f, double a, double b, double x_tol = 0.0,
              int max_iter = 200);

/// Minimizer of a unimodal function on [a, b].
double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double x_tol = 1e-10, int max_iter = 300);

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rms_residual = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Least squares y ~ c0 + c1 x1 + c2 x2. Returns {c0, c1, c2}; rms residual in `rms`.
std::array<double, 3> fit_plane(const std::vector<double>& x1, const std::vector<double>& x2,
                                const std::vector<double>& y, double* rms = nullptr);

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored. The result overwrites `rhs`.
void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                       std::vector<double> upper, std::vector<double>& rhs);

/// x log x with the convention 0 log 0 = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace wfi
