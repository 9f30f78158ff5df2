#include "wfi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wfi/error.hpp"

namespace wfi {

void NeumaierSum::add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
        comp_ += (sum_ - t) + v;
    else
        comp_ += (v - t) + sum_;
    sum_ = t;
}

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void gk15(const std::function<void(double, double*)>& f, std::size_t m, double a, double b,
          double* kron, double* gauss, std::vector<double>& buf) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    buf.resize(2 * m);
    double* fp = buf.data();
    double* fm = buf.data() + m;
    std::fill(kron, kron + m, 0.0);
    std::fill(gauss, gauss + m, 0.0);
    f(c, fp);
    for (std::size_t j = 0; j < m; ++j) {
        kron[j] = kWgk[7] * fp[j];
        gauss[j] = kWg[3] * fp[j];
    }
    for (int i = 0; i < 7; ++i) {
        f(c - h * kXgk[i], fm);
        f(c + h * kXgk[i], fp);
        for (std::size_t j = 0; j < m; ++j) {
            double s = fm[j] + fp[j];
            kron[j] += kWgk[i] * s;
            if (i % 2 == 1) gauss[j] += kWg[i / 2] * s;
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        kron[j] *= h;
        gauss[j] *= h;
    }
}

void adapt(const std::function<void(double, double*)>& f, std::size_t m, double a, double b,
           double rel_tol, double abs_tol, int depth, std::vector<NeumaierSum>& acc,
           std::vector<double>& err) {
    std::vector<double> kron(m), gauss(m), buf;
    gk15(f, m, a, b, kron.data(), gauss.data(), buf);
    bool ok = true;
    for (std::size_t j = 0; j < m; ++j) {
        double e = std::abs(kron[j] - gauss[j]);
        if (!std::isfinite(kron[j])) {
            ok = true;  // let non-finite values propagate instead of refining forever
            break;
        }
        if (e > std::max(abs_tol, rel_tol * std::abs(kron[j]))) ok = false;
    }
    if (ok || depth <= 0 || (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                             std::max(std::abs(a), std::abs(b))) {
        for (std::size_t j = 0; j < m; ++j) {
            acc[j].add(kron[j]);
            err[j] += std::abs(kron[j] - gauss[j]);
        }
        return;
    }
    double c = 0.5 * (a + b);
    adapt(f, m, a, c, rel_tol, abs_tol, depth - 1, acc, err);
    adapt(f, m, c, b, rel_tol, abs_tol, depth - 1, acc, err);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     double abs_tol, int max_depth) {
    if (a == b) return {};
    if (a > b) {
        QuadResult r = integrate(f, b, a, rel_tol, abs_tol, max_depth);
        r.value = -r.value;
        return r;
    }
    std::vector<NeumaierSum> acc(1);
    std::vector<double> err(1, 0.0);
    adapt([&](double x, double* out) { out[0] = f(x); }, 1, a, b, rel_tol, abs_tol, max_depth,
          acc, err);
    return {acc[0].value(), err[0]};
}

void integrate_many(const std::function<void(double, double*)>& f, std::size_t m, double a,
                    double b, double* result, double rel_tol, int max_depth) {
    std::vector<NeumaierSum> acc(m);
    std::vector<double> err(m, 0.0);
    if (a != b) adapt(f, m, a, b, rel_tol, 0.0, max_depth, acc, err);
    for (std::size_t j = 0; j < m; ++j) result[j] = acc[j].value();
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double rel_tol) {
    auto g = [&](double t) {
        if (t >= 1.0) return 0.0;
        double u = 1.0 - t;
        double v = f(a + t / u) / (u * u);
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(g, 0.0, 1.0, rel_tol, 1e-300, 60);
}

QuadResult integrate_from_minus_infinity(const std::function<double(double)>& f, double b,
                                         double rel_tol) {
    return integrate_to_infinity([&](double x) { return f(2.0 * b - x); }, b, rel_tol);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = b;
    return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "logspace needs a, b > 0");
    std::vector<double> v = linspace(std::log(a), std::log(b), n);
    for (double& x : v) x = std::exp(x);
    if (n > 0) {
        v.front() = a;
        v.back() = b;
    }
    return v;
}

double bisect(const std::function<double(double)>& f, double a, double b, double x_tol,
              int max_iter) {
    double fa = f(a);
    if (fa == 0.0) return a;
    double fb = f(b);
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw Error(ErrorCode::InvalidArgument, "bisect: root not bracketed");
    for (int i = 0; i < max_iter; ++i) {
        double c = 0.5 * (a + b);
        if (c <= std::min(a, b) || c >= std::max(a, b) || std::abs(b - a) <= x_tol) break;
        double fc = f(c);
        if (fc == 0.0) return c;
        if ((fc > 0) == (fa > 0)) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    return 0.5 * (a + b);
}

double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double x_tol, int max_iter) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && std::abs(b - a) > x_tol; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error(ErrorCode::InsufficientSamples, "fit_line needs >= 2 points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw Error(ErrorCode::InsufficientSamples, "fit_line: degenerate abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - fit.intercept - fit.slope * x[i];
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

std::array<double, 3> fit_plane(const std::vector<double>& x1, const std::vector<double>& x2,
                                const std::vector<double>& y, double* rms) {
    const std::size_t n = y.size();
    if (n < 3 || x1.size() != n || x2.size() != n)
        throw Error(ErrorCode::InsufficientSamples, "fit_plane needs >= 3 points");
    double m1 = 0, m2 = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m1 += x1[i];
        m2 += x2[i];
        my += y[i];
    }
    m1 /= n;
    m2 /= n;
    my /= n;
    double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = x1[i] - m1, b = x2[i] - m2, c = y[i] - my;
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
        s1y += a * c;
        s2y += b * c;
    }
    double det = s11 * s22 - s12 * s12;
    if (!(std::abs(det) > 1e-14 * s11 * s22))
        throw Error(ErrorCode::InsufficientSamples, "fit_plane: collinear regressors");
    double c1 = (s1y * s22 - s2y * s12) / det;
    double c2 = (s2y * s11 - s1y * s12) / det;
    double c0 = my - c1 * m1 - c2 * m2;
    if (rms) {
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = y[i] - c0 - c1 * x1[i] - c2 * x2[i];
            ss += r * r;
        }
        *rms = std::sqrt(ss / n);
    }
    return {c0, c1, c2};
}

void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                       std::vector<double> upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) {
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace wfi
