#pragma once
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace wfi {

enum class Family { heavy_tail, subexp, double_exp, gaussian, custom };

const char* to_string(Family f);

/// A potential Phi defining the measure e^{-Phi(x)} dx / Z.
/// Derivatives are optional; Hardy sufficient-condition scans and the
/// perturbation module need them.
struct Potential {
    Family family = Family::custom;
    double alpha = 0.0;
    bool smoothed = false;
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
    std::function<double(double)> d2phi;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    double operator()(double x) const { return phi(x); }
    bool has_derivatives() const { return static_cast<bool>(dphi) && static_cast<bool>(d2phi); }
    std::string tag() const;

    /// Phi = |x|^alpha, or (1 + x^2)^{alpha/2} when smoothed.
    static Potential subexp(double alpha, bool smoothed = false);
    /// Phi = (1 + alpha) log(1 + |x|): density (alpha/2)(1+|x|)^{-1-alpha}.
    static Potential heavy_tail(double alpha, bool smoothed = false);
    static Potential double_exp(bool smoothed = false);
    static Potential gaussian();
    /// Phi = 0 on [a, b].
    static Potential uniform(double a, double b);
    /// Piecewise linear Phi through (x_i, phi_i); derivatives by finite differences.
    static Potential tabulated(std::vector<double> x, std::vector<double> phi);
    /// c * Phi (keeps derivatives).
    Potential scaled(double c) const;
};

enum class Spacing { uniform, graded };

/// Grid description. `n` is the number of cells (n + 1 nodes). Graded grids are
/// uniform in asinh((x - center)/scale), which keeps heavy tails resolvable.
struct GridSpec {
    double xmin = -30.0;
    double xmax = 30.0;
    std::size_t n = 4096;
    Spacing spacing = Spacing::uniform;
    double center = 0.0;
    double scale = 1.0;
};

/// Truncation bounds where Phi exceeds Phi(center) + `cut` on each side.
GridSpec auto_grid(const Potential& pot, std::size_t n = 4096, double cut = 60.0);

std::vector<double> make_nodes(const GridSpec& spec);

class GridFunction;

/// Discretized one-dimensional measure. Nodes carry lumped (hat-function)
/// masses, so integrals of piecewise-linear functions are exact and every
/// functional is an honest functional of a discrete probability measure.
class Measure1D {
public:
    static Measure1D build(const Potential& pot, const GridSpec& spec, bool is_probability = true);

    const Potential& potential() const { return pot_; }
    const GridSpec& spec() const { return spec_; }
    const std::vector<double>& x() const { return *x_; }
    const std::shared_ptr<const std::vector<double>>& grid() const { return x_; }
    std::size_t nodes() const { return x_->size(); }
    std::size_t cells() const { return x_->size() - 1; }
    double xmin() const { return x_->front(); }
    double xmax() const { return x_->back(); }

    double z() const { return z_; }
    double log_z() const { return log_z_; }
    double median() const { return median_; }
    bool is_probability() const { return is_probability_; }
    /// 1 for probability measures, Z otherwise.
    double total_mass() const { return total_; }

    const std::vector<double>& node_mass() const { return node_mass_; }
    const std::vector<double>& cell_mass() const { return cell_mass_; }
    /// Integral of 1/rho over each cell.
    const std::vector<double>& cell_resistance() const { return cell_res_; }
    /// Node values of the density (normalized when is_probability).
    const std::vector<double>& rho() const { return rho_; }

    double density(double x) const;
    double cdf(double x) const;
    double tail_right(double x) const;
    double tail_left(double x) const;
    /// x with mu((-inf, x]) = p.
    double quantile(double p) const;
    /// x with mu([x, inf)) = tail.
    double right_quantile(double tail) const;
    /// x with mu((-inf, x]) = tail.
    double left_quantile(double tail) const;
    /// Integral of 1/rho over [a, b] (a <= b), +inf on overflow.
    double resistance(double a, double b) const;
    /// Index of the cell containing x (clamped).
    std::size_t locate(double x) const;

    GridFunction sample(const std::function<double(double)>& f) const;
    GridFunction constant(double c) const;

private:
    double partial_mass(std::size_t cell, double a, double b) const;
    double partial_resistance(std::size_t cell, double a, double b) const;

    Potential pot_;
    GridSpec spec_;
    std::shared_ptr<const std::vector<double>> x_;
    bool is_probability_ = true;
    double z_ = 1.0, log_z_ = 0.0, total_ = 1.0, median_ = 0.0;
    double phi_ref_ = 0.0;     // shift used for stable exponentials
    double dens_scale_ = 1.0;  // rho(x) = exp(-(phi - phi_ref)) * dens_scale_
    std::vector<double> node_mass_, cell_mass_, cell_res_, rho_;
    std::vector<double> prefix_, suffix_;  // cumulative cell masses from each end
};

/// Continuous piecewise-linear function on a measure's grid.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::shared_ptr<const std::vector<double>> grid, std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& x() const { return *grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double operator()(double x) const;
    std::vector<double> slopes() const;
    GridFunction map(const std::function<double(double)>& f) const;

private:
    std::shared_ptr<const std::vector<double>> grid_;
    std::vector<double> values_;
};

double tail_mass(const Measure1D& mu, double x, bool right = true);
double mean(const Measure1D& mu, const GridFunction& f);
/// Ent(g) = E[g log g] - E[g] log E[g]; g must be non-negative.
double entropy(const Measure1D& mu, const GridFunction& g);
double variance(const Measure1D& mu, const GridFunction& f);
double oscillation(const Measure1D& mu, const GridFunction& f);
/// Integral of |f'|^2 against mu.
double dirichlet(const Measure1D& mu, const GridFunction& f);
/// Entropy of a discrete density h_i against weights m_i (sum m_i = total).
double discrete_entropy(const std::vector<double>& m, const std::vector<double>& h);
/// u log u - u + 1, accurate near u = 1.
double entropy_kernel(double u);

}  // namespace wfi
