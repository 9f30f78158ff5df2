#pragma once
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <utility>
#include <vector>

namespace wfi {

enum class RateKind { constant, power, table, derived };

/// A positive rate function beta(s) on (0, inf).
///
/// Closed forms are `constant(c)` and `power(c, p, q)` = c s^{-p} log(1/s)^q.
/// Tables interpolate log-log between samples and extend below the first
/// sample with the first segment's slope. Evaluation outside [s_min, s_max]
/// clamps to the boundary value.
class RateFunction {
public:
    RateFunction();

    static RateFunction constant(double c);
    /// s_max defaults to 1/e when q != 0 (so the log factor stays >= 1) and to +inf otherwise.
    static RateFunction power(double c, double p, double q,
                              double s_max = std::numeric_limits<double>::quiet_NaN());
    static RateFunction table(std::vector<double> s, std::vector<double> beta,
                              double s_max = std::numeric_limits<double>::quiet_NaN());
    static RateFunction derived(std::string description, std::function<double(double)> f,
                                double s_min = 0.0,
                                double s_max = std::numeric_limits<double>::infinity());

    double operator()(double s) const;
    /// beta(e^{-l}); closed forms and tables stay exact where e^{-l} underflows.
    double at_log_inverse(double l) const;
    /// Evaluation without the clamps.
    double raw(double s) const;

    RateKind kind() const { return impl_->kind; }
    double s_min() const { return impl_->s_min; }
    double s_max() const { return impl_->s_max; }
    const std::string& description() const { return impl_->description; }
    double c() const { return impl_->c; }
    double p() const { return impl_->p; }
    double q() const { return impl_->q; }
    const std::vector<double>& table_s() const { return impl_->ts; }
    const std::vector<double>& table_beta() const { return impl_->tb; }
    bool isotonized() const { return impl_->isotonized; }

    RateFunction scaled(double lambda) const;
    RateFunction clamped(double s_min, double s_max) const;
    RateFunction mark_isotonized() const;

private:
    struct Impl {
        RateKind kind = RateKind::constant;
        double c = 0.0, p = 0.0, q = 0.0;
        std::vector<double> ts, tb;
        std::function<double(double)> fn;
        double s_min = 0.0;
        double s_max = std::numeric_limits<double>::infinity();
        std::string description;
        bool isotonized = false;
    };
    explicit RateFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Samples beta on n log-spaced points of [lo, hi].
std::vector<std::pair<double, double>> sample_rate(const RateFunction& beta, double lo, double hi,
                                                   std::size_t n);

/// True when beta is non-increasing on a log grid of [lo, hi] (relative slack `rel_tol`).
bool is_non_increasing(const RateFunction& beta, double lo, double hi, std::size_t n = 400,
                       double rel_tol = 1e-12);

/// Returns f itself when it is non-increasing on a dense log grid of [lo, hi];
/// otherwise the tabulated majorant s -> sup_{s' in [s, hi]} f(s'). Values
/// above hi are frozen at the value at hi.
RateFunction monotone_majorant(std::string description, const std::function<double(double)>& f,
                               double lo, double hi, double points_per_decade = 24.0);

enum class CertKind { WLSI, WPI, SPI, GBI, RLSI };
const char* to_string(CertKind k);
CertKind cert_kind_from_string(const std::string& s);

struct ProvenanceStep {
    std::string op;
    std::map<std::string, double> params;
    std::string note;
};

/// A functional inequality together with how its rate was obtained.
struct Certificate {
    CertKind kind = CertKind::WLSI;
    RateFunction rate;
    std::vector<ProvenanceStep> provenance;
    bool premise_ok = true;
    std::vector<std::string> warnings;
};

/// Universal constants left unspecified by the theory; all default to 1 except s0.
struct ConstantsPolicy {
    double c = 1.0;
    double c_prime = 1.0;
    double s0 = 0.1;
    double kappa = 1.0;
    double C = 1.0;
    double C_prime = 1.0;
    double a = 1.0;
    double a_prime = 1.0;
};

void to_json(nlohmann::json& j, const ConstantsPolicy& p);
/// Rejects unknown keys with ErrorCode::ConfigError.
ConstantsPolicy policy_from_json(const nlohmann::json& j);

nlohmann::json rate_to_json(const RateFunction& beta, CertKind kind = CertKind::WLSI);
/// Accepts {"type": "const"|"power"|"table", ...}.
RateFunction rate_from_json(const nlohmann::json& j);
nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

}  // namespace wfi
