#include "wfi/rate.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "wfi/error.hpp"
#include "wfi/numerics.hpp"

namespace wfi {

using nlohmann::json;

RateFunction::RateFunction() : RateFunction(RateFunction::constant(0.0)) {}

RateFunction RateFunction::constant(double c) {
    if (!(c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "rate constant must be >= 0");
    auto impl = std::make_shared<Impl>();
    impl->kind = RateKind::constant;
    impl->c = c;
    impl->description = "const";
    return RateFunction(impl);
}

RateFunction RateFunction::power(double c, double p, double q, double s_max) {
    if (!(c >= 0.0) || !std::isfinite(p) || !std::isfinite(q))
        throw Error(ErrorCode::InvalidArgument, "power rate needs c >= 0 and finite exponents");
    if (std::isnan(s_max)) s_max = q != 0.0 ? std::exp(-1.0) : std::numeric_limits<double>::infinity();
    if (q != 0.0 && !(s_max < 1.0))
        throw Error(ErrorCode::InvalidArgument, "power rate with a log factor needs s_max < 1");
    auto impl = std::make_shared<Impl>();
    impl->kind = RateKind::power;
    impl->c = c;
    impl->p = p;
    impl->q = q;
    impl->s_max = s_max;
    impl->description = "power";
    return RateFunction(impl);
}

RateFunction RateFunction::table(std::vector<double> s, std::vector<double> beta, double s_max) {
    if (s.size() < 2 || s.size() != beta.size())
        throw Error(ErrorCode::InvalidArgument, "table rate needs >= 2 matching samples");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i] > 0.0) || (i > 0 && !(s[i] > s[i - 1])))
            throw Error(ErrorCode::InvalidArgument, "table s must be positive and increasing");
        if (!(beta[i] >= 0.0) || !std::isfinite(beta[i]))
            throw Error(ErrorCode::InvalidArgument, "table beta must be finite and >= 0");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = RateKind::table;
    impl->s_max = std::isnan(s_max) ? s.back() : s_max;
    impl->ts = std::move(s);
    impl->tb = std::move(beta);
    impl->description = "table";
    return RateFunction(impl);
}

RateFunction RateFunction::derived(std::string description, std::function<double(double)> f,
                                   double s_min, double s_max) {
    auto impl = std::make_shared<Impl>();
    impl->kind = RateKind::derived;
    impl->fn = std::move(f);
    impl->s_min = s_min;
    impl->s_max = s_max;
    impl->description = std::move(description);
    return RateFunction(impl);
}

namespace {
double table_eval(const std::vector<double>& s, const std::vector<double>& b, double x) {
    auto seg = [&](std::size_t k, double v) {
        double l0 = std::log(s[k]), l1 = std::log(s[k + 1]), lv = std::log(v);
        double t = (lv - l0) / (l1 - l0);
        if (b[k] > 0.0 && b[k + 1] > 0.0)
            return std::exp(std::log(b[k]) + t * (std::log(b[k + 1]) - std::log(b[k])));
        return b[k] + t * (b[k + 1] - b[k]);
    };
    if (x >= s.back()) return b.back();
    if (x < s.front()) {
        if (!(b[0] > 0.0 && b[1] > 0.0)) return b[0];
        double slope = (std::log(b[1]) - std::log(b[0])) / (std::log(s[1]) - std::log(s[0]));
        slope = std::min(slope, 0.0);
        return b[0] * std::exp(slope * (std::log(x) - std::log(s[0])));
    }
    auto it = std::upper_bound(s.begin(), s.end(), x);
    std::size_t k = static_cast<std::size_t>(it - s.begin()) - 1;
    if (x == s[k]) return b[k];
    return seg(k, x);
}
}  // namespace

double RateFunction::raw(double s) const {
    const Impl& m = *impl_;
    switch (m.kind) {
        case RateKind::constant: return m.c;
        case RateKind::power: {
            double v = m.c;
            if (m.p != 0.0) v *= std::pow(s, -m.p);
            if (m.q != 0.0) v *= std::pow(std::log(1.0 / s), m.q);
            return v;
        }
        case RateKind::table: return table_eval(m.ts, m.tb, s);
        case RateKind::derived: return m.fn(s);
    }
    return 0.0;
}

double RateFunction::operator()(double s) const {
    if (s > impl_->s_max) s = impl_->s_max;
    if (s < impl_->s_min) s = impl_->s_min;
    return raw(s);
}

double RateFunction::at_log_inverse(double l) const {
    const Impl& m = *impl_;
    const double s = std::exp(-l);
    if (s >= std::numeric_limits<double>::min() || l <= 0.0) return (*this)(s);
    if (m.s_min > 0.0) return (*this)(m.s_min);
    switch (m.kind) {
        case RateKind::power: return m.c * std::exp(m.p * l) * (m.q != 0.0 ? std::pow(l, m.q) : 1.0);
        case RateKind::table: {
            const auto& ts = m.ts;
            const auto& tb = m.tb;
            if (!(tb[0] > 0.0 && tb[1] > 0.0)) return tb[0];
            double slope = (std::log(tb[1]) - std::log(tb[0])) / (std::log(ts[1]) - std::log(ts[0]));
            slope = std::min(slope, 0.0);
            return tb[0] * std::exp(slope * (-l - std::log(ts[0])));
        }
        default: return (*this)(std::numeric_limits<double>::min());
    }
}

RateFunction RateFunction::scaled(double lambda) const {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be >= 0");
    auto impl = std::make_shared<Impl>(*impl_);
    switch (impl->kind) {
        case RateKind::constant:
        case RateKind::power: impl->c *= lambda; break;
        case RateKind::table:
            for (double& v : impl->tb) v *= lambda;
            break;
        case RateKind::derived: {
            auto f = impl->fn;
            impl->fn = [f, lambda](double s) { return lambda * f(s); };
            break;
        }
    }
    return RateFunction(impl);
}

RateFunction RateFunction::clamped(double s_min, double s_max) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->s_min = s_min;
    impl->s_max = s_max;
    return RateFunction(impl);
}

RateFunction RateFunction::mark_isotonized() const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->isotonized = true;
    return RateFunction(impl);
}

std::vector<std::pair<double, double>> sample_rate(const RateFunction& beta, double lo, double hi,
                                                   std::size_t n) {
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    for (double s : logspace(lo, hi, n)) out.emplace_back(s, beta(s));
    return out;
}

bool is_non_increasing(const RateFunction& beta, double lo, double hi, std::size_t n,
                       double rel_tol) {
    double prev = std::numeric_limits<double>::infinity();
    for (double s : logspace(lo, hi, n)) {
        double v = beta(s);
        if (v > prev * (1.0 + rel_tol) + 1e-300) return false;
        prev = v;
    }
    return true;
}

RateFunction monotone_majorant(std::string description, const std::function<double(double)>& f,
                               double lo, double hi, double points_per_decade) {
    const double decades = std::log10(hi / lo);
    const auto n = static_cast<std::size_t>(std::ceil(decades * points_per_decade)) + 1;
    std::vector<double> s = logspace(lo, hi, std::max<std::size_t>(n, 2));
    std::vector<double> v(s.size());
    bool monotone = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        v[i] = f(s[i]);
        if (!(v[i] >= 0.0)) throw Error(ErrorCode::NonMonotoneBeta, "converted rate is negative or NaN");
        if (i > 0 && v[i] > v[i - 1] * (1.0 + 1e-12)) monotone = false;
    }
    if (monotone) return RateFunction::derived(std::move(description), f, 0.0, hi);
    for (std::size_t i = s.size() - 1; i-- > 0;) v[i] = std::max(v[i], v[i + 1]);
    if (!std::isfinite(v.front()))
        throw Error(ErrorCode::NonMonotoneBeta, "majorant of the converted rate is infinite");
    auto t = RateFunction::table(std::move(s), std::move(v), hi).mark_isotonized();
    return t;
}

const char* to_string(CertKind k) {
    switch (k) {
        case CertKind::WLSI: return "WLSI";
        case CertKind::WPI: return "WPI";
        case CertKind::SPI: return "SPI";
        case CertKind::GBI: return "GBI";
        case CertKind::RLSI: return "RLSI";
    }
    return "WLSI";
}

CertKind cert_kind_from_string(const std::string& s) {
    for (CertKind k : {CertKind::WLSI, CertKind::WPI, CertKind::SPI, CertKind::GBI, CertKind::RLSI})
        if (s == to_string(k)) return k;
    throw Error(ErrorCode::ConfigError, "unknown certificate kind '" + s + "'");
}

void to_json(json& j, const ConstantsPolicy& p) {
    j = json{{"c", p.c},         {"c_prime", p.c_prime}, {"s0", p.s0}, {"kappa", p.kappa},
             {"C", p.C},         {"C_prime", p.C_prime}, {"a", p.a},   {"a_prime", p.a_prime}};
}

ConstantsPolicy policy_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "constants must be a JSON object");
    ConstantsPolicy p;
    std::map<std::string, double*> fields = {{"c", &p.c},       {"c_prime", &p.c_prime},
                                             {"s0", &p.s0},     {"kappa", &p.kappa},
                                             {"C", &p.C},       {"C_prime", &p.C_prime},
                                             {"a", &p.a},       {"a_prime", &p.a_prime}};
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto f = fields.find(it.key());
        if (f == fields.end()) throw Error(ErrorCode::ConfigError, "unknown key '" + it.key() + "' in constants");
        if (!it.value().is_number() || !(it.value().get<double>() > 0.0))
            throw Error(ErrorCode::ConfigError, "constant '" + it.key() + "' must be a positive number");
        *f->second = it.value().get<double>();
    }
    return p;
}

json rate_to_json(const RateFunction& beta, CertKind kind) {
    json j;
    auto put_smax = [&](json& o) {
        if (std::isfinite(beta.s_max())) o["s_max"] = beta.s_max();
        if (beta.s_min() > 0.0) o["s_min"] = beta.s_min();
    };
    switch (beta.kind()) {
        case RateKind::constant: j = {{"type", "const"}, {"c", beta.c()}}; break;
        case RateKind::power:
            j = {{"type", "power"}, {"c", beta.c()}, {"p", beta.p()}, {"q", beta.q()}};
            put_smax(j);
            break;
        case RateKind::table:
            j = {{"type", "table"}, {"s", beta.table_s()}, {"beta", beta.table_beta()}};
            put_smax(j);
            break;
        case RateKind::derived: {
            double lo = beta.s_min() > 0.0 ? beta.s_min() : 1e-12;
            double hi = std::isfinite(beta.s_max()) ? beta.s_max() : 1e12;
            if (kind == CertKind::SPI && !std::isfinite(beta.s_max())) hi = std::max(hi, lo * 1e6);
            std::vector<double> s, b;
            for (auto [x, v] : sample_rate(beta, lo, hi, 241)) {
                s.push_back(x);
                b.push_back(v);
            }
            j = {{"type", "table"}, {"s", s}, {"beta", b}, {"description", beta.description()}};
            put_smax(j);
            break;
        }
    }
    if (beta.isotonized()) j["isotonized"] = true;
    return j;
}

namespace {
void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw Error(ErrorCode::ConfigError, "unknown key '" + it.key() + "' in " + where);
    }
}
}  // namespace

RateFunction rate_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type")) throw Error(ErrorCode::ConfigError, "rate needs a 'type'");
    const std::string type = j.at("type").get<std::string>();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        if (type == "const") {
            reject_unknown(j, {"type", "c"}, "rate");
            return RateFunction::constant(j.value("c", 1.0));
        }
        if (type == "power") {
            reject_unknown(j, {"type", "c", "p", "q", "s_max"}, "rate");
            return RateFunction::power(j.value("c", 1.0), j.value("p", 0.0), j.value("q", 0.0),
                                       j.value("s_max", nan));
        }
        if (type == "table") {
            reject_unknown(j, {"type", "s", "beta", "s_max", "s_min", "description", "isotonized"}, "rate");
            auto r = RateFunction::table(j.at("s").get<std::vector<double>>(),
                                         j.at("beta").get<std::vector<double>>(), j.value("s_max", nan));
            if (j.contains("s_min")) r = r.clamped(j.at("s_min").get<double>(), r.s_max());
            return r;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("rate: ") + e.what());
    }
    throw Error(ErrorCode::ConfigError, "unknown rate type '" + type + "'");
}

json certificate_to_json(const Certificate& c) {
    json prov = json::array();
    for (const auto& step : c.provenance) {
        json p = {{"op", step.op}, {"params", step.params}};
        if (!step.note.empty()) p["note"] = step.note;
        prov.push_back(p);
    }
    return json{{"kind", to_string(c.kind)},
                {"rate", rate_to_json(c.rate, c.kind)},
                {"premise_ok", c.premise_ok},
                {"provenance", prov},
                {"warnings", c.warnings}};
}

Certificate certificate_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "certificate must be an object");
    reject_unknown(j, {"kind", "rate", "premise_ok", "provenance", "warnings"}, "certificate");
    Certificate c;
    c.kind = cert_kind_from_string(j.at("kind").get<std::string>());
    c.rate = rate_from_json(j.at("rate"));
    c.premise_ok = j.value("premise_ok", true);
    if (j.contains("provenance"))
        for (const auto& p : j.at("provenance")) {
            ProvenanceStep s;
            s.op = p.at("op").get<std::string>();
            if (p.contains("params")) s.params = p.at("params").get<std::map<std::string, double>>();
            s.note = p.value("note", "");
            c.provenance.push_back(s);
        }
    if (j.contains("warnings")) c.warnings = j.at("warnings").get<std::vector<std::string>>();
    return c;
}

}  // namespace wfi
