#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <wfi/error.hpp>

namespace wfi::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin + ": " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) fail(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = std::any_of(allowed.begin(), allowed.end(),
                              [&](const char* k) { return it.key() == k; });
        if (!ok) fail(where + ": unknown key \"" + it.key() + "\"");
    }
}

double get_number(const json& j, const char* key, double fallback, const std::string& where) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number()) fail(where + "." + key + ": expected a number");
    return v->get<double>();
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback, const std::string& where) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number_unsigned()) fail(where + "." + key + ": expected a non-negative integer");
    return v->get<std::size_t>();
}

bool get_bool(const json& j, const char* key, bool fallback, const std::string& where) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(where + "." + key + ": expected true or false");
    return v->get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback,
                       const std::string& where) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_string()) fail(where + "." + key + ": expected a string");
    return v->get<std::string>();
}

const json& get_object(const json& j, const char* key, const std::string& where) {
    const json* v = find(j, key);
    if (!v) fail(where + ": missing key \"" + key + "\"");
    if (!v->is_object()) fail(where + "." + key + ": expected an object");
    return *v;
}

std::pair<Potential, GridSpec> measure_from_json(const json& j, const std::string& where) {
    require_keys(j, {"family", "alpha", "smoothed", "a", "b", "grid"}, where);
    const std::string fam = get_string(j, "family", "", where);
    const double alpha = get_number(j, "alpha", 1.0, where);
    const bool smoothed = get_bool(j, "smoothed", false, where);
    Potential pot;
    if (fam == "subexp")
        pot = Potential::subexp(alpha, smoothed);
    else if (fam == "heavy_tail")
        pot = Potential::heavy_tail(alpha, smoothed);
    else if (fam == "double_exp")
        pot = Potential::double_exp(smoothed);
    else if (fam == "gaussian")
        pot = Potential::gaussian();
    else if (fam == "uniform")
        pot = Potential::uniform(get_number(j, "a", 0.0, where), get_number(j, "b", 1.0, where));
    else
        fail(where + ".family: expected subexp, heavy_tail, double_exp, gaussian or uniform");

    std::size_t n = 4096;
    double cut = 60.0;
    json grid = j.contains("grid") ? get_object(j, "grid", where) : json::object();
    const std::string gw = where + ".grid";
    require_keys(grid, {"n", "cut", "xmin", "xmax", "spacing"}, gw);
    n = get_count(grid, "n", n, gw);
    if (n < 8) fail(gw + ".n: need at least 8 cells");
    cut = get_number(grid, "cut", cut, gw);
    GridSpec spec = auto_grid(pot, n, cut);
    spec.xmin = get_number(grid, "xmin", spec.xmin, gw);
    spec.xmax = get_number(grid, "xmax", spec.xmax, gw);
    const std::string sp = get_string(grid, "spacing", "", gw);
    if (sp == "uniform")
        spec.spacing = Spacing::uniform;
    else if (sp == "graded")
        spec.spacing = Spacing::graded;
    else if (!sp.empty())
        fail(gw + ".spacing: expected uniform or graded");
    if (!(spec.xmax > spec.xmin)) fail(gw + ": xmax must exceed xmin");
    return {pot, spec};
}

RateFunction rate_from_config(const json& j, const std::string& where) {
    try {
        return rate_from_json(j);
    } catch (const Error& e) {
        fail(where + ": " + e.what());
    }
}

}  // namespace wfi::cli
