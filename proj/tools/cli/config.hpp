#pragma once
#include <filesystem>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>

#include <wfi/measure.hpp>
#include <wfi/rate.hpp>

namespace wfi::cli {

using nlohmann::json;

/// Parses a JSON file; syntax errors report line and column as ConfigError.
json load_json(const std::filesystem::path& path);
json parse_json_text(const std::string& text, const std::string& origin);

/// Throws ConfigError naming the first key of `j` (an object) outside `allowed`.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

double get_number(const json& j, const char* key, double fallback, const std::string& where);
std::size_t get_count(const json& j, const char* key, std::size_t fallback, const std::string& where);
bool get_bool(const json& j, const char* key, bool fallback, const std::string& where);
std::string get_string(const json& j, const char* key, const std::string& fallback,
                       const std::string& where);
const json& get_object(const json& j, const char* key, const std::string& where);

/// {"family", "alpha", "smoothed", "a", "b", "grid": {"n", "cut", "xmin", "xmax", "spacing"}}.
std::pair<Potential, GridSpec> measure_from_json(const json& j, const std::string& where);

RateFunction rate_from_config(const json& j, const std::string& where);

}  // namespace wfi::cli
