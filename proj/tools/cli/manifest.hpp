#pragma once
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include <wfi/rate.hpp>

namespace wfi::cli {

std::string sha256_hex(const std::string& data);

/// Decimal text with 12 significant digits; "inf", "-inf", "nan" otherwise.
std::string fmt(double v);

/// Provenance of one CLI run. The digest covers command, config, constants,
/// seed and tool version.
struct RunManifest {
    std::string command;
    nlohmann::json config;
    ConstantsPolicy constants;
    std::uint64_t seed = 0;
    std::string version;
    std::string digest;
    std::vector<std::string> outputs;

    void seal();
    nlohmann::json to_json() const;
};

/// Writes files under `dir`, stamping each with the manifest digest.
class OutputDir {
public:
    OutputDir(std::filesystem::path dir, RunManifest& manifest);
    /// `header` is the column line without the trailing newline.
    void write_csv(const std::string& name, const std::string& header, const std::string& rows);
    void write_json(const std::string& name, nlohmann::json j);
    void finish();
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    RunManifest& m_;
};

}  // namespace wfi::cli
