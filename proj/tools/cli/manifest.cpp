#include "manifest.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <wfi/error.hpp>

namespace wfi::cli {

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "SHA-256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

void RunManifest::seal() {
    nlohmann::json c;
    wfi::to_json(c, constants);
    nlohmann::json key = {{"command", command}, {"config", config}, {"constants", c},
                          {"seed", seed},       {"version", version}};
    digest = sha256_hex(key.dump());
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json c;
    wfi::to_json(c, constants);
    return {{"command", command}, {"config_digest", digest}, {"constants", c},
            {"outputs", outputs}, {"tool_version", version}, {"seed", seed}};
}

OutputDir::OutputDir(std::filesystem::path dir, RunManifest& manifest)
    : dir_(std::move(dir)), m_(manifest) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir_.string() + ": " + ec.message());
}

void OutputDir::write_csv(const std::string& name, const std::string& header, const std::string& rows) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir_ / name).string());
    out << "# manifest " << m_.digest << "\n" << header << "\n" << rows;
    m_.outputs.push_back(name);
}

void OutputDir::write_json(const std::string& name, nlohmann::json j) {
    j["manifest"] = m_.digest;
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir_ / name).string());
    out << j.dump(2) << "\n";
    m_.outputs.push_back(name);
}

void OutputDir::finish() {
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write manifest");
    out << m_.to_json().dump(2) << "\n";
}

}  // namespace wfi::cli
