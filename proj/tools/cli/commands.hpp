#pragma once
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include <wfi/rate.hpp>

namespace wfi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPremise = 2;

struct Context {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    ConstantsPolicy constants;
    std::uint64_t seed = 1;
    std::filesystem::path out = "out";
    std::ostream* log = nullptr;
};

int cmd_measure(const Context& ctx);
int cmd_beta(const Context& ctx);
int cmd_convert(const Context& ctx);
int cmd_verify(const Context& ctx);
int cmd_capacity(const Context& ctx);
int cmd_simulate(const Context& ctx);
int cmd_bounds(const Context& ctx);
int cmd_report(const Context& ctx);

/// Dispatches on ctx.command.
int run(const Context& ctx);

const char* tool_version();

}  // namespace wfi::cli
