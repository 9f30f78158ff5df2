#include <CLI11.hpp>
#include <iostream>

#include <wfi/error.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Weak functional inequalities: certificates, checks and decay experiments"};
    app.set_version_flag("--version", std::string(wfi::cli::tool_version()));
    app.require_subcommand(1);

    std::string config_path, constants_path, out_dir = "out";
    std::uint64_t seed = 1;
    const std::pair<const char*, const char*> commands[] = {
        {"measure", "Tabulate a measure on its grid"},
        {"beta", "Capacity and Hardy estimates of the optimal WLSI rate"},
        {"convert", "Convert a certificate between inequality kinds"},
        {"verify", "Empirical rate over test function families"},
        {"capacity", "Capacity profile and necessary-condition ratios"},
        {"simulate", "Evolve the diffusion semigroup and overlay decay bounds"},
        {"bounds", "Evaluate decay bound curves on a time grid"},
        {"report", "Summarize the manifests under the output directory"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config,-c", config_path, "JSON configuration file");
        sub->add_option("--out,-o", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Random seed")->capture_default_str();
        sub->add_option("--constants", constants_path, "JSON file overriding the constants policy");
    }
    CLI11_PARSE(app, argc, argv);

    wfi::cli::Context ctx;
    ctx.command = app.get_subcommands().front()->get_name();
    ctx.seed = seed;
    ctx.out = out_dir;
    ctx.log = &std::cout;
    try {
        if (!config_path.empty()) ctx.config = wfi::cli::load_json(config_path);
        if (!ctx.config.is_object()) throw wfi::Error(wfi::ErrorCode::ConfigError, "config: expected an object");
        if (!constants_path.empty()) ctx.constants = wfi::policy_from_json(wfi::cli::load_json(constants_path));
        return wfi::cli::run(ctx);
    } catch (const wfi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wfi::cli::kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wfi::cli::kExitError;
    }
}
