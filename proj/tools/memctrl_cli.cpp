#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "memctrl/report.hpp"
#include "memctrl/serialize.hpp"

namespace {

const std::vector<std::string> kCommands = {
    "resolvent-validate", "gramian",   "steer-linear", "steer-semilinear", "sweep-lambda",
    "rank-check",         "criterion", "feasibility",  "decay-report"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memctrl: resolvent-family solver and steering experiments for the heat "
                 "equation with singular memory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 12345;
    std::string format;

    app.add_option("--config", config_path, "scenario config file (TOML)");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "seed for randomized checks (recorded in the summary)");
    app.add_option("--format", format, "csv|json|both (overrides config)")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    for (const auto& name : kCommands) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->footer("state presets for [problem] zeta/zeta1: single_mode(m), decaying(c, rate)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        memctrl::ScenarioConfig config;
        std::string config_hash = "default";
        if (!config_path.empty()) {
            const std::string text = memctrl::read_file(config_path);
            config = memctrl::parse_config_text(text);
            char buf[20];
            std::snprintf(buf, sizeof(buf), "%016llx",
                          static_cast<unsigned long long>(memctrl::fnv1a_hash(text)));
            config_hash = buf;
        }
        if (!out_dir.empty()) config.directory = out_dir;
        if (!format.empty()) config.formats = format;

        const auto t0 = std::chrono::steady_clock::now();
        memctrl::ScenarioOutcome outcome = memctrl::run_scenario(config, command, seed);
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

        memctrl::EmitResult emitted = memctrl::emit_report(
            outcome.rows, config.formats, config.directory + "/" + command, seed, config_hash, ms);

        for (const auto& r : outcome.rows)
            std::printf("%-18s %-34s value=%-24.17g tol=%-12g %s\n", r.scenario.c_str(),
                        r.metric.c_str(), r.value, r.tol, r.pass ? "pass" : "FAIL");
        for (const auto& f : outcome.artifacts) std::printf("wrote %s\n", f.c_str());
        for (const auto& f : emitted.files) std::printf("wrote %s\n", f.c_str());
        return emitted.all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: error: %s\n", command.c_str(), e.what());
        return 2;
    }
}
