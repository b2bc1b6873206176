#ifndef MEMCTRL_REPORT_HPP
#define MEMCTRL_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "memctrl/config.hpp"

namespace memctrl {

struct ReportRow {
    std::string scenario;
    std::string metric;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
};

std::string report_csv(const std::vector<ReportRow>& rows);  // scenario,metric,value,tol,pass
std::vector<ReportRow> report_rows_from_csv(const std::string& text);

struct EmitResult {
    std::vector<std::string> files;
    bool all_pass = true;
};

/// Writes report.csv and/or summary.json into `directory` per `formats`.
EmitResult emit_report(const std::vector<ReportRow>& rows, const std::string& formats,
                       const std::string& directory, std::uint64_t seed,
                       const std::string& config_hash, double wall_time_ms);

struct ScenarioOutcome {
    std::vector<ReportRow> rows;
    std::vector<std::string> artifacts;  // files written under the scenario directory

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

// Commands: resolvent-validate | gramian | steer-linear | steer-semilinear |
// sweep-lambda | rank-check | criterion | feasibility | decay-report.
// Deterministic for a fixed (config, seed): identical CSV bytes across runs.
ScenarioOutcome run_scenario(const ScenarioConfig& config, const std::string& command,
                             std::uint64_t seed);

std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace memctrl

#endif  // MEMCTRL_REPORT_HPP
