#ifndef MEMCTRL_SERIALIZE_HPP
#define MEMCTRL_SERIALIZE_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "memctrl/control.hpp"

namespace memctrl {

/// Shortest round-trippable decimal (17 significant digits).
std::string format_double(double v);

// ResolventTable <-> CSV (header m,t,s,err,route) and JSON (full type mirror).
std::string resolvent_table_csv(const ResolventTable& table);
ResolventTable resolvent_table_from_csv(const std::string& text, const MemoryKernel& kernel);
nlohmann::json resolvent_table_json(const ResolventTable& table);
ResolventTable resolvent_table_from_json(const nlohmann::json& j);

// Trajectory -> CSV (k,t,m,w) and JSON with the meta block.
std::string trajectory_csv(const Trajectory& traj);
nlohmann::json trajectory_json(const Trajectory& traj);

nlohmann::json gramian_json(const Gramian& g);
nlohmann::json control_signal_json(const ControlSignal& u);
nlohmann::json steering_result_json(const SteeringResult& r);

std::string criterion_csv(const CriterionTable& table);  // header lambda,crit

struct SweepRow {
    double lambda = 0.0;
    double terminal_miss = 0.0;
    double cost = 0.0;
    double energy = 0.0;
    int iters = 0;
};

std::string sweep_csv(const std::vector<SweepRow>& rows);  // lambda,terminal_miss,cost,energy,iters

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace memctrl

#endif  // MEMCTRL_SERIALIZE_HPP
