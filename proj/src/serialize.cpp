#include "memctrl/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace memctrl {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string resolvent_table_csv(const ResolventTable& table) {
    std::string out = "m,t,s,err,route\n";
    for (int m = 0; m < table.modes(); ++m)
        for (int k = 0; k < table.time_count(); ++k) {
            out += std::to_string(m + 1);
            out += ',';
            out += format_double(table.times[k]);
            out += ',';
            out += format_double(table.values(m, k));
            out += ',';
            out += format_double(table.error_estimates(m, k));
            out += ',';
            out += route_name(table.entry_routes[m][k]);
            out += '\n';
        }
    return out;
}

ResolventTable resolvent_table_from_csv(const std::string& text, const MemoryKernel& kernel) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "m,t,s,err,route")
        throw IoError("resolvent_table_from_csv: bad header");
    struct Entry {
        double t, s, err;
        ResolventRoute route;
    };
    std::map<int, std::vector<Entry>> by_mode;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 5) throw IoError("resolvent_table_from_csv: bad row");
        by_mode[std::stoi(f[0])].push_back(
            {std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), route_from_name(f[4])});
    }
    if (by_mode.empty()) throw IoError("resolvent_table_from_csv: no rows");
    const int M = static_cast<int>(by_mode.size());
    const int K = static_cast<int>(by_mode.begin()->second.size());
    ResolventTable table{kernel, {}, Matrix::Zero(M, K), Matrix::Zero(M, K), {}, ResolventRoute::MLSeries, 1.0};
    table.entry_routes.assign(M, std::vector<ResolventRoute>(K, ResolventRoute::MLSeries));
    table.times.resize(K);
    for (auto& [mode, entries] : by_mode) {
        if (static_cast<int>(entries.size()) != K)
            throw IoError("resolvent_table_from_csv: ragged table");
        for (int k = 0; k < K; ++k) {
            table.times[k] = entries[k].t;
            table.values(mode - 1, k) = entries[k].s;
            table.error_estimates(mode - 1, k) = entries[k].err;
            table.entry_routes[mode - 1][k] = entries[k].route;
        }
    }
    double sup = 0.0;
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) sup = std::max(sup, std::abs(table.values(m, k)));
    table.sup_norm = sup;
    return table;
}

nlohmann::json resolvent_table_json(const ResolventTable& table) {
    nlohmann::json j;
    j["kernel"] = {{"alpha", table.kernel.alpha()},
                   {"beta", table.kernel.beta()},
                   {"nu", table.kernel.nu()}};
    j["times"] = table.times;
    j["requested_route"] = route_name(table.requested_route);
    j["sup_norm"] = table.sup_norm;
    auto values = nlohmann::json::array();
    auto errors = nlohmann::json::array();
    auto routes = nlohmann::json::array();
    for (int m = 0; m < table.modes(); ++m) {
        nlohmann::json vrow = nlohmann::json::array(), erow = nlohmann::json::array(),
                       rrow = nlohmann::json::array();
        for (int k = 0; k < table.time_count(); ++k) {
            vrow.push_back(table.values(m, k));
            erow.push_back(table.error_estimates(m, k));
            rrow.push_back(route_name(table.entry_routes[m][k]));
        }
        values.push_back(vrow);
        errors.push_back(erow);
        routes.push_back(rrow);
    }
    j["values"] = values;
    j["error_estimates"] = errors;
    j["entry_routes"] = routes;
    return j;
}

ResolventTable resolvent_table_from_json(const nlohmann::json& j) {
    MemoryKernel kernel(j.at("kernel").at("alpha").get<double>(),
                        j.at("kernel").at("beta").get<double>(),
                        j.at("kernel").at("nu").get<double>());
    std::vector<double> times = j.at("times").get<std::vector<double>>();
    const auto& values = j.at("values");
    const int M = static_cast<int>(values.size());
    const int K = static_cast<int>(times.size());
    ResolventTable table{kernel, times, Matrix::Zero(M, K), Matrix::Zero(M, K), {},
                         route_from_name(j.at("requested_route").get<std::string>()),
                         j.at("sup_norm").get<double>()};
    table.entry_routes.assign(M, std::vector<ResolventRoute>(K, table.requested_route));
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) {
            table.values(m, k) = values[m][k].get<double>();
            table.error_estimates(m, k) = j.at("error_estimates")[m][k].get<double>();
            table.entry_routes[m][k] =
                route_from_name(j.at("entry_routes")[m][k].get<std::string>());
        }
    return table;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "k,t,m,w\n";
    for (int k = 0; k < traj.grid.node_count(); ++k)
        for (int m = 0; m < traj.modes(); ++m) {
            out += std::to_string(k);
            out += ',';
            out += format_double(traj.grid.nodes[k]);
            out += ',';
            out += std::to_string(m + 1);
            out += ',';
            out += format_double(traj.states(m, k));
            out += '\n';
        }
    return out;
}

nlohmann::json trajectory_json(const Trajectory& traj) {
    nlohmann::json j;
    j["meta"] = {{"scheme", traj.scheme},
                 {"grid_kind", traj.grid.kind == GridKind::Uniform ? "uniform" : "graded"},
                 {"steps", traj.grid.steps},
                 {"T", traj.grid.T},
                 {"sub_iterations", traj.sub_iterations}};
    j["nodes"] = traj.grid.nodes;
    auto states = nlohmann::json::array();
    for (int m = 0; m < traj.modes(); ++m) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < traj.grid.node_count(); ++k) row.push_back(traj.states(m, k));
        states.push_back(row);
    }
    j["states"] = states;
    return j;
}

nlohmann::json gramian_json(const Gramian& g) {
    nlohmann::json j;
    j["horizon"] = g.horizon;
    j["min_eigenvalue"] = g.min_eigenvalue;
    j["quadrature_steps"] = g.quadrature_steps;
    auto rows = nlohmann::json::array();
    for (int m = 0; m < g.matrix.rows(); ++m) {
        nlohmann::json row = nlohmann::json::array();
        for (int n = 0; n < g.matrix.cols(); ++n) row.push_back(g.matrix(m, n));
        rows.push_back(row);
    }
    j["matrix"] = rows;
    return j;
}

nlohmann::json control_signal_json(const ControlSignal& u) {
    nlohmann::json j;
    j["energy"] = u.energy;
    j["nodes"] = u.grid.nodes;
    auto rows = nlohmann::json::array();
    for (int m = 0; m < u.values.rows(); ++m) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < u.values.cols(); ++k) row.push_back(u.values(m, k));
        rows.push_back(row);
    }
    j["values"] = rows;
    return j;
}

nlohmann::json steering_result_json(const SteeringResult& r) {
    nlohmann::json j;
    j["terminal_miss"] = r.terminal_miss;
    j["picard_iterations"] = r.picard_iterations;
    j["picard_residuals"] = r.picard_residuals;
    j["cost"] = r.cost;
    j["cost_terminal"] = r.cost_terminal;
    j["cost_energy"] = r.cost_energy;
    j["terminal_identity_residual"] = r.terminal_identity_residual;
    j["control"] = control_signal_json(r.control);
    j["trajectory"] = trajectory_json(r.trajectory);
    return j;
}

std::string criterion_csv(const CriterionTable& table) {
    std::string out = "lambda,crit\n";
    for (const auto& row : table.rows) {
        out += format_double(row.lambda);
        out += ',';
        out += format_double(row.crit);
        out += '\n';
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "lambda,terminal_miss,cost,energy,iters\n";
    for (const auto& r : rows) {
        out += format_double(r.lambda);
        out += ',';
        out += format_double(r.terminal_miss);
        out += ',';
        out += format_double(r.cost);
        out += ',';
        out += format_double(r.energy);
        out += ',';
        out += std::to_string(r.iters);
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_file: cannot open " + path);
    out << content;
    if (!out) throw IoError("write_file: write failed for " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace memctrl
