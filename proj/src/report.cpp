#include "memctrl/report.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "memctrl/serialize.hpp"

namespace memctrl {

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::string out = "scenario,metric,value,tol,pass\n";
    for (const auto& r : rows) {
        out += r.scenario;
        out += ',';
        out += r.metric;
        out += ',';
        out += format_double(r.value);
        out += ',';
        out += format_double(r.tol);
        out += ',';
        out += r.pass ? "true" : "false";
        out += '\n';
    }
    return out;
}

std::vector<ReportRow> report_rows_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "scenario,metric,value,tol,pass")
        throw IoError("report_rows_from_csv: bad header");
    std::vector<ReportRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else
                cur += c;
        }
        f.push_back(cur);
        if (f.size() != 5) throw IoError("report_rows_from_csv: bad row");
        rows.push_back({f[0], f[1], std::stod(f[2]), std::stod(f[3]), f[4] == "true"});
    }
    return rows;
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

EmitResult emit_report(const std::vector<ReportRow>& rows, const std::string& formats,
                       const std::string& directory, std::uint64_t seed,
                       const std::string& config_hash, double wall_time_ms) {
    std::filesystem::create_directories(directory);
    EmitResult out;
    for (const auto& r : rows)
        if (!r.pass) out.all_pass = false;
    if (formats == "csv" || formats == "both") {
        const std::string path = directory + "/report.csv";
        write_file(path, report_csv(rows));
        out.files.push_back(path);
    }
    if (formats == "json" || formats == "both") {
        nlohmann::json j;
        j["all_pass"] = out.all_pass;
        j["seed"] = seed;
        j["config_hash"] = config_hash;
        j["version"] = "memctrl 0.1.0";
        j["wall_time_ms"] = wall_time_ms;
        auto rows_json = nlohmann::json::array();
        for (const auto& r : rows)
            rows_json.push_back({{"scenario", r.scenario},
                                 {"metric", r.metric},
                                 {"value", r.value},
                                 {"tol", r.tol},
                                 {"pass", r.pass}});
        j["rows"] = rows_json;
        const std::string path = directory + "/summary.json";
        write_file(path, j.dump(2) + "\n");
        out.files.push_back(path);
    }
    return out;
}

namespace {

std::vector<double> uniform_times(double T, int nodes) {
    std::vector<double> t(nodes);
    for (int k = 0; k < nodes; ++k) t[k] = T * k / (nodes - 1);
    t[nodes - 1] = T;
    return t;
}

std::vector<Vector> seeded_unit_samples(int count, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Vector v(dim);
        for (int j = 0; j < dim; ++j) v[j] = normal(rng);
        const double n = v.norm();
        out.push_back(n > 0 ? Vector(v / n) : Vector(Vector::Unit(dim, 0)));
    }
    return out;
}

void maybe_write(std::vector<std::string>& artifacts, const std::string& dir,
                 const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    write_file(path, content);
    artifacts.push_back(path);
}

struct SteerSweep {
    std::vector<SweepRow> rows;
    std::vector<SteeringResult> results;
};

SteerSweep steer_sweep(const ScenarioConfig& config, const SpectralSystem& system,
                       const MemoryKernel& kernel, const ResolventTable& table,
                       const ControlOperator& B, const TimeGrid& grid, bool semilinear) {
    SteerSweep out;
    SteeringProblem problem;
    problem.zeta = config.zeta.build(config.modes);
    problem.zeta1 = config.zeta1.build(config.modes);
    problem.T = config.T;
    problem.duality_p = config.p;
    problem.nonlinearity = semilinear ? config.nonlinearity() : Nonlinearity::zero();
    for (double lam : config.lambda_sequence) {
        problem.lambda_reg = lam;
        SteeringResult r = closed_loop_picard(problem, system, kernel, table, B, grid, 1e-8, 50);
        SweepRow row;
        row.lambda = lam;
        const double z1 = system.lp_norm_spectral(problem.zeta1, config.p);
        row.terminal_miss = z1 > 0 ? r.terminal_miss / z1 : r.terminal_miss;
        row.cost = r.cost;
        row.energy = r.control.energy;
        row.iters = r.picard_iterations;
        out.rows.push_back(row);
        out.results.push_back(std::move(r));
    }
    return out;
}

void append_sweep_rows(std::vector<ReportRow>& rows, const std::string& scenario,
                       const ScenarioConfig& config, const SpectralSystem& system,
                       const SteerSweep& sweep, double miss_tol, double monotone_slack) {
    const Vector zeta1 = config.zeta1.build(config.modes);
    const double z1 = 1.0 + system.lp_norm_spectral(zeta1, config.p);
    double worst_identity = 0.0;
    int worst_iters = 0;
    for (const auto& r : sweep.results) {
        worst_identity = std::max(worst_identity, r.terminal_identity_residual);
        worst_iters = std::max(worst_iters, r.picard_iterations);
    }
    rows.push_back({scenario, "terminal_identity_residual_max", worst_identity, 1e-6 * z1,
                    worst_identity <= 1e-6 * z1});
    rows.push_back({scenario, "picard_iterations_max", double(worst_iters), 50.0,
                    worst_iters <= 50});
    double max_increase = 0.0;
    for (std::size_t i = 1; i < sweep.rows.size(); ++i)
        max_increase =
            std::max(max_increase, sweep.rows[i].terminal_miss - sweep.rows[i - 1].terminal_miss);
    rows.push_back({scenario, "miss_monotone_max_increase", max_increase, monotone_slack,
                    max_increase <= monotone_slack});
    const double final_miss = sweep.rows.back().terminal_miss;
    rows.push_back({scenario, "terminal_miss_rel_final", final_miss, miss_tol,
                    final_miss <= miss_tol});
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& config, const std::string& command,
                             std::uint64_t seed) {
    ScenarioOutcome out;
    const std::string dir = config.directory + "/" + command;
    MemoryKernel kernel = config.kernel();
    SpectralSystem system = config.system();

    if (command == "resolvent-validate") {
        const auto times = uniform_times(config.T, 33);
        ResolventTable ml = build_resolvent_table(kernel, system, times,
                                                  ResolventRoute::MLSeries, 1e-10);
        ResolventTable ct = build_resolvent_table(kernel, system, times, ResolventRoute::Contour,
                                                  1e-10);
        ResolventTable vt = build_resolvent_table(kernel, system, times, ResolventRoute::Volterra,
                                                  1e-10);
        double rel_max = 0.0;
        int ml_entries = 0;
        double volterra_abs = 0.0;
        for (int m = 0; m < ml.modes(); ++m)
            for (int k = 0; k < ml.time_count(); ++k) {
                if (ml.entry_routes[m][k] == ResolventRoute::MLSeries && k > 0) {
                    ++ml_entries;
                    const double ref = std::max(std::abs(ct.values(m, k)), 1e-30);
                    rel_max = std::max(rel_max,
                                       std::abs(ml.values(m, k) - ct.values(m, k)) / ref);
                }
                volterra_abs =
                    std::max(volterra_abs, std::abs(vt.values(m, k) - ml.values(m, k)));
            }
        out.rows.push_back({command, "ml_vs_contour_rel_max", rel_max, 1e-6, rel_max <= 1e-6});
        out.rows.push_back({command, "ml_route_entries", double(ml_entries), 0.0, ml_entries > 0});
        out.rows.push_back(
            {command, "volterra_vs_ml_abs_max", volterra_abs, 1e-4, volterra_abs <= 1e-4});
        const double sup_excess = ml.sup_norm - 1.0;
        out.rows.push_back({command, "sup_norm_excess", sup_excess, 1e-8, sup_excess <= 1e-8});

        // resolvent-equation residual and its refinement order
        std::vector<int> nodes = {65, 129, 257};
        for (int m = 0; m < std::min(3, config.modes); ++m) {
            std::vector<double> residuals;
            for (int n : nodes) {
                ResolventTable t =
                    build_resolvent_table(kernel, system, uniform_times(config.T, n),
                                          ResolventRoute::MLSeries, 1e-10);
                residuals.push_back(verify_resolvent_equation(t, m));
            }
            const std::string tag = "_m" + std::to_string(m + 1);
            out.rows.push_back({command, "req_residual_k129" + tag, residuals[1], 1e-4,
                                residuals[1] <= 1e-4});
            const double order = std::log2(residuals[0] / residuals[2]) / 2.0;
            out.rows.push_back({command, "req_order" + tag, order, 1.8, order >= 1.8});
        }
        if (config.formats != "json") {
            maybe_write(out.artifacts, dir, "table_ml.csv", resolvent_table_csv(ml));
            maybe_write(out.artifacts, dir, "table_contour.csv", resolvent_table_csv(ct));
            maybe_write(out.artifacts, dir, "table_volterra.csv", resolvent_table_csv(vt));
        }
        if (config.formats != "csv")
            maybe_write(out.artifacts, dir, "table_ml.json", resolvent_table_json(ml).dump(2) + "\n");
        return out;
    }

    // the remaining commands share the steering grid and table
    TimeGrid grid = config.time_grid();
    ResolventTable table = build_resolvent_table(kernel, system, grid.nodes,
                                                 ResolventRoute::MLSeries, 1e-10);
    ControlOperator B = config.control_op(system);

    if (command == "gramian") {
        Gramian g = assemble_gramian(table, B, grid);
        const double asym = (g.matrix - g.matrix.transpose()).cwiseAbs().maxCoeff();
        out.rows.push_back({command, "gramian_asymmetry", asym, 1e-12, asym <= 1e-12});
        out.rows.push_back({command, "gramian_min_eigenvalue", g.min_eigenvalue, -1e-10,
                            g.min_eigenvalue >= -1e-10});
        maybe_write(out.artifacts, dir, "gramian.json", gramian_json(g).dump(2) + "\n");
        return out;
    }

    if (command == "steer-linear" || command == "steer-semilinear" || command == "sweep-lambda") {
        const bool semilinear =
            command == "steer-semilinear" ||
            (command == "sweep-lambda" && config.nonlinearity_kind != "zero");
        SteerSweep sweep = steer_sweep(config, system, kernel, table, B, grid, semilinear);
        const double miss_tol = semilinear ? 5e-3 : 1e-3;
        const double slack = semilinear ? 1e-8 : 1e-10;
        append_sweep_rows(out.rows, command, config, system, sweep, miss_tol, slack);
        if (config.formats != "json")
            maybe_write(out.artifacts, dir, "sweep.csv", sweep_csv(sweep.rows));
        if (config.formats != "csv")
            maybe_write(out.artifacts, dir, "steering.json",
                        steering_result_json(sweep.results.back()).dump(2) + "\n");
        return out;
    }

    if (command == "rank-check") {
        RankResult r = rank_condition(system.eigenvalues(), B.matrix, config.modes);
        out.rows.push_back({command, "kalman_rank", double(r.rank), double(config.modes),
                            r.controllable});
        return out;
    }

    if (command == "criterion") {
        auto samples = seeded_unit_samples(20, config.modes, seed);
        Gramian g = assemble_gramian(table, B, grid);
        CriterionTable crit =
            approx_criterion(g, config.lambda_sequence, samples, config.p, system);
        out.rows.push_back({command, "criterion_final", crit.rows.back().crit, 1e-3,
                            crit.rows.back().crit <= 1e-3});
        out.rows.push_back({command, "criterion_monotone", crit.monotone ? 1.0 : 0.0, 1.0,
                            crit.monotone});
        // finite-horizon variant: rebuild the Gramian on [0, t] per horizon
        for (double frac : {0.25, 0.5, 0.75, 1.0}) {
            const double t_h = frac * config.T;
            TimeGrid gh = TimeGrid::uniform(t_h, grid.steps);
            ResolventTable th = build_resolvent_table(kernel, system, gh.nodes,
                                                      ResolventRoute::MLSeries, 1e-10);
            Gramian ghm = assemble_gramian(th, B, gh);
            CriterionTable ch =
                approx_criterion(ghm, config.lambda_sequence, samples, config.p, system);
            std::ostringstream name;
            name << "criterion_final_tfrac" << frac;
            out.rows.push_back({command, name.str(), ch.rows.back().crit, 1e-3,
                                ch.rows.back().crit <= 1e-3});
        }
        if (config.formats != "json")
            maybe_write(out.artifacts, dir, "criterion.csv", criterion_csv(crit));
        return out;
    }

    if (command == "feasibility") {
        SteeringProblem problem;
        problem.zeta = config.zeta.build(config.modes);
        problem.zeta1 = config.zeta1.build(config.modes);
        problem.T = config.T;
        problem.duality_p = config.p;
        problem.nonlinearity = config.nonlinearity();
        AssumptionFResult af = assumption_f_check(table, B, grid);
        out.rows.push_back({command, "assumption_f_applicable", af.applicable ? 1.0 : 0.0, 1.0,
                            true});
        if (af.applicable) {
            out.rows.push_back({command, "assumption_f_l_tilde", af.l_tilde, 1.0 - 1e-10,
                                af.l_tilde >= 1.0 - 1e-10});
            out.rows.push_back({command, "assumption_f_gramian_match", af.gramian_match_error,
                                1e-10, af.gramian_match_error <= 1e-10});
        }
        const double l_tilde = af.applicable ? af.l_tilde : 2.0;
        // |u|_{L2} of the synthesized linear control at the smallest lambda
        Gramian g = assemble_gramian(table, B, grid);
        Vector k = target_offset(table, problem.zeta, problem.zeta1, Matrix(), grid);
        ControlSignal u = synthesize_control(table, B, g, config.lambda_sequence.back(), k, grid,
                                             config.p, system);
        FeasibilityReport rep = feasibility_check(problem, table.sup_norm, B.operator_norm,
                                                  l_tilde, std::sqrt(u.energy), system);
        // feasibility findings are reported, not asserted (infeasibility of the
        // radius condition is a legitimate outcome, see the exp-decay case)
        out.rows.push_back({command, "bounded_r_min", rep.bounded_r_min, 0.0, true});
        out.rows.push_back({command, "radius_feasible", rep.radius_feasible ? 1.0 : 0.0, 0.0, true});
        out.rows.push_back({command, "radius_r_min", rep.radius_r_min, 0.0, true});
        if (problem.nonlinearity.kind == Nonlinearity::Kind::ExpDecayLinear) {
            out.rows.push_back({command, "exp_integral_correct", rep.exp_integral_correct, 0.0,
                                true});
            out.rows.push_back({command, "exp_integral_displayed", rep.exp_integral_displayed, 0.0,
                                true});
            out.rows.push_back({command, "decay_probe_lhs", rep.decay_probe_lhs, 0.5, rep.decay_probe_ok});
        }
        return out;
    }

    if (command == "decay-report") {
        DecayReport rep = decay_diagnostics(table, kernel, system);
        out.rows.push_back({command, "decay_violations", double(rep.violation_count), 0.0, true});
        for (const auto& d : rep.derivatives) {
            out.rows.push_back({command, "deriv_rel_dev_m" + std::to_string(d.mode),
                                d.rel_deviation, 0.05, d.rel_deviation <= 0.05});
        }
        if (config.formats != "json") {
            std::string csv = "m,t,lhs,rhs,violation\n";
            for (const auto& r : rep.rows) {
                csv += std::to_string(r.mode);
                csv += ',';
                csv += format_double(r.t);
                csv += ',';
                csv += format_double(r.lhs);
                csv += ',';
                csv += format_double(r.rhs);
                csv += ',';
                csv += r.violation ? "true" : "false";
                csv += '\n';
            }
            maybe_write(out.artifacts, dir, "decay.csv", csv);
        }
        return out;
    }

    throw ValidationError("run_scenario: unknown command '" + command + "'");
}

}  // namespace memctrl
