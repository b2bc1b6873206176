// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "memctrl/report.hpp"
#include "memctrl/serialize.hpp"

using namespace memctrl;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %-34s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!pass) ++g_failures;
}

std::vector<double> uniform_times(double T, int nodes) {
    std::vector<double> t(nodes);
    for (int i = 0; i < nodes; ++i) t[i] = T * i / (nodes - 1);
    t[nodes - 1] = T;
    return t;
}

std::string fmt(double v) { return format_double(v); }

const MemoryKernel kAccKernel{1.0, 0.5, 0.5};

// 1. Resolvent oracle triangle
void criterion1() {
    SpectralSystem sys(5, 64, 2.0);
    auto times = uniform_times(1.0, 33);
    auto ml = build_resolvent_table(kAccKernel, sys, times, ResolventRoute::MLSeries, 1e-10);
    auto ct = build_resolvent_table(kAccKernel, sys, times, ResolventRoute::Contour, 1e-10);
    auto vt = build_resolvent_table(kAccKernel, sys, times, ResolventRoute::Volterra, 1e-10);
    double rel = 0.0, vabs = 0.0;
    int series_entries = 0;
    for (int m = 0; m < 5; ++m)
        for (int k = 1; k < 33; ++k) {
            if (ml.entry_routes[m][k] == ResolventRoute::MLSeries) ++series_entries;
            rel = std::max(rel, std::abs(ml.values(m, k) - ct.values(m, k)) /
                                    std::max(1e-30, std::abs(ct.values(m, k))));
            vabs = std::max(vabs, std::abs(vt.values(m, k) - ml.values(m, k)));
        }
    const bool full_series = series_entries == 5 * 32;
    report(1, "resolvent oracle triangle", rel <= 1e-6 && vabs <= 1e-4 && full_series,
           "|ML-Contour|_rel=" + fmt(rel) + " (tol 1e-6), |Volterra-ML|_abs=" + fmt(vabs) +
               " (tol 1e-4), series entries " + std::to_string(series_entries) + "/160");
}

// 2. Resolvent-equation residual and refinement order
void criterion2() {
    SpectralSystem sys(3, 64, 2.0);
    double res[3][3];
    int idx = 0;
    for (int nodes : {65, 129, 257}) {
        auto t = build_resolvent_table(kAccKernel, sys, uniform_times(1.0, nodes),
                                       ResolventRoute::MLSeries, 1e-10);
        for (int m = 0; m < 3; ++m) res[m][idx] = verify_resolvent_equation(t, m);
        ++idx;
    }
    bool pass = true;
    std::string detail;
    for (int m = 0; m < 3; ++m) {
        const double order = std::log2(res[m][0] / res[m][2]) / 2.0;
        pass = pass && res[m][1] <= 1e-4 && order >= 1.8;
        detail += "m" + std::to_string(m + 1) + ": res129=" + fmt(res[m][1]) +
                  " order=" + fmt(order) + (m < 2 ? "; " : "");
    }
    report(2, "resolvent equation residual", pass, detail + " (tol 1e-4, order >= 1.8)");
}

// 3. Degenerate reduction alpha -> 0
void criterion3() {
    MemoryKernel tiny(1e-12, 0.5, 0.5);
    SpectralSystem sys(5, 64, 2.0);
    auto times = uniform_times(1.0, 33);
    auto ml = build_resolvent_table(tiny, sys, times, ResolventRoute::MLSeries, 1e-12);
    auto ct = build_resolvent_table(tiny, sys, times, ResolventRoute::Contour, 1e-12);
    // The relative check runs where the genuine O(alpha) memory tail stays
    // below the tolerance: for lam t > ~10 the alpha = 1e-12 correction
    // exceeds 1e-8 relative to e^{-lam t} (the exact solution differs from
    // the exponential by more than the tolerance there), so those entries
    // carry a strict absolute check instead.
    double worst_ml = 0.0, worst_ct = 0.0, worst_abs = 0.0;
    for (int m = 0; m < 5; ++m) {
        const double lam = sys.eigenvalue(m);
        for (int k = 0; k < 33; ++k) {
            const double exact = std::exp(-lam * times[k]);
            if (lam * times[k] <= 10.0) {
                worst_ml = std::max(worst_ml, std::abs(ml.values(m, k) - exact) / exact);
                worst_ct = std::max(worst_ct, std::abs(ct.values(m, k) - exact) / exact);
            }
            worst_abs = std::max(worst_abs, std::abs(ml.values(m, k) - exact));
            worst_abs = std::max(worst_abs, std::abs(ct.values(m, k) - exact));
        }
    }
    // Volterra at measured order >= 1.8 against the exponential
    double err[3];
    int idx = 0;
    for (int K : {512, 1024, 2048}) {
        TimeGrid grid = TimeGrid::uniform(1.0, K);
        std::vector<double> zero(grid.node_count(), 0.0);
        auto w = step_linear_mode(tiny, 1.0, grid, zero, 1.0);
        err[idx++] = std::abs(w.back() - std::exp(-1.0));
    }
    const double order = std::log2(err[0] / err[2]) / 2.0;
    report(3, "degenerate reduction (alpha->0)",
           worst_ml <= 1e-8 && worst_ct <= 1e-8 && worst_abs <= 2e-11 && order >= 1.8,
           "ML rel=" + fmt(worst_ml) + ", Contour rel=" + fmt(worst_ct) +
               " (tol 1e-8, lam t <= 10), abs=" + fmt(worst_abs) +
               " (tol 2e-11, all), Volterra order=" + fmt(order) + " (>= 1.8)");
}

// 4. Paper bound |G(t)| <= 1
void criterion4() {
    SpectralSystem sys(8, 64, 2.0);
    double worst = 0.0;
    for (auto route : {ResolventRoute::MLSeries, ResolventRoute::Contour}) {
        auto t = build_resolvent_table(kAccKernel, sys, uniform_times(1.0, 33), route, 1e-10);
        worst = std::max(worst, t.sup_norm);
        auto t257 = build_resolvent_table(kAccKernel, sys, uniform_times(1.0, 257), route, 1e-10);
        worst = std::max(worst, t257.sup_norm);
    }
    report(4, "sup-norm bound |G(t)| <= 1", worst <= 1.0 + 1e-8,
           "max sup_norm=" + fmt(worst) + " (tol 1 + 1e-8)");
}

// 5. Regularized-resolvent contraction bound
void criterion5() {
    TimeGrid grid = TimeGrid::uniform(1.0, 256);
    bool pass = true;
    double worst_ratio = 0.0;
    for (double p : {2.0, 4.0}) {
        SpectralSystem sys(8, 513, p);
        auto table = build_resolvent_table(kAccKernel, sys, grid.nodes, ResolventRoute::MLSeries,
                                           1e-10);
        auto B = control_operator_matrix(ControlKind::Identity, sys);
        Gramian g = assemble_gramian(table, B, grid);
        std::mt19937_64 gen(2026);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double lam : {1.0, 0.1, 0.01}) {
            for (int i = 0; i < 100; ++i) {
                Vector y(8);
                for (int j = 0; j < 8; ++j) y[j] = normal(gen);
                Vector z = regularized_resolvent(g, lam, y, p, sys);
                const double ratio =
                    lam * sys.lp_norm_spectral(z, p) / sys.lp_norm_spectral(y, p);
                worst_ratio = std::max(worst_ratio, ratio);
                if (ratio > 1.0 + 1e-12) pass = false;
            }
        }
    }
    report(5, "contraction bound |lam R y| <= |y|", pass,
           "600 draws, worst |lam z|/|y|=" + fmt(worst_ratio) + " (tol 1 + 1e-12)");
}

SteeringProblem acceptance_problem() {
    SteeringProblem prob;
    prob.zeta = Vector::Unit(8, 0);
    prob.zeta1 = Vector(8);
    for (int m = 0; m < 8; ++m) prob.zeta1[m] = 1.0 / (m + 1);
    prob.T = 1.0;
    return prob;
}

const std::vector<double> kLambdaSweep = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

// 6. Linear approximate controllability
void criterion6() {
    SpectralSystem sys(8, 513, 2.0);
    TimeGrid grid = TimeGrid::uniform(1.0, 256);
    auto table = build_resolvent_table(kAccKernel, sys, grid.nodes, ResolventRoute::MLSeries, 1e-10);
    auto B = control_operator_matrix(ControlKind::Identity, sys);
    SteeringProblem prob = acceptance_problem();
    const double z1 = prob.zeta1.norm();
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true, identity_ok = true;
    double final_miss = 0.0, worst_identity = 0.0;
    for (double lam : kLambdaSweep) {
        prob.lambda_reg = lam;
        auto r = closed_loop_picard(prob, sys, kAccKernel, table, B, grid, 1e-8, 50);
        const double miss = r.terminal_miss / z1;
        if (miss > prev + 1e-10) monotone = false;
        prev = miss;
        final_miss = miss;
        worst_identity = std::max(worst_identity, r.terminal_identity_residual);
        if (r.terminal_identity_residual > 1e-6 * (1.0 + z1)) identity_ok = false;
    }
    report(6, "linear approximate controllability",
           final_miss <= 1e-3 && monotone && identity_ok,
           "miss_rel(1e-6)=" + fmt(final_miss) + " (tol 1e-3), monotone=" +
               (monotone ? "yes" : "NO") + ", identity_max=" + fmt(worst_identity));
}

// 7. Optimality vs discrete normal-equations oracle
void criterion7() {
    SpectralSystem sys(8, 513, 2.0);
    const int K = 128, M = 8;
    TimeGrid grid = TimeGrid::uniform(1.0, K);
    auto table = build_resolvent_table(kAccKernel, sys, grid.nodes, ResolventRoute::MLSeries, 1e-10);
    auto B = control_operator_matrix(ControlKind::Identity, sys);
    Gramian g = assemble_gramian(table, B, grid);
    SteeringProblem prob = acceptance_problem();
    const double lam_reg = 1e-3;
    Vector kvec = target_offset(table, prob.zeta, prob.zeta1, Matrix(), grid);
    ControlSignal u = synthesize_control(table, B, g, lam_reg, kvec, grid, 2.0, sys);
    Trajectory traj = mild_quadrature(table, prob.zeta, B.matrix * u.values, grid);
    const double cost =
        cost_functional(traj.states.col(K), prob.zeta1, u, lam_reg, 2.0, sys);

    const double h = 1.0 / K;
    auto tau = [&](int j) { return (j == 0 || j == K) ? h / 2 : h; };
    const int N = (K + 1) * M;
    Matrix A = Matrix::Zero(N, N);
    Vector rhs = Vector::Zero(N);
    std::vector<Matrix> SB(K + 1);
    for (int j = 0; j <= K; ++j)
        SB[j] = table.values.col(K - j).asDiagonal().toDenseMatrix() * B.matrix;
    for (int a = 0; a <= K; ++a) {
        for (int b = 0; b <= K; ++b)
            A.block(a * M, b * M, M, M) = tau(a) * tau(b) * SB[a].transpose() * SB[b];
        A.block(a * M, a * M, M, M) += lam_reg * tau(a) * Matrix::Identity(M, M);
        rhs.segment(a * M, M) = tau(a) * SB[a].transpose() * kvec;
    }
    Vector U = Eigen::LDLT<Matrix>(A).solve(rhs);
    ControlSignal u_oracle;
    u_oracle.grid = grid;
    u_oracle.values.resize(M, K + 1);
    double energy = 0.0;
    for (int j = 0; j <= K; ++j) {
        u_oracle.values.col(j) = U.segment(j * M, M);
        energy += tau(j) * u_oracle.values.col(j).squaredNorm();
    }
    u_oracle.energy = energy;
    Trajectory to = mild_quadrature(table, prob.zeta, B.matrix * u_oracle.values, grid);
    const double cost_oracle =
        cost_functional(to.states.col(K), prob.zeta1, u_oracle, lam_reg, 2.0, sys);
    const double rel = std::abs(cost - cost_oracle) / cost_oracle;

    std::mt19937_64 gen(2027);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst_drop = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Matrix delta(M, K + 1);
        for (int j = 0; j <= K; ++j)
            for (int m = 0; m < M; ++m) delta(m, j) = normal(gen);
        double denergy = 0.0;
        for (int j = 0; j <= K; ++j) denergy += tau(j) * delta.col(j).squaredNorm();
        delta *= std::sqrt(1e-2 / denergy);
        ControlSignal up;
        up.grid = grid;
        up.values = u.values + delta;
        double pe = 0.0;
        for (int j = 0; j <= K; ++j) pe += tau(j) * up.values.col(j).squaredNorm();
        up.energy = pe;
        Trajectory tp = mild_quadrature(table, prob.zeta, B.matrix * up.values, grid);
        const double cp = cost_functional(tp.states.col(K), prob.zeta1, up, lam_reg, 2.0, sys);
        worst_drop = std::min(worst_drop, cp - cost);
    }
    report(7, "optimality of the synthesized control",
           rel <= 1e-6 && worst_drop >= -1e-10,
           "|cost-oracle|_rel=" + fmt(rel) + " (tol 1e-6), worst perturbation drop=" +
               fmt(worst_drop) + " (tol -1e-10)");
}

// 8. Semilinear steering
void criterion8() {
    SpectralSystem sys(8, 513, 2.0);
    TimeGrid grid = TimeGrid::uniform(1.0, 256);
    auto table = build_resolvent_table(kAccKernel, sys, grid.nodes, ResolventRoute::MLSeries, 1e-10);
    auto B = control_operator_matrix(ControlKind::Identity, sys);
    bool pass = true;
    std::string detail;
    const Nonlinearity cases[] = {Nonlinearity::sine_cosine(0.1, 1.0),
                                  Nonlinearity::exp_decay_linear(0.05)};
    const char* names[] = {"sin-cos", "exp-decay"};
    for (int c = 0; c < 2; ++c) {
        SteeringProblem prob = acceptance_problem();
        prob.nonlinearity = cases[c];
        const double z1 = prob.zeta1.norm();
        double prev = std::numeric_limits<double>::infinity();
        bool monotone = true;
        int worst_iters = 0;
        double final_miss = 0.0;
        for (double lam : kLambdaSweep) {
            prob.lambda_reg = lam;
            auto r = closed_loop_picard(prob, sys, kAccKernel, table, B, grid, 1e-8, 50);
            worst_iters = std::max(worst_iters, r.picard_iterations);
            const double miss = r.terminal_miss / z1;
            if (miss > prev + 1e-8) monotone = false;
            prev = miss;
            final_miss = miss;
        }
        pass = pass && final_miss <= 5e-3 && monotone && worst_iters <= 50;
        detail += std::string(names[c]) + ": miss=" + fmt(final_miss) + " iters<=" +
                  std::to_string(worst_iters) + (monotone ? " mono" : " NONMONO") +
                  (c == 0 ? "; " : "");
    }
    report(8, "semilinear steering", pass, detail + " (tol 5e-3, iters <= 50)");
}

// 9. Null-direction detection, four consistent signals
void criterion9() {
    SpectralSystem sys(8, 513, 2.0);
    TimeGrid grid = TimeGrid::uniform(1.0, 256);
    auto table = build_resolvent_table(kAccKernel, sys, grid.nodes, ResolventRoute::MLSeries, 1e-10);
    auto B = identity_mode_killed(sys, 2);

    auto rank = rank_condition(sys.eigenvalues(), B.matrix, 8);
    const bool rank_ok = rank.rank == 7;

    Vector e2 = Vector::Unit(8, 1);
    auto adj = adjoint_vanishing_test(table, B, e2, grid, 1e-10);
    const bool adj_ok =
        adj.verdict == AdjointVerdict::Vanishes && adj.gramian_quadratic <= 1e-12;

    Gramian g = assemble_gramian(table, B, grid);
    auto crit = approx_criterion(g, kLambdaSweep, {e2}, 2.0, sys);
    bool crit_ok = true;
    for (const auto& row : crit.rows) crit_ok = crit_ok && std::abs(row.crit - 1.0) <= 1e-9;

    SteeringProblem prob;
    prob.zeta = Vector::Zero(8);
    prob.zeta1 = e2;
    prob.T = 1.0;
    bool steer_ok = true;
    double min_miss = 1.0;
    for (double lam : kLambdaSweep) {
        prob.lambda_reg = lam;
        auto r = closed_loop_picard(prob, sys, kAccKernel, table, B, grid, 1e-8, 50);
        min_miss = std::min(min_miss, r.terminal_miss / prob.zeta1.norm());
        if (r.terminal_miss / prob.zeta1.norm() < 0.99) steer_ok = false;
    }
    report(9, "null-direction detection", rank_ok && adj_ok && crit_ok && steer_ok,
           "rank=" + std::to_string(rank.rank) + "/8, adjoint=" +
               (adj_ok ? "vanishes" : "NO") + ", criterion pinned at 1=" +
               (crit_ok ? "yes" : "NO") + ", min miss=" + fmt(min_miss) + " (>= 0.99)");
}

// 10. Duality map identities
void criterion10() {
    bool pass = true;
    double worst = 0.0;
    std::mt19937_64 gen(2028);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double p : {2.0, 3.0, 4.0}) {
        SpectralSystem sys(8, 513, p);
        for (int trial = 0; trial < 20; ++trial) {
            Vector w(sys.grid_points());
            for (int i = 0; i < w.size(); ++i) w[i] = normal(gen);
            Vector jw = duality_map(w, p, sys);
            if (p == 2.0) {
                if (std::memcmp(w.data(), jw.data(), sizeof(double) * w.size()) != 0) pass = false;
                continue;
            }
            const double np = sys.lp_norm(w, p);
            const double q = p / (p - 1.0);
            const double pair_err = std::abs(sys.pairing(jw, w) - np * np) / (np * np);
            const double norm_err = std::abs(sys.lp_norm(jw, q) - np) / np;
            worst = std::max({worst, pair_err, norm_err});
            if (pair_err > 1e-8 || norm_err > 1e-8) pass = false;
        }
    }
    report(10, "duality map pairing identities", pass,
           "p in {2,3,4}, 20 draws each; worst rel err=" + fmt(worst) +
               " (tol 1e-8; p=2 bitwise)");
}

// 11. Feasibility probes
void criterion11() {
    SpectralSystem sys(8, 513, 2.0);
    SteeringProblem prob;
    prob.zeta = Vector::Zero(8);
    prob.zeta1 = Vector::Zero(8);
    prob.T = 1.0;
    prob.nonlinearity = Nonlinearity::exp_decay_linear(0.05);
    auto rep = feasibility_check(prob, 1.0, 1.0, 2.0, 0.0, sys);
    const double mu = 0.05;
    const double expected =
        mu * std::numbers::pi * (1.0 - std::exp(-mu)) * (1.0 + 2.0 * 2.0);
    const bool lhs_ok = std::abs(rep.decay_probe_lhs - expected) <= 1e-14 && rep.decay_probe_lhs <= 0.5;
    const double factor = rep.exp_integral_displayed / rep.exp_integral_correct;
    const bool factor_ok = std::abs(factor - mu * mu) <= 1e-12 * mu * mu;
    const bool both_reported =
        rep.exp_integral_correct > 0.0 && rep.exp_integral_displayed > 0.0;
    report(11, "feasibility probes", lhs_ok && factor_ok && both_reported,
           "decay probe lhs=" + fmt(rep.decay_probe_lhs) + " (<= 0.5), displayed/correct=" + fmt(factor) +
               " (= mu^2); radius condition with the corrected integral: " +
               (rep.radius_feasible ? "feasible, r_min=" + fmt(rep.radius_r_min)
                                 : "infeasible (slope " + fmt(rep.radius_slope) + " >= 1)"));
}

// 12. Determinism of the experiment runner
void criterion12() {
    namespace fs = std::filesystem;
    ScenarioConfig config;
    config.modes = 8;
    config.steps = 128;
    config.formats = "csv";
    const std::vector<std::string> commands = {"resolvent-validate", "steer-linear", "criterion",
                                               "rank-check"};
    bool pass = true;
    std::string detail;
    for (const auto& cmd : commands) {
        std::string csv[2];
        for (int run = 0; run < 2; ++run) {
            config.directory = "acceptance_out/run" + std::to_string(run);
            auto outcome = run_scenario(config, cmd, 424242);
            if (!outcome.all_pass()) {
                pass = false;
                detail += cmd + " rows fail; ";
            }
            csv[run] = report_csv(outcome.rows);
            for (const auto& f : outcome.artifacts) csv[run] += read_file(f);
        }
        if (csv[0] != csv[1]) {
            pass = false;
            detail += cmd + " differs; ";
        }
    }
    fs::remove_all("acceptance_out");
    report(12, "determinism (bit-identical CSV)", pass,
           pass ? "4 commands x 2 runs, byte-identical" : detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite: kernel (alpha,beta,nu) = (1, 0.5, 0.5), M <= 8, desk scale\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    criterion12();
    std::printf("%d of 12 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
