#include "memctrl/control.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numbers>

namespace memctrl {

namespace {

// Composite Simpson weights on n points (n odd).
Vector simpson_weights(int n, double length) {
    Vector w = Vector::Zero(n);
    const double h = length / (n - 1);
    for (int j = 0; j + 2 < n; j += 2) {
        w[j] += h / 3.0;
        w[j + 1] += 4.0 * h / 3.0;
        w[j + 2] += h / 3.0;
    }
    return w;
}

// Composite Simpson over the index range [lo, hi] of uniformly sampled f;
// odd panel counts end with a 3/8 block, a single panel falls back to trapezoid.
double simpson_range(const std::vector<double>& f, int lo, int hi, double h) {
    const int panels = hi - lo;
    if (panels <= 0) return 0.0;
    if (panels == 1) return 0.5 * h * (f[lo] + f[hi]);
    double acc = 0.0;
    int even_end = (panels % 2 == 0) ? hi : hi - 3;
    for (int j = lo; j + 2 <= even_end; j += 2)
        acc += h / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
    if (panels % 2 != 0)
        acc += 3.0 * h / 8.0 * (f[hi - 3] + 3.0 * f[hi - 2] + 3.0 * f[hi - 1] + f[hi]);
    return acc;
}

Matrix kernel_operator_matrix(const SpectralSystem& system, double (*G)(double, double)) {
    const double pi = std::numbers::pi;
    const int M = system.modes();
    Matrix prev;
    for (int n = 129;; n = 2 * (n - 1) + 1) {
        const double h = pi / (n - 1);
        Vector w = simpson_weights(n, pi);
        std::vector<double> xi(n);
        for (int i = 0; i < n; ++i) xi[i] = pi * i / (n - 1);
        Matrix phi(n, M);
        const double scale = std::sqrt(2.0 / pi);
        for (int m = 0; m < M; ++m)
            for (int i = 0; i < n; ++i) phi(i, m) = scale * std::sin((m + 1) * xi[i]);
        // inner integral C(i, m) = \int G(zeta, xi_i) phi_m(zeta) dzeta, split at
        // the diagonal where the kernels have a derivative kink (plain Simpson
        // across it would stall at O(h^2))
        Matrix C(n, M);
        std::vector<double> grow(n), integrand(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) grow[j] = G(xi[j], xi[i]);
            for (int m = 0; m < M; ++m) {
                for (int j = 0; j < n; ++j) integrand[j] = grow[j] * phi(j, m);
                C(i, m) = simpson_range(integrand, 0, i, h) + simpson_range(integrand, i, n - 1, h);
            }
        }
        Matrix B = phi.transpose() * w.asDiagonal() * C;
        if (prev.size() != 0 && (B - prev).cwiseAbs().maxCoeff() <= 1e-10) return B;
        prev = B;
        if (n > 4200)
            throw QuadratureNotConverged("control_operator_matrix: Simpson refinement stalled");
    }
}

double paper_kernel(double zeta, double xi) {
    return zeta <= xi ? xi * (std::numbers::pi - zeta) : (std::numbers::pi - xi) * zeta;
}

double greens_kernel(double zeta, double xi) {
    return std::min(zeta, xi) * (std::numbers::pi - std::max(zeta, xi));
}

double spectral_norm(const Matrix& A) {
    return A.jacobiSvd().singularValues()(0);
}

Vector trapezoid_weights(const TimeGrid& grid) {
    const int n = grid.node_count();
    Vector tau(n);
    const double h = grid.T / grid.steps;
    for (int k = 0; k < n; ++k) tau[k] = (k == 0 || k == n - 1) ? 0.5 * h : h;
    return tau;
}

void require_uniform_match(const ResolventTable& table, const TimeGrid& grid,
                           const char* where) {
    if (grid.kind != GridKind::Uniform) throw GridIncompatible(std::string(where) + ": uniform grid required");
    if (table.time_count() != grid.node_count())
        throw GridIncompatible(std::string(where) + ": table/grid size mismatch");
    for (int k = 0; k < grid.node_count(); ++k)
        if (std::abs(table.times[k] - grid.nodes[k]) > 1e-10 * std::max(1.0, grid.T))
            throw GridIncompatible(std::string(where) + ": table times differ from grid");
}

/// J in spectral coordinates: transform, pointwise map, transform back.
Vector duality_spectral(const Vector& z, double p, const SpectralSystem& system) {
    if (p == 2.0) return z;
    return system.to_spectral(duality_map(system.to_grid(z), p, system));
}

}  // namespace

ControlOperator control_operator_matrix(ControlKind kind, const SpectralSystem& system) {
    ControlOperator op;
    op.kind = kind;
    switch (kind) {
        case ControlKind::Identity:
            op.matrix = Matrix::Identity(system.modes(), system.modes());
            op.operator_norm = 1.0;
            return op;
        case ControlKind::PaperKernel:
            op.matrix = kernel_operator_matrix(system, &paper_kernel);
            break;
        case ControlKind::GreensDiagonal:
            op.matrix = kernel_operator_matrix(system, &greens_kernel);
            break;
    }
    op.operator_norm = spectral_norm(op.matrix);
    if (!(op.operator_norm > 0.0))
        throw ValidationError("control_operator_matrix: B must be nonzero (one-one kinds)");
    return op;
}

ControlOperator identity_mode_killed(const SpectralSystem& system, int dead_mode) {
    if (dead_mode < 1 || dead_mode > system.modes())
        throw ValidationError("identity_mode_killed: dead_mode out of range");
    ControlOperator op;
    op.kind = ControlKind::Identity;
    op.matrix = Matrix::Identity(system.modes(), system.modes());
    op.matrix(dead_mode - 1, dead_mode - 1) = 0.0;
    op.operator_norm = system.modes() > 1 ? 1.0 : 0.0;
    return op;
}

Gramian assemble_gramian(const ResolventTable& table, const ControlOperator& B,
                         const TimeGrid& grid) {
    require_uniform_match(table, grid, "assemble_gramian");
    const int M = table.modes();
    if (B.matrix.rows() != M) throw DimensionMismatch("assemble_gramian: B rows != modes");
    const Matrix BBt = B.matrix * B.matrix.transpose();
    const Vector tau = trapezoid_weights(grid);
    const int K = grid.steps;

    Matrix Y = Matrix::Zero(M, M);
    for (int k = 0; k <= K; ++k) {
        // s(T - t_k) = column K - k of the table
        const auto s = table.values.col(K - k);
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < M; ++n) Y(m, n) += tau[k] * s[m] * BBt(m, n) * s[n];
    }
    Y = 0.5 * (Y + Y.transpose());

    Gramian g;
    g.matrix = Y;
    g.horizon = grid.T;
    g.quadrature_steps = K;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Y);
    g.min_eigenvalue = eig.eigenvalues().minCoeff();
    if (g.min_eigenvalue < -1e-10)
        throw ValidationError("assemble_gramian: Gramian not PSD within tolerance");
    return g;
}

Vector regularized_resolvent(const Gramian& gramian, double lambda_reg, const Vector& y, double p,
                             const SpectralSystem& system) {
    if (!(lambda_reg > 0.0)) throw ValidationError("regularized_resolvent: lambda_reg must be > 0");
    if (y.size() != gramian.matrix.rows())
        throw DimensionMismatch("regularized_resolvent: y length mismatch");
    const int M = static_cast<int>(y.size());
    Vector z;
    if (p == 2.0) {
        Matrix A = gramian.matrix;
        A.diagonal().array() += lambda_reg;
        z = Eigen::LDLT<Matrix>(A).solve(y);
    } else {
        const double omega = 1.0 / (lambda_reg + spectral_norm(gramian.matrix));
        z = Vector::Zero(M);
        double res_norm = 0.0;
        bool done = false;
        double stall_best = std::numeric_limits<double>::infinity();
        int stall = 0;
        for (int it = 0; it < 10000; ++it) {
            Vector residual = y - lambda_reg * z - gramian.matrix * duality_spectral(z, p, system);
            res_norm = residual.norm();
            if (res_norm <= 1e-10 * (1.0 + y.norm())) {
                done = true;
                break;
            }
            if (res_norm < stall_best * (1.0 - 1e-12)) {
                stall_best = res_norm;
                stall = 0;
            } else if (++stall > 200) {
                break;
            }
            z += omega * residual;
        }
        if (!done)
            throw FixedPointDiverged("regularized_resolvent: fixed point stagnated", res_norm);
    }
    // contraction bound |lam z| <= |y| in the configured norm, checked always
    const double zl = lambda_reg * system.lp_norm_spectral(z, p);
    const double yl = system.lp_norm_spectral(y, p);
    if (zl > yl * (1.0 + 1e-12) + 1e-300)
        throw std::logic_error("regularized_resolvent: |lam z| <= |y| bound violated");
    return z;
}

Vector target_offset(const ResolventTable& table, const Vector& zeta, const Vector& zeta1,
                     const Matrix& f_values, const TimeGrid& grid) {
    require_uniform_match(table, grid, "target_offset");
    const int M = table.modes();
    if (zeta.size() != M || zeta1.size() != M)
        throw DimensionMismatch("target_offset: state length mismatch");
    const int K = grid.steps;
    Vector k_vec = zeta1 - apply_resolvent(table, K, zeta);
    if (f_values.size() == 0 || f_values.isZero(0.0)) return k_vec;
    if (f_values.rows() != M || f_values.cols() != K + 1)
        throw DimensionMismatch("target_offset: f_values shape mismatch");
    const Vector tau = trapezoid_weights(grid);
    for (int j = 0; j <= K; ++j)
        k_vec -= tau[j] * table.values.col(K - j).cwiseProduct(f_values.col(j));
    return k_vec;
}

ControlSignal synthesize_control(const ResolventTable& table, const ControlOperator& B,
                                 const Gramian& gramian, double lambda_reg, const Vector& k,
                                 const TimeGrid& grid, double p, const SpectralSystem& system) {
    require_uniform_match(table, grid, "synthesize_control");
    const Vector z = regularized_resolvent(gramian, lambda_reg, k, p, system);
    const Vector d = duality_spectral(z, p, system);

    ControlSignal u;
    u.grid = grid;
    const int K = grid.steps;
    u.values.resize(B.matrix.cols(), K + 1);
    for (int j = 0; j <= K; ++j)
        u.values.col(j) = B.matrix.transpose() * table.values.col(K - j).cwiseProduct(d);
    const Vector tau = trapezoid_weights(grid);
    double energy = 0.0;
    for (int j = 0; j <= K; ++j) energy += tau[j] * u.values.col(j).squaredNorm();
    u.energy = energy;
    return u;
}

double cost_functional(const Vector& w_T, const Vector& zeta1, const ControlSignal& u,
                       double lambda_reg, double p, const SpectralSystem& system,
                       double* terminal_part, double* energy_part) {
    if (w_T.size() != zeta1.size()) throw DimensionMismatch("cost_functional: state size mismatch");
    const double miss = system.lp_norm_spectral(w_T - zeta1, p);
    const double term = miss * miss;
    const double en = lambda_reg * u.energy;
    if (terminal_part) *terminal_part = term;
    if (energy_part) *energy_part = en;
    return term + en;
}

SteeringResult closed_loop_picard(const SteeringProblem& problem, const SpectralSystem& system,
                                  const MemoryKernel& kernel, const ResolventTable& table,
                                  const ControlOperator& B, const TimeGrid& grid, double tol,
                                  int max_iter) {
    if (kernel.alpha() != table.kernel.alpha() || kernel.beta() != table.kernel.beta() ||
        kernel.nu() != table.kernel.nu())
        throw ValidationError("closed_loop_picard: table was built for a different kernel");
    if (!(tol > 0.0) || max_iter < 1)
        throw ValidationError("closed_loop_picard: tol > 0 and max_iter >= 1 required");
    require_uniform_match(table, grid, "closed_loop_picard");
    const int M = table.modes();
    const int nodes = grid.node_count();
    const double p = problem.duality_p;
    const Nonlinearity& f = problem.nonlinearity;

    Gramian gramian = assemble_gramian(table, B, grid);

    auto f_values_of = [&](const Matrix& states) {
        Matrix fv = Matrix::Zero(M, nodes);
        if (!f.is_zero())
            for (int j = 0; j < nodes; ++j) fv.col(j) = f.apply(grid.nodes[j], states.col(j), system);
        return fv;
    };

    // start from the linear trajectory: u from l(w) = zeta1 - G(T) zeta
    Vector k_vec = target_offset(table, problem.zeta, problem.zeta1, Matrix(), grid);
    ControlSignal u = synthesize_control(table, B, gramian, problem.lambda_reg, k_vec, grid, p, system);
    Trajectory traj = mild_quadrature(table, problem.zeta, B.matrix * u.values, grid);

    SteeringResult result;
    int iters = 1;
    if (!f.is_zero()) {
        for (; iters <= max_iter; ++iters) {
            Matrix fv = f_values_of(traj.states);
            k_vec = target_offset(table, problem.zeta, problem.zeta1, fv, grid);
            u = synthesize_control(table, B, gramian, problem.lambda_reg, k_vec, grid, p, system);
            Trajectory next = mild_quadrature(table, problem.zeta, B.matrix * u.values + fv, grid);
            double update = 0.0, scale = 0.0;
            for (int j = 0; j < nodes; ++j) {
                update = std::max(update, (next.states.col(j) - traj.states.col(j)).norm());
                scale = std::max(scale, next.states.col(j).norm());
            }
            result.picard_residuals.push_back(update);
            traj = std::move(next);
            if (update <= tol * (1.0 + scale)) break;
        }
        if (iters > max_iter)
            throw PicardNotConverged("closed_loop_picard: no fixed point within max_iter", max_iter,
                                     result.picard_residuals.empty() ? 0.0
                                                                     : result.picard_residuals.back());
    }

    // converged diagnostics: the terminal identity at the fixed point
    Matrix fv = f_values_of(traj.states);
    k_vec = target_offset(table, problem.zeta, problem.zeta1, fv, grid);
    Vector z = regularized_resolvent(gramian, problem.lambda_reg, k_vec, p, system);
    const Vector w_T = traj.states.col(nodes - 1);
    result.trajectory = std::move(traj);
    result.control = u;
    result.picard_iterations = iters;
    result.terminal_miss = system.lp_norm_spectral(w_T - problem.zeta1, p);
    result.terminal_identity_residual =
        system.lp_norm_spectral(w_T - problem.zeta1 + problem.lambda_reg * z, p);
    result.cost = cost_functional(w_T, problem.zeta1, result.control, problem.lambda_reg, p, system,
                                  &result.cost_terminal, &result.cost_energy);
    return result;
}

CriterionTable approx_criterion(const Gramian& gramian, const std::vector<double>& lambda_seq,
                                const std::vector<Vector>& y_samples, double p,
                                const SpectralSystem& system) {
    if (lambda_seq.empty()) throw ValidationError("approx_criterion: empty lambda sequence");
    for (std::size_t i = 0; i < lambda_seq.size(); ++i) {
        if (!(lambda_seq[i] > 0.0)) throw ValidationError("approx_criterion: lambdas must be > 0");
        if (i > 0 && !(lambda_seq[i] < lambda_seq[i - 1]))
            throw ValidationError("approx_criterion: lambdas must be strictly decreasing");
    }
    CriterionTable out;
    for (double lam : lambda_seq) {
        double worst = 0.0;
        for (const Vector& y : y_samples) {
            const double ynorm = system.lp_norm_spectral(y, p);
            if (ynorm == 0.0) continue;  // trivial sample contributes 0
            Vector z = regularized_resolvent(gramian, lam, y, p, system);
            worst = std::max(worst, lam * system.lp_norm_spectral(z, p) / ynorm);
        }
        out.rows.push_back({lam, worst});
    }
    out.monotone = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (out.rows[i].crit > out.rows[i - 1].crit + 1e-10) out.monotone = false;
    out.controllable = out.monotone && out.rows.back().crit <= 1e-3;
    return out;
}

AdjointReport adjoint_vanishing_test(const ResolventTable& table, const ControlOperator& B,
                                     const Vector& w_star, const TimeGrid& grid, double tol) {
    require_uniform_match(table, grid, "adjoint_vanishing_test");
    AdjointReport rep;
    const int K = grid.steps;
    const Vector tau = trapezoid_weights(grid);
    double quad_integral = 0.0;
    for (int k = 0; k <= K; ++k) {
        Vector v = B.matrix.transpose() * table.values.col(K - k).cwiseProduct(w_star);
        rep.max_value = std::max(rep.max_value, v.norm());
        quad_integral += tau[k] * v.squaredNorm();
    }
    const double wnorm = w_star.norm();
    rep.degenerate_zero = wnorm < 1e-300;
    rep.verdict = (rep.max_value <= tol * wnorm || rep.degenerate_zero) ? AdjointVerdict::Vanishes
                                                                        : AdjointVerdict::NonVanishing;
    Gramian g = assemble_gramian(table, B, grid);
    rep.gramian_quadratic = w_star.dot(g.matrix * w_star);
    rep.quadratic_mismatch = std::abs(rep.gramian_quadratic - quad_integral);
    return rep;
}

RankResult rank_condition(const Vector& eigenvalues, const Matrix& B_matrix, int M) {
    if (M < 1) throw ValidationError("rank_condition: M must be >= 1");
    if (eigenvalues.size() != M || B_matrix.rows() != M)
        throw DimensionMismatch("rank_condition: dimensions inconsistent with M");
    const int mu = static_cast<int>(B_matrix.cols());
    Matrix kalman(M, M * mu);
    Matrix block = B_matrix;
    for (int n = 0; n < M; ++n) {
        kalman.middleCols(n * mu, mu) = block;
        block = (-eigenvalues.asDiagonal().toDenseMatrix()) * block;
    }
    for (int c = 0; c < kalman.cols(); ++c) {
        const double nrm = kalman.col(c).norm();
        if (nrm > 0.0) kalman.col(c) /= nrm;
    }
    Eigen::JacobiSVD<Matrix> svd(kalman);
    const auto& sv = svd.singularValues();
    const double thresh = 1e-10 * sv(0);
    RankResult out;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > thresh) ++out.rank;
    out.controllable = (out.rank == M);
    return out;
}

AssumptionFResult assumption_f_check(const ResolventTable& table, const ControlOperator& B,
                                     const TimeGrid& grid) {
    require_uniform_match(table, grid, "assumption_f_check");
    AssumptionFResult out;
    Gramian gram = assemble_gramian(table, B, grid);
    if (gram.min_eigenvalue <= 1e-12) {
        out.applicable = false;
        return out;
    }
    out.applicable = true;
    const int M = table.modes();
    const int K = grid.steps;
    const double h = grid.T / grid.steps;
    const Matrix BBt = B.matrix * B.matrix.transpose();

    // F(t_k)_{mn} = sum_{j<=k} tau_j s_m(t_k - t_j) (BB^T)_{mn} s_n(T - t_j)
    Matrix F_T;
    Eigen::LDLT<Matrix> gram_solver(gram.matrix);
    double worst = 0.0;
    for (int k = 1; k <= K; ++k) {
        Matrix F = Matrix::Zero(M, M);
        for (int j = 0; j <= k; ++j) {
            const double tau = (j == 0 || j == k) ? 0.5 * h : h;
            const auto sl = table.values.col(k - j);
            const auto sr = table.values.col(K - j);
            for (int m = 0; m < M; ++m)
                for (int n = 0; n < M; ++n) F(m, n) += tau * sl[m] * BBt(m, n) * sr[n];
        }
        if (k == K) F_T = F;
        worst = std::max(worst, spectral_norm(gram_solver.solve(F.transpose()).transpose()));
    }
    out.l_tilde = worst;
    out.gramian_match_error = (F_T - gram.matrix).cwiseAbs().maxCoeff();
    if (out.l_tilde < 1.0 - 1e-10)
        throw std::logic_error("assumption_f_check: L~ must be >= 1 (attained at t = T)");
    return out;
}

FeasibilityReport feasibility_check(const SteeringProblem& problem, double N_bound, double M_B,
                                    double L_tilde, double control_l2_norm,
                                    const SpectralSystem& system) {
    if (N_bound < 0.0 || M_B < 0.0 || L_tilde < 0.0 || control_l2_norm < 0.0)
        throw ValidationError("feasibility_check: inputs must be nonnegative");
    FeasibilityReport rep;
    const double p = problem.duality_p;
    const double T = problem.T;
    const double zeta_norm = system.lp_norm_spectral(problem.zeta, p);
    const double zeta1_norm = system.lp_norm_spectral(problem.zeta1, p);
    const Nonlinearity& f = problem.nonlinearity;

    const double gamma_l1 = f.bound_envelope_l1(T, p, 1.0);
    rep.bounded_lhs = N_bound * zeta_norm + N_bound * M_B * std::sqrt(T) * control_l2_norm +
                 N_bound * gamma_l1;
    rep.bounded_r_min = rep.bounded_lhs;

    if (f.kind == Nonlinearity::Kind::ExpDecayLinear) {
        const double per_r = f.bound_envelope_l1(T, p, 1.0);  // |gamma_r|_{L1} / r
        rep.radius_offset = N_bound * zeta_norm + 2.0 * L_tilde * (zeta1_norm + N_bound * zeta_norm);
        rep.radius_slope = (N_bound + 2.0 * L_tilde * N_bound) * per_r;
        rep.radius_feasible = rep.radius_slope < 1.0;
        rep.radius_r_min = rep.radius_feasible ? rep.radius_offset / (1.0 - rep.radius_slope)
                                         : std::numeric_limits<double>::infinity();
        const double pi = std::numbers::pi;
        const double mu = f.mu;
        rep.exp_integral_correct = (1.0 + 2.0 * L_tilde) * pi * (1.0 - std::exp(-mu * T)) / mu;
        rep.exp_integral_displayed = mu * (1.0 - std::exp(-mu * T)) * (1.0 + 2.0 * L_tilde) * pi;
        rep.decay_probe_lhs = mu * pi * (1.0 - std::exp(-mu * T)) * (1.0 + 2.0 * L_tilde);
        rep.decay_probe_ok = rep.decay_probe_lhs <= 0.5;
    } else {
        const double gl1 = gamma_l1;
        rep.radius_offset = N_bound * zeta_norm + N_bound * gl1 +
                         2.0 * L_tilde * (zeta1_norm + N_bound * zeta_norm + N_bound * gl1);
        rep.radius_slope = 0.0;
        rep.radius_feasible = true;
        rep.radius_r_min = rep.radius_offset;
    }
    return rep;
}

}  // namespace memctrl
