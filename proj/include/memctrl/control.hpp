#ifndef MEMCTRL_CONTROL_HPP
#define MEMCTRL_CONTROL_HPP

#include <vector>

#include "memctrl/volterra.hpp"

namespace memctrl {

enum class ControlKind { Identity, PaperKernel, GreensDiagonal };

struct ControlOperator {
    ControlKind kind = ControlKind::Identity;
    Matrix matrix;          // modes x control-dim, B_{mn} = <B phi_n, phi_m>
    double operator_norm = 1.0;  // largest singular value

    int control_dim() const { return static_cast<int>(matrix.cols()); }
};

// B in spectral coordinates. PaperKernel integrates the kernel
//   G(z, xi) = xi (pi - z) for z <= xi,  (pi - xi) z for xi <= z
// by tensor-product composite Simpson refined until 1e-10 stable;
// GreensDiagonal uses min(z,xi)(pi - max(z,xi)) (diagonal, B_mm = pi/m^2);
// Identity skips quadrature.
ControlOperator control_operator_matrix(ControlKind kind, const SpectralSystem& system);

/// Identity with row/column `dead_mode` (1-based) zeroed: kills one control direction.
ControlOperator identity_mode_killed(const SpectralSystem& system, int dead_mode);

struct Gramian {
    Matrix matrix;          // symmetric PSD, modes x modes
    double horizon = 0.0;
    double min_eigenvalue = 0.0;
    int quadrature_steps = 0;
};

// Upsilon_0^T = \int_0^T G(T-t) B B^* G(T-t)^* dt by composite trapezoid on
// the grid (the same weights the mild sweep uses, so the discrete terminal
// identity holds exactly).
Gramian assemble_gramian(const ResolventTable& table, const ControlOperator& B,
                         const TimeGrid& grid);

// z solving lam z + Upsilon J[z] = y.  p = 2: SPD solve; p > 2: damped fixed
// point z <- z + omega (y - lam z - Upsilon J[z]) with omega = 1/(lam + |Upsilon|_2),
// J applied through the grid transform. The bound |lam z| <= |y| (L^p norms)
// is checked on every return.
Vector regularized_resolvent(const Gramian& gramian, double lambda_reg, const Vector& y, double p,
                             const SpectralSystem& system);

/// k(w) = zeta1 - G(T) zeta - sum_j tau_j G(T-t_j) f_j  (trapezoid).
Vector target_offset(const ResolventTable& table, const Vector& zeta, const Vector& zeta1,
                     const Matrix& f_values, const TimeGrid& grid);

struct ControlSignal {
    TimeGrid grid;
    Matrix values;      // control-dim x nodes
    double energy = 0.0;  // \int |u|^2 dt by trapezoid
};

// u^lam(t_k) = B^T diag(s_m(T - t_k)) J[R(lam, Upsilon) k].
ControlSignal synthesize_control(const ResolventTable& table, const ControlOperator& B,
                                 const Gramian& gramian, double lambda_reg, const Vector& k,
                                 const TimeGrid& grid, double p, const SpectralSystem& system);

struct SteeringProblem {
    Vector zeta;
    Vector zeta1;
    double T = 1.0;
    double lambda_reg = 1e-4;
    Nonlinearity nonlinearity;
    double duality_p = 2.0;
};

struct SteeringResult {
    Trajectory trajectory;
    ControlSignal control;
    double terminal_miss = 0.0;  // |w(T) - zeta1| in the configured L^p norm
    int picard_iterations = 0;
    std::vector<double> picard_residuals;
    double cost = 0.0;
    double cost_terminal = 0.0;
    double cost_energy = 0.0;
    double terminal_identity_residual = 0.0;  // |(w(T)-zeta1) + lam R(lam,Y) k(w)|
};

// Fixed-point iteration of (P^lam w)(t) = G(t) zeta
//   + \int_0^t G(t-s) [B u^lam(s; w) + f(s, w(s))] ds,
// started from the linear (f = 0) trajectory; with f = 0 the map is constant
// in w and the loop exits after one iteration.
SteeringResult closed_loop_picard(const SteeringProblem& problem, const SpectralSystem& system,
                                  const MemoryKernel& kernel, const ResolventTable& table,
                                  const ControlOperator& B, const TimeGrid& grid, double tol,
                                  int max_iter);

/// |w_T - zeta1|_p^2 + lambda_reg * energy(u); parts reported separately.
double cost_functional(const Vector& w_T, const Vector& zeta1, const ControlSignal& u,
                       double lambda_reg, double p, const SpectralSystem& system,
                       double* terminal_part = nullptr, double* energy_part = nullptr);

struct CriterionRow {
    double lambda = 0.0;
    double crit = 0.0;  // max over samples of |lam R(lam,Y) y| / |y|
};

struct CriterionTable {
    std::vector<CriterionRow> rows;
    bool controllable = false;  // final row <= 1e-3 and rows nonincreasing
    bool monotone = false;
};

CriterionTable approx_criterion(const Gramian& gramian, const std::vector<double>& lambda_seq,
                                const std::vector<Vector>& y_samples, double p,
                                const SpectralSystem& system);

enum class AdjointVerdict { Vanishes, NonVanishing };

struct AdjointReport {
    AdjointVerdict verdict = AdjointVerdict::NonVanishing;
    double max_value = 0.0;          // max_t |B^T diag(s(T-t)) w*|
    double gramian_quadratic = 0.0;  // <w*, Upsilon w*>
    double quadratic_mismatch = 0.0; // vs the time-integral form
    bool degenerate_zero = false;    // w* = 0 input
};

AdjointReport adjoint_vanishing_test(const ResolventTable& table, const ControlOperator& B,
                                     const Vector& w_star, const TimeGrid& grid, double tol);

struct RankResult {
    int rank = 0;
    bool controllable = false;
};

// Numerical rank of the Kalman block matrix [B, AB, ..., A^{M-1}B] with
// A = diag(-lam_m). Columns are normalized before the SVD so the m^{2(M-1)}
// dynamic range cannot mask small modes; threshold 1e-10 * sigma_max.
RankResult rank_condition(const Vector& eigenvalues, const Matrix& B_matrix, int M);

struct AssumptionFResult {
    bool applicable = false;  // false when the truncated Gramian is singular
    double l_tilde = 0.0;     // max_k |F(t_k) F(T)^{-1}|_2
    double gramian_match_error = 0.0;  // max |F(T) - Upsilon|
};

AssumptionFResult assumption_f_check(const ResolventTable& table, const ControlOperator& B,
                                     const TimeGrid& grid);

struct FeasibilityReport {
    // Bounded-envelope condition: N|zeta| + N M_B sqrt(T) |u|_{L2} + N |gamma|_{L1} <= r
    double bounded_lhs = 0.0;
    double bounded_r_min = 0.0;
    // Radius-dependent condition: N|zeta| + N|gamma_r| + 2L[|zeta1| + N|zeta| + N|gamma_r|] <= r,
    // affine in r: lhs = radius_offset + radius_slope * r.
    double radius_offset = 0.0;
    double radius_slope = 0.0;
    bool radius_feasible = false;
    double radius_r_min = 0.0;
    // Exponential-decay case: the corrected integral (1+2L) r pi (1-e^{-mu T})/mu
    // next to the displayed expression mu (1-e^{-mu T}) (1+2L) r pi (at r = 1).
    double exp_integral_correct = 0.0;
    double exp_integral_displayed = 0.0;
    double decay_probe_lhs = 0.0;  // mu pi (1-e^{-mu T}) (1+2L)
    bool decay_probe_ok = false;   // <= 1/2
};

FeasibilityReport feasibility_check(const SteeringProblem& problem, double N_bound, double M_B,
                                    double L_tilde, double control_l2_norm,
                                    const SpectralSystem& system);

}  // namespace memctrl

#endif  // MEMCTRL_CONTROL_HPP
