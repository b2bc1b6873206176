#include "memctrl/volterra.hpp"

#include <cmath>
#include <numbers>

namespace memctrl {

TimeGrid TimeGrid::uniform(double T, int steps) {
    if (!(T > 0.0)) throw ValidationError("TimeGrid: T must be > 0");
    if (steps < 2) throw ValidationError("TimeGrid: steps must be >= 2");
    TimeGrid g;
    g.T = T;
    g.steps = steps;
    g.kind = GridKind::Uniform;
    g.nodes.resize(steps + 1);
    for (int k = 0; k <= steps; ++k) g.nodes[k] = T * k / steps;
    g.nodes[steps] = T;
    return g;
}

TimeGrid TimeGrid::graded(double T, int steps, double exponent) {
    if (!(T > 0.0)) throw ValidationError("TimeGrid: T must be > 0");
    if (steps < 2) throw ValidationError("TimeGrid: steps must be >= 2");
    if (!(exponent >= 1.0)) throw ValidationError("TimeGrid: grading exponent must be >= 1");
    TimeGrid g;
    g.T = T;
    g.steps = steps;
    g.kind = GridKind::Graded;
    g.grading = exponent;
    g.nodes.resize(steps + 1);
    for (int k = 0; k <= steps; ++k)
        g.nodes[k] = T * std::pow(double(k) / steps, exponent);
    g.nodes[steps] = T;
    return g;
}

Nonlinearity Nonlinearity::zero() { return {}; }

Nonlinearity Nonlinearity::sine_cosine(double k0, double horizon) {
    if (!(k0 > 0.0)) throw ValidationError("Nonlinearity: k0 must be > 0");
    Nonlinearity f;
    f.kind = Kind::SineCosine;
    f.k0 = k0;
    f.horizon = horizon;
    return f;
}

Nonlinearity Nonlinearity::exp_decay_linear(double mu) {
    if (!(mu > 0.0)) throw ValidationError("Nonlinearity: mu must be > 0");
    Nonlinearity f;
    f.kind = Kind::ExpDecayLinear;
    f.mu = mu;
    return f;
}

Vector Nonlinearity::apply(double t, const Vector& w, const SpectralSystem& sys) const {
    switch (kind) {
        case Kind::Zero:
            return Vector::Zero(w.size());
        case Kind::SineCosine: {
            const double factor = k0 * std::cos(2.0 * std::numbers::pi * t / horizon);
            Vector grid = sys.to_grid(w);
            for (int i = 0; i < grid.size(); ++i) grid[i] = factor * std::sin(grid[i]);
            return sys.to_spectral(grid);
        }
        case Kind::ExpDecayLinear:
            return std::exp(-mu * t) * w;
    }
    return Vector::Zero(w.size());
}

double Nonlinearity::bound_envelope(double t, double p, double r) const {
    const double pi = std::numbers::pi;
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::SineCosine:
            return k0 * std::pow(pi, 1.0 / p) * std::abs(std::cos(2.0 * pi * t / horizon));
        case Kind::ExpDecayLinear:
            return std::exp(-mu * t) * r * pi;  // gamma_r of the F3 case as stated
    }
    return 0.0;
}

double Nonlinearity::bound_envelope_l1(double T, double p, double r) const {
    const double pi = std::numbers::pi;
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::SineCosine:
            // int_0^T |cos(2 pi t / T)| dt = 2T/pi
            return k0 * std::pow(pi, 1.0 / p) * 2.0 * T / pi;
        case Kind::ExpDecayLinear:
            return r * pi * (1.0 - std::exp(-mu * T)) / mu;
    }
    return 0.0;
}

ForcingSpec ForcingSpec::zero(int modes, int nodes) {
    ForcingSpec f;
    f.kind = Kind::Zero;
    f.values = Matrix::Zero(modes, nodes);
    return f;
}

ForcingSpec ForcingSpec::constant(const Vector& value, int nodes) {
    ForcingSpec f;
    f.kind = Kind::ConstantVector;
    f.values = value.replicate(1, nodes);
    return f;
}

ForcingSpec ForcingSpec::time_series(const Matrix& values) {
    ForcingSpec f;
    f.kind = Kind::TimeSeries;
    f.values = values;
    return f;
}

Vector ForcingSpec::at(int k, double t, const Vector& w) const {
    if (kind == Kind::Nonlinear && hook) return hook(t, w);
    if (kind == Kind::Zero) return Vector::Zero(values.rows());
    if (k < 0 || k >= values.cols()) throw DimensionMismatch("ForcingSpec::at: node out of range");
    return values.col(k);
}

ConvolutionWeights::ConvolutionWeights(const MemoryKernel& kernel, const TimeGrid& grid)
    : grid_(grid), uniform_(grid.kind == GridKind::Uniform) {
    const int K = grid.steps;
    if (uniform_) {
        // Interval with endpoints (j, j+1) seen from target k covers
        // tau in [(L-1)h, Lh], L = k - j. Its product-integration split:
        //   older endpoint j:  (I1 - a I0)/h,   newer endpoint j+1: (b I0 - I1)/h.
        const double h = grid.T / K;
        left_.assign(K + 1, 0.0);
        right_.assign(K + 1, 0.0);
        for (int L = 1; L <= K; ++L) {
            const double a = (L - 1) * h, b = L * h;
            const double I0 = kernel.moment(0, a, b);
            const double I1 = kernel.moment(1, a, b);
            left_[L] = (I1 - a * I0) / h;
            right_[L] = (b * I0 - I1) / h;
        }
    } else {
        rows_.assign(K + 1, {});
        for (int k = 1; k <= K; ++k) {
            rows_[k].assign(k + 1, 0.0);
            for (int j = 0; j < k; ++j) {
                const double hj = grid.nodes[j + 1] - grid.nodes[j];
                const double a = grid.nodes[k] - grid.nodes[j + 1];
                const double b = grid.nodes[k] - grid.nodes[j];
                const double I0 = kernel.moment(0, a, b);
                const double I1 = kernel.moment(1, a, b);
                rows_[k][j] += (I1 - a * I0) / hj;
                rows_[k][j + 1] += (b * I0 - I1) / hj;
            }
        }
    }
}

double ConvolutionWeights::at(int k, int j) const {
    if (k < 1 || k > grid_.steps || j < 0 || j > k)
        throw DimensionMismatch("ConvolutionWeights::at: index out of range");
    if (!uniform_) return rows_[k][j];
    double w = 0.0;
    if (j < k) w += left_[k - j];       // interval to the right of node j
    if (j >= 1) w += right_[k - j + 1];  // interval to the left of node j
    return w;
}

double ConvolutionWeights::convolve(const std::vector<double>& g, int k) const {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += at(k, j) * g[j];
    return acc;
}

double ConvolutionWeights::convolve_history(const std::vector<double>& g, int k) const {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += at(k, j) * g[j];
    return acc;
}

ConvolutionWeights conv_weights(const MemoryKernel& kernel, const TimeGrid& grid) {
    return ConvolutionWeights(kernel, grid);
}

std::vector<double> step_linear_mode(const MemoryKernel& kernel, double lam, const TimeGrid& grid,
                                     const std::vector<double>& forcing, double w0) {
    if (!(lam > 0.0)) throw std::invalid_argument("step_linear_mode: lam must be > 0");
    if (static_cast<int>(forcing.size()) != grid.node_count())
        throw DimensionMismatch("step_linear_mode: forcing length != node count");
    ConvolutionWeights weights(kernel, grid);
    const int K = grid.steps;
    std::vector<double> w(K + 1);
    w[0] = w0;
    // Crank-Nicolson in the local terms; the memory integral enters through
    // its across-the-step average (evaluating it at t_k alone would cost an
    // order near the t^nu start-up). (kappa*w)(0) = 0.
    double conv_prev = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double h = grid.step(k);
        const double hist = weights.convolve_history(w, k);
        const double coeff = 1.0 / h + 0.5 * lam + 0.5 * lam * weights.diagonal(k);
        if (!(coeff > 0.0)) throw StepSingular("step_linear_mode: nonpositive implicit coefficient");
        const double rhs = w[k - 1] * (1.0 / h - 0.5 * lam) - 0.5 * lam * (hist + conv_prev) +
                           0.5 * (forcing[k] + forcing[k - 1]);
        w[k] = rhs / coeff;
        conv_prev = hist + weights.diagonal(k) * w[k];
    }
    return w;
}

std::vector<double> volterra_homogeneous_samples(const MemoryKernel& kernel, double lam,
                                                 const std::vector<double>& times,
                                                 double h_target) {
    const int K = static_cast<int>(times.size()) - 1;
    if (K < 1 || times.front() != 0.0)
        throw GridIncompatible("volterra_homogeneous_samples: times must start at 0");
    const double T = times.back();
    const double h0 = times[1] - times[0];
    for (int k = 1; k <= K; ++k)
        if (std::abs(times[k] - k * h0) > 1e-9 * std::max(1.0, T))
            throw GridIncompatible("volterra_homogeneous_samples: uniform times required");
    const int refine = std::max(1, static_cast<int>(std::ceil(h0 / h_target - 1e-12)));
    TimeGrid fine = TimeGrid::uniform(T, K * refine);
    std::vector<double> zero(fine.node_count(), 0.0);
    std::vector<double> w = step_linear_mode(kernel, lam, fine, zero, 1.0);
    std::vector<double> out(K + 1);
    for (int k = 0; k <= K; ++k) out[k] = w[k * refine];
    return out;
}

namespace {

void require_grid_matches_table(const ResolventTable& table, const TimeGrid& grid) {
    if (grid.kind != GridKind::Uniform)
        throw GridIncompatible("mild sweep: uniform grid required (t_k - t_j must be nodes)");
    if (table.time_count() != grid.node_count())
        throw GridIncompatible("mild sweep: table/grid node counts differ");
    for (int k = 0; k < grid.node_count(); ++k)
        if (std::abs(table.times[k] - grid.nodes[k]) > 1e-10 * std::max(1.0, grid.T))
            throw GridIncompatible("mild sweep: table times differ from grid nodes");
}

}  // namespace

Trajectory mild_quadrature(const ResolventTable& table, const Vector& zeta,
                           const Matrix& forcing_values, const TimeGrid& grid) {
    require_grid_matches_table(table, grid);
    const int M = table.modes();
    if (zeta.size() != M) throw DimensionMismatch("mild_quadrature: zeta length != modes");
    if (forcing_values.rows() != M || forcing_values.cols() != grid.node_count())
        throw DimensionMismatch("mild_quadrature: forcing shape mismatch");
    const double h = grid.T / grid.steps;

    Trajectory traj;
    traj.grid = grid;
    traj.scheme = "mild-trapezoid";
    traj.states.resize(M, grid.node_count());
    for (int m = 0; m < M; ++m) {
        traj.states(m, 0) = zeta[m];
        for (int k = 1; k <= grid.steps; ++k) {
            double acc = table.values(m, k) * zeta[m];
            for (int j = 0; j <= k; ++j) {
                const double tau = (j == 0 || j == k) ? 0.5 * h : h;
                acc += tau * table.values(m, k - j) * forcing_values(m, j);
            }
            traj.states(m, k) = acc;
        }
    }
    return traj;
}

Trajectory simulate_semilinear(const SpectralSystem& system, const ResolventTable& table,
                               const TimeGrid& grid, const Matrix& control_forcing,
                               const Nonlinearity& f, const Vector& zeta,
                               const SubIterOptions& opts) {
    require_grid_matches_table(table, grid);
    const int M = table.modes();
    if (zeta.size() != M) throw DimensionMismatch("simulate_semilinear: zeta length != modes");
    if (control_forcing.rows() != M || control_forcing.cols() != grid.node_count())
        throw DimensionMismatch("simulate_semilinear: control forcing shape mismatch");
    const double h = grid.T / grid.steps;

    Trajectory traj;
    traj.grid = grid;
    traj.scheme = "mild-trapezoid-semilinear";
    traj.states.resize(M, grid.node_count());
    traj.sub_iterations.assign(grid.node_count(), 0);
    traj.states.col(0) = zeta;

    Matrix f_nodes(M, grid.node_count());  // f(t_j, w_j) at settled nodes
    f_nodes.col(0) = f.apply(grid.nodes[0], zeta, system);

    for (int k = 1; k <= grid.steps; ++k) {
        // known part: resolvent action + history of [Bu + f]
        Vector base(M);
        for (int m = 0; m < M; ++m) {
            double acc = table.values(m, k) * zeta[m];
            for (int j = 0; j < k; ++j) {
                const double tau = (j == 0) ? 0.5 * h : h;
                acc += tau * table.values(m, k - j) * (control_forcing(m, j) + f_nodes(m, j));
            }
            acc += 0.5 * h * control_forcing(m, k);  // s_m(0) = 1
            base[m] = acc;
        }
        if (f.is_zero()) {
            traj.states.col(k) = base;
            f_nodes.col(k).setZero();
            continue;
        }
        Vector w_k = traj.states.col(k - 1);
        int iter = 0;
        double res = 0.0;
        for (iter = 0; iter < opts.max_iterations; ++iter) {
            Vector fk = f.apply(grid.nodes[k], w_k, system);
            Vector next = base + 0.5 * h * fk;
            res = (next - w_k).norm();
            w_k = next;
            if (res <= opts.tolerance) break;
        }
        if (res > opts.tolerance)
            throw SubIterationDiverged("simulate_semilinear: sub-iteration did not converge",
                                       grid.nodes[k], res);
        traj.states.col(k) = w_k;
        f_nodes.col(k) = f.apply(grid.nodes[k], w_k, system);
        traj.sub_iterations[k] = iter + 1;
    }
    return traj;
}

}  // namespace memctrl
