#ifndef MEMCTRL_VOLTERRA_HPP
#define MEMCTRL_VOLTERRA_HPP

#include <functional>
#include <string>
#include <vector>

#include "memctrl/resolvent.hpp"

namespace memctrl {

enum class GridKind { Uniform, Graded };

struct TimeGrid {
    double T = 1.0;
    int steps = 2;  // K panels, K+1 nodes
    GridKind kind = GridKind::Uniform;
    double grading = 1.0;  // gamma_g >= 1 (Graded: t_k = T (k/K)^gamma_g)
    std::vector<double> nodes;

    static TimeGrid uniform(double T, int steps);
    static TimeGrid graded(double T, int steps, double exponent);

    int node_count() const { return steps + 1; }
    double step(int k) const { return nodes[k] - nodes[k - 1]; }  // h_k, k >= 1
};

// Nonlinear term f(t, w) of the semilinear equation in spectral coordinates.
//  Zero:            f = 0
//  SineCosine:      f(t,w)(xi) = k0 cos(2 pi t / T) sin(w(xi)), pointwise on the grid
//  ExpDecayLinear:  f(t,w) = e^{-mu t} w, diagonal in the sine basis
struct Nonlinearity {
    enum class Kind { Zero, SineCosine, ExpDecayLinear };
    Kind kind = Kind::Zero;
    double k0 = 0.0;
    double mu = 0.0;
    double horizon = 1.0;  // T entering cos(2 pi t / T)

    static Nonlinearity zero();
    static Nonlinearity sine_cosine(double k0, double horizon);
    static Nonlinearity exp_decay_linear(double mu);

    bool is_zero() const { return kind == Kind::Zero; }
    Vector apply(double t, const Vector& w_spectral, const SpectralSystem& sys) const;

    /// Envelope gamma(t) (assumption F2) or gamma_r(t) with radius r (F3).
    double bound_envelope(double t, double p, double r = 1.0) const;
    /// \int_0^T of the envelope, closed form.
    double bound_envelope_l1(double T, double p, double r = 1.0) const;
};

struct ForcingSpec {
    enum class Kind { Zero, ConstantVector, TimeSeries, ControlDriven, Nonlinear };
    Kind kind = Kind::Zero;
    Matrix values;  // modes x nodes, used by ConstantVector/TimeSeries/ControlDriven
    std::function<Vector(double, const Vector&)> hook;  // Nonlinear evaluation g(t_k, w_k)

    static ForcingSpec zero(int modes, int nodes);
    static ForcingSpec constant(const Vector& value, int nodes);
    static ForcingSpec time_series(const Matrix& values);

    Vector at(int k, double t, const Vector& w) const;
};

struct Trajectory {
    TimeGrid grid;
    Matrix states;  // modes x nodes
    std::string scheme;
    std::vector<int> sub_iterations;  // per step (semilinear sweep)

    int modes() const { return static_cast<int>(states.rows()); }
};

// Product-integration weights: sum_j w[k][j] g(t_j) equals
// \int_0^{t_k} kappa(t_k - s) g(s) ds exactly for piecewise-linear g.
// Uniform grids store one weight pair per lag; graded grids store full rows.
class ConvolutionWeights {
public:
    ConvolutionWeights(const MemoryKernel& kernel, const TimeGrid& grid);

    double at(int k, int j) const;
    double diagonal(int k) const { return at(k, k); }

    /// sum_{j=0}^{k} w[k][j] g_j
    double convolve(const std::vector<double>& g, int k) const;
    /// sum_{j=0}^{k-1} w[k][j] g_j (history part, excludes the implicit node)
    double convolve_history(const std::vector<double>& g, int k) const;

    const TimeGrid& grid() const { return grid_; }

private:
    TimeGrid grid_;
    bool uniform_;
    // uniform: left_[L], right_[L] are the contributions of lag-L intervals
    // to their older/newer endpoint; general: full row storage.
    std::vector<double> left_, right_;
    std::vector<std::vector<double>> rows_;
};

ConvolutionWeights conv_weights(const MemoryKernel& kernel, const TimeGrid& grid);

// Implicit product-trapezoidal step for the scalar mode equation
//   w' = -lam (w + kappa * w) + g,  w(0) = w0.
std::vector<double> step_linear_mode(const MemoryKernel& kernel, double lam, const TimeGrid& grid,
                                     const std::vector<double>& forcing, double w0);

/// Homogeneous solve (g = 0, w0 = 1) on a uniform refinement of `times` with
/// step <= h_target, sampled back on `times`. Backend of the Volterra table route.
std::vector<double> volterra_homogeneous_samples(const MemoryKernel& kernel, double lam,
                                                 const std::vector<double>& times,
                                                 double h_target);

// Mild-solution quadrature: w_m(t_k) = s_m(t_k) zeta_m
//   + sum_j tau_j s_m(t_k - t_j) h_m(t_j), composite trapezoid on [0, t_k].
// Requires the uniform grid to coincide with the table times.
Trajectory mild_quadrature(const ResolventTable& table, const Vector& zeta,
                           const Matrix& forcing_values, const TimeGrid& grid);

struct SubIterOptions {
    int max_iterations = 20;
    double tolerance = 1e-12;
};

// Forward sweep of the semilinear mild equation with the implicit f(t_k, w_k)
// contribution resolved by fixed-point sub-iteration. With f = Zero the sweep
// reproduces mild_quadrature on the same inputs.
Trajectory simulate_semilinear(const SpectralSystem& system, const ResolventTable& table,
                               const TimeGrid& grid, const Matrix& control_forcing,
                               const Nonlinearity& f, const Vector& zeta,
                               const SubIterOptions& opts = {});

}  // namespace memctrl

#endif  // MEMCTRL_VOLTERRA_HPP
