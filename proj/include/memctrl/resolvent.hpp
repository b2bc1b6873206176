#ifndef MEMCTRL_RESOLVENT_HPP
#define MEMCTRL_RESOLVENT_HPP

#include <complex>
#include <string>
#include <vector>

#include "memctrl/spectral.hpp"

namespace memctrl {

// Weakly singular relaxation kernel kappa(t) = alpha e^{-beta t} t^{nu-1} / Gamma(nu),
// alpha > 0, beta >= 0, 0 < nu < 1. Unbounded as t -> 0+, integrable.
class MemoryKernel {
public:
    MemoryKernel(double alpha, double beta, double nu);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double nu() const { return nu_; }

    double kernel_at(double t) const;

    /// (1 * kappa)(tau) = \int_0^tau kappa, exact via (incomplete) Gamma.
    double kernel_integral(double tau) const;

    /// \int_a^b tau^n kappa(tau) dtau for n in 0..3, 0 <= a <= b.
    double moment(int n, double a, double b) const;

private:
    double alpha_, beta_, nu_;
};

enum class ResolventRoute { MLSeries, Contour, Volterra };
std::string route_name(ResolventRoute r);
ResolventRoute route_from_name(const std::string& name);

struct ScalarEval {
    double value = 0.0;
    double error_estimate = 0.0;
    int terms_used = 0;
};

// Scalar Laplace symbol of the resolvent family on a sine mode:
//   shat_m(s) = 1 / (s + lam_m (1 + alpha/(s+beta)^nu)),  principal branch.
std::complex<double> laplace_symbol(const MemoryKernel& kernel, double lam,
                                    std::complex<double> s);

// Series route for s_m(t):
//   s_m(t) = e^{-beta t} sum_k (beta-lam)^k t^k E^{k+1}_{nu+1,k+1}(-alpha lam t^{nu+1}),
// summed as written for small |beta-lam| t and through the equivalent
// hypergeometric rearrangement
//   s_m(t) = e^{-lam t} sum_j (-alpha lam t^{nu+1})^j M(nu j; (nu+1)j+1; (lam-beta)t)/Gamma((nu+1)j+1)
// otherwise (the outer series cancels catastrophically for large (lam-beta)t).
// Throws NotConverged when neither arrangement meets tol; callers fall back
// to the contour route.
ScalarEval scalar_resolvent_ml(const MemoryKernel& kernel, double lam, double t, double tol,
                               int max_terms = 400);

// Bromwich inversion of laplace_symbol over a truncated sectorial contour
// with rays inside the pole-free wedge (pole angles bounded through the
// branch-point analysis of the symbol). nodes >= 16.
ScalarEval scalar_resolvent_contour(const MemoryKernel& kernel, double lam, double t,
                                    int nodes = 48);

struct ResolventTable {
    MemoryKernel kernel;
    std::vector<double> times;                            // t_0 = 0 < ... < t_K
    Matrix values;                                        // modes x times
    Matrix error_estimates;                               // modes x times
    std::vector<std::vector<ResolventRoute>> entry_routes;
    ResolventRoute requested_route = ResolventRoute::MLSeries;
    double sup_norm = 1.0;

    int modes() const { return static_cast<int>(values.rows()); }
    int time_count() const { return static_cast<int>(values.cols()); }
    double horizon() const { return times.back(); }
    bool uniform() const;

    /// Index of t in the time grid; GridIncompatible when absent.
    int time_index(double t, double tol = 1e-10) const;
};

struct BuildOptions {
    int contour_nodes = 48;
    int ml_max_terms = 400;
    double volterra_h = 1.0 / 2048;  // target step for the Volterra route
};

ResolventTable build_resolvent_table(const MemoryKernel& kernel, const SpectralSystem& system,
                                     const std::vector<double>& times, ResolventRoute route,
                                     double tol, const BuildOptions& opts = {});

/// Diagonal action: out_m = s[m][t_index] * state_m.
Vector apply_resolvent(const ResolventTable& table, int t_index, const Vector& state);

enum class QuadRule { Trapezoid, Simpson };

// Max over grid times of | s_m(t) - (1 - lam_m \int_0^t (1 + 1*kappa)(t-s) s_m(s) ds) |.
// The smooth part integrates by quad_rule; the 1*kappa factor by product
// integration exact for piecewise-linear s (its derivative is singular at 0,
// plain rules would cap the observable order below 2).
double verify_resolvent_equation(const ResolventTable& table, int m_index,
                                 QuadRule rule = QuadRule::Simpson);

struct DecayRow {
    int mode = 0;        // 1-based m
    double t = 0.0;
    double lhs = 0.0;    // s_m(t)^2
    double rhs = 0.0;    // e^{-m^2 t (1 + alpha t^nu)}
    bool violation = false;
};

struct DerivativeRow {
    int mode = 0;
    double estimate = 0.0;  // Richardson s_m'(0+)
    double target = 0.0;    // -lam_m
    double rel_deviation = 0.0;
};

struct DecayReport {
    std::vector<DecayRow> rows;
    std::vector<DerivativeRow> derivatives;
    int violation_count = 0;
};

/// Reported (not asserted) decay-bound and derivative diagnostics.
DecayReport decay_diagnostics(const ResolventTable& table, const MemoryKernel& kernel,
                              const SpectralSystem& system);

}  // namespace memctrl

#endif  // MEMCTRL_RESOLVENT_HPP
