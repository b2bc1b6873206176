#ifndef MEMCTRL_SPECTRAL_HPP
#define MEMCTRL_SPECTRAL_HPP

#include <Eigen/Dense>

#include "memctrl/errors.hpp"

namespace memctrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Truncated eigen-decomposition of the 1-D Dirichlet Laplacian on [0, pi]:
// eigenvalues lam_m = m^2, modes phi_m(xi) = sqrt(2/pi) sin(m xi), m = 1..M.
// Physical grid xi_i = i*pi/(N_g-1) carries L^p norms and the duality map;
// trapezoid quadrature on it reproduces sine orthonormality exactly for
// m <= N_g - 2, so the transform pair below round-trips to machine precision.
class SpectralSystem {
public:
    SpectralSystem(int modes, int grid_points = 513, double p_exponent = 2.0);

    int modes() const { return modes_; }
    int grid_points() const { return grid_points_; }
    double p_exponent() const { return p_; }
    static constexpr double domain_length = 3.14159265358979323846;

    double eigenvalue(int m_index) const;               // lam_{m_index+1} = (m_index+1)^2
    const Vector& eigenvalues() const { return eigenvalues_; }
    const Vector& grid() const { return grid_; }        // xi_i
    const Vector& quad_weights() const { return quad_weights_; }

    /// phi_{m_index+1} sampled on the grid.
    Vector mode_on_grid(int m_index) const;

    /// Grid samples from spectral coefficients (sine synthesis).
    Vector to_grid(const Vector& coeffs) const;

    /// Spectral coefficients from grid samples (trapezoid analysis).
    Vector to_spectral(const Vector& grid_values) const;

    /// Trapezoid L^p norm of a grid function.
    double lp_norm(const Vector& grid_values, double p) const;

    /// Trapezoid pairing \int f g dxi.
    double pairing(const Vector& f, const Vector& g) const;

    /// L^p norm of a coefficient vector (p = 2 uses Parseval directly).
    double lp_norm_spectral(const Vector& coeffs, double p) const;

private:
    int modes_;
    int grid_points_;
    double p_;
    Vector eigenvalues_;
    Vector grid_;
    Vector quad_weights_;
    Matrix synth_;  // grid_points x modes
};

/// Pointwise L^p duality map on grid samples:
///   p = 2: identity;  p > 2: |w|^{p-2} w * ||w||_p^{2-p}.
/// Returns the dual grid function; `zero_flagged` is set when p > 2 and the
/// input vanishes (J[0] = 0 with singular normalization skipped).
Vector duality_map(const Vector& w_grid, double p, const SpectralSystem& sys,
                   bool* zero_flagged = nullptr);

}  // namespace memctrl

#endif  // MEMCTRL_SPECTRAL_HPP
