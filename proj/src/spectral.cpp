#include "memctrl/spectral.hpp"

#include <cmath>
#include <numbers>

namespace memctrl {

SpectralSystem::SpectralSystem(int modes, int grid_points, double p_exponent)
    : modes_(modes), grid_points_(grid_points), p_(p_exponent) {
    if (modes < 1) throw ValidationError("SpectralSystem: modes must be >= 1");
    if (grid_points < modes + 2)
        throw ValidationError("SpectralSystem: grid_points must be >= modes + 2");
    if (!(p_exponent >= 2.0)) throw ValidationError("SpectralSystem: p must be >= 2");

    const double pi = std::numbers::pi;
    eigenvalues_.resize(modes_);
    for (int m = 0; m < modes_; ++m) eigenvalues_[m] = double(m + 1) * double(m + 1);

    grid_.resize(grid_points_);
    quad_weights_.resize(grid_points_);
    const double h = pi / (grid_points_ - 1);
    for (int i = 0; i < grid_points_; ++i) {
        grid_[i] = i * h;
        quad_weights_[i] = (i == 0 || i == grid_points_ - 1) ? h / 2 : h;
    }

    synth_.resize(grid_points_, modes_);
    const double scale = std::sqrt(2.0 / pi);
    for (int m = 0; m < modes_; ++m)
        for (int i = 0; i < grid_points_; ++i)
            synth_(i, m) = scale * std::sin((m + 1) * grid_[i]);
}

double SpectralSystem::eigenvalue(int m_index) const {
    if (m_index < 0 || m_index >= modes_) throw DimensionMismatch("eigenvalue: bad mode index");
    return eigenvalues_[m_index];
}

Vector SpectralSystem::mode_on_grid(int m_index) const {
    if (m_index < 0 || m_index >= modes_) throw DimensionMismatch("mode_on_grid: bad mode index");
    return synth_.col(m_index);
}

Vector SpectralSystem::to_grid(const Vector& coeffs) const {
    if (coeffs.size() != modes_) throw DimensionMismatch("to_grid: coefficient length != modes");
    return synth_ * coeffs;
}

Vector SpectralSystem::to_spectral(const Vector& grid_values) const {
    if (grid_values.size() != grid_points_)
        throw DimensionMismatch("to_spectral: grid length mismatch");
    return synth_.transpose() * quad_weights_.cwiseProduct(grid_values).matrix();
}

double SpectralSystem::lp_norm(const Vector& grid_values, double p) const {
    if (grid_values.size() != grid_points_) throw DimensionMismatch("lp_norm: grid length mismatch");
    double acc = 0.0;
    for (int i = 0; i < grid_points_; ++i)
        acc += quad_weights_[i] * std::pow(std::abs(grid_values[i]), p);
    return std::pow(acc, 1.0 / p);
}

double SpectralSystem::pairing(const Vector& f, const Vector& g) const {
    if (f.size() != grid_points_ || g.size() != grid_points_)
        throw DimensionMismatch("pairing: grid length mismatch");
    return (quad_weights_.array() * f.array() * g.array()).sum();
}

double SpectralSystem::lp_norm_spectral(const Vector& coeffs, double p) const {
    if (p == 2.0) return coeffs.norm();  // Parseval (modes orthonormal)
    return lp_norm(to_grid(coeffs), p);
}

Vector duality_map(const Vector& w_grid, double p, const SpectralSystem& sys, bool* zero_flagged) {
    if (!(p >= 2.0)) throw ValidationError("duality_map: p must be >= 2");
    if (zero_flagged) *zero_flagged = false;
    if (p == 2.0) return w_grid;
    const double norm = sys.lp_norm(w_grid, p);
    if (norm < 1e-14) {
        if (zero_flagged) *zero_flagged = true;
        return Vector::Zero(w_grid.size());
    }
    const double scale = std::pow(norm, 2.0 - p);
    Vector out(w_grid.size());
    for (int i = 0; i < w_grid.size(); ++i)
        out[i] = scale * std::pow(std::abs(w_grid[i]), p - 2.0) * w_grid[i];
    // postconditions: <J[w], w> = ||w||_p^2 and ||J[w]||_q = ||w||_p
    const double pair = sys.pairing(out, w_grid);
    const double q = p / (p - 1.0);
    const double dual_norm = sys.lp_norm(out, q);
    if (std::abs(pair - norm * norm) > 1e-8 * norm * norm ||
        std::abs(dual_norm - norm) > 1e-8 * norm)
        throw std::logic_error("duality_map: pairing/norm identity violated");
    return out;
}

}  // namespace memctrl
