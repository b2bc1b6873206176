#ifndef MEMCTRL_LAPLACE_INVERSION_HPP
#define MEMCTRL_LAPLACE_INVERSION_HPP

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace memctrl {

using Symbol = std::function<std::complex<double>(std::complex<double>)>;

// Truncated sectorial Bromwich contour: circular arc of the given radius
// joining two rays at +-half_angle from the origin. half_angle must lie in
// (pi/2, pi) so the ray integrand decays like exp(-|s| t |cos half_angle|).
struct ContourSpec {
    double radius = 1.0;
    double half_angle = 2.2;
    int base_nodes = 32;   // Gauss-Legendre order on the arc; panels use base_nodes/2
    double tail = 40.0;    // ray truncation, in e-foldings of the decay factor
};

struct InversionResult {
    double value = 0.0;
    double imag_residual = 0.0;  // |Im| of the quadrature (0 for real originals)
    double doubling_diff = 0.0;  // |change| when all node counts are doubled
    int nodes_used = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// (1/2πi) ∫_Γ e^{st} F(s) ds over the sectorial contour, full complex sweep
/// (both rays evaluated; conjugate symmetry of F is *not* assumed, so the
/// imaginary part of the result measures quadrature quality).
std::complex<double> contour_integral(const Symbol& symbol, double t,
                                      const ContourSpec& spec, int refine = 1);

/// Inversion with a node-doubling self check. Returns the refined value.
InversionResult invert_laplace(const Symbol& symbol, double t, const ContourSpec& spec);

}  // namespace memctrl

#endif  // MEMCTRL_LAPLACE_INVERSION_HPP
