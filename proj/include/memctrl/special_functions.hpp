#ifndef MEMCTRL_SPECIAL_FUNCTIONS_HPP
#define MEMCTRL_SPECIAL_FUNCTIONS_HPP

#include <complex>

#include "memctrl/errors.hpp"

namespace memctrl {

enum class EvalRoute { Series, Contour };

/// Result of a special-function evaluation together with a bound on the
/// absolute truncation error and the number of series terms consumed.
struct EvalResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int terms_used = 0;
    EvalRoute route = EvalRoute::Series;
};

struct ComplexEvalResult {
    std::complex<double> value{0.0, 0.0};
    double error_estimate = 0.0;
    int terms_used = 0;
    EvalRoute route = EvalRoute::Series;
};

/// Gamma function. Throws PoleError at nonpositive integers.
double gamma_fn(double x);

/// log|Gamma(x)| for x > 0.
double log_gamma(double x);

struct Ml3Options {
    double z_switch = 30.0;    // |z| above which the contour route takes over
    int max_terms = 2000;
    double overlap_lo = 20.0;  // cross-check band on the negative real axis
    double overlap_hi = 40.0;
    double overlap_tol = 1e-8;
    bool cross_check = true;
};

// Three-parameter Mittag-Leffler function
//
//   E^g_{q,r}(z) = sum_{j>=0} Gamma(g+j) z^j / (j! Gamma(g) Gamma(q j + r))
//
// summed directly with the term recurrence
//   term_{j+1} = term_j * z * (g+j)/(j+1) * Gamma(qj+r)/Gamma(q(j+1)+r),
// Gamma ratios in the log domain. Stops when the term magnitude drops below
// tol*max(1,|sum|) three times in a row; throws NotConverged otherwise.
EvalResult ml3_series(double q, double r, double g, double z, double tol,
                      int max_terms = 2000);
ComplexEvalResult ml3_series(double q, double r, double g, std::complex<double> z,
                             double tol, int max_terms = 2000);

// Contour evaluation of E^g_{q,r}(z) for z = -a <= 0 through the Laplace pair
//   L{ t^{r-1} E^g_{q,r}(-a t^q) }(s) = s^{qg-r} / (s^q + a)^g
// inverted at t = 1.
EvalResult ml3_contour(double q, double r, double g, double z, double tol);

/// Route-selecting evaluation: series for |z| <= z_switch, contour beyond.
/// In the overlap band on the negative real axis both routes are computed and
/// must agree to overlap_tol relative (RouteDisagreement otherwise).
EvalResult ml3_eval(double q, double r, double g, double z, double tol,
                    const Ml3Options& opts = {});

/// Regularized confluent hypergeometric M(a;c;x)/Gamma(c) for a >= 0, c > 0,
/// evaluated in extended precision; x of either sign (Kummer transform keeps
/// the summation positive).
long double hyp1f1_regularized(long double a, long double c, long double x);

/// Extended-precision, non-throwing E^g_{q,r}(z) summation for internal use
/// by the resolvent series route (which needs the roundoff floor, not an
/// exception, to decide on its fallback).
struct Ml3Ext {
    long double value = 0.0L;
    double error = 0.0;   // first-omitted-term bound + roundoff floor
    int terms = 0;
    bool converged = false;
};
Ml3Ext ml3_series_ext(long double q, long double r, long double g, long double z, double tol,
                      int max_terms);

}  // namespace memctrl

#endif  // MEMCTRL_SPECIAL_FUNCTIONS_HPP
