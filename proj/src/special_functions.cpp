#include "memctrl/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "memctrl/laplace_inversion.hpp"

namespace memctrl {

double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw PoleError("gamma_fn: pole at nonpositive integer x=" + std::to_string(x));
    return std::tgamma(x);
}

double log_gamma(double x) {
    if (x <= 0.0) throw PoleError("log_gamma: requires x > 0");
    return std::lgamma(x);
}

namespace {

// Direct summation of E^g_{q,r}(z) with the log-Gamma term recurrence.
// Scalar is double or long double; Z is Scalar or complex<double>.
template <typename Scalar, typename Z>
struct Ml3Sum {
    Z value{};
    double error = 0.0;
    int terms = 0;
    double max_abs_term = 0.0;
    bool converged = false;
    double last_term_mag = 0.0;
};

// log|1/Gamma(x)| with sign; sign 0 marks a pole of Gamma (term vanishes).
template <typename Scalar>
void inv_gamma_signed(Scalar x, Scalar& log_mag, int& sign) {
    auto lg = [](Scalar v) -> Scalar {
        if constexpr (std::is_same_v<Scalar, long double>)
            return lgammal(v);
        else
            return std::lgamma(v);
    };
    if (x > Scalar(0)) {
        log_mag = -lg(x);
        sign = 1;
        return;
    }
    if (std::floor((double)x) == (double)x) {
        log_mag = -std::numeric_limits<Scalar>::infinity();
        sign = 0;
        return;
    }
    // 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
    Scalar s = std::sin(std::numbers::pi_v<double> * (double)x);
    log_mag = lg(Scalar(1) - x) + std::log(std::abs((double)s)) -
              std::log(std::numbers::pi_v<double>);
    sign = s > Scalar(0) ? 1 : -1;
}

template <typename Scalar, typename Z>
Ml3Sum<Scalar, Z> ml3_sum(Scalar q, Scalar r, Scalar g, Z z, double tol, int max_terms) {
    auto lg = [](Scalar x) -> Scalar {
        if constexpr (std::is_same_v<Scalar, long double>)
            return lgammal(x);
        else
            return std::lgamma(x);
    };
    auto ex = [](Scalar x) -> Scalar {
        if constexpr (std::is_same_v<Scalar, long double>)
            return expl(x);
        else
            return std::exp(x);
    };
    // term_j = Gamma(g+j) z^j / (j! Gamma(g) Gamma(qj+r)); closed form in the
    // log domain for term 0 and whenever a Gamma argument is nonpositive,
    // the ratio recurrence otherwise.
    auto closed_term = [&](int j) -> Z {
        Scalar lm;
        int sg;
        inv_gamma_signed(q * Scalar(j) + r, lm, sg);
        if (sg == 0) return Z(0);
        Scalar lmag = lg(g + Scalar(j)) - lg(Scalar(j) + Scalar(1)) - lg(g) + lm;
        return Z(sg) * std::pow(z, j) * Z(ex(lmag));
    };

    Ml3Sum<Scalar, Z> out;
    Z term = closed_term(0);
    Z sum = term;
    out.max_abs_term = (double)std::abs(term);
    int quiet = 0;
    int j = 0;
    for (j = 0; j < max_terms; ++j) {
        Scalar a1 = q * Scalar(j) + r;
        Scalar a2 = q * Scalar(j + 1) + r;
        if (a1 > Scalar(0) && a2 > Scalar(0) && std::abs(term) > 0.0) {
            // term_{j+1} = term_j * z * (g+j)/(j+1) * Gamma(qj+r)/Gamma(q(j+1)+r);
            // for integer q the Gamma ratio telescopes exactly (no lgamma noise)
            Scalar ratio;
            const int qi = static_cast<int>(q);
            if (q == Scalar(qi) && qi >= 1 && qi <= 8) {
                Scalar prod = Scalar(1);
                for (int i = 0; i < qi; ++i) prod *= a1 + Scalar(i);
                ratio = Scalar(1) / prod;
            } else {
                ratio = ex(lg(a1) - lg(a2));
            }
            term = term * z * (Scalar(g + Scalar(j)) / Scalar(j + 1)) * Z(ratio);
        } else {
            term = closed_term(j + 1);
        }
        sum += term;
        double mag = (double)std::abs(term);
        out.max_abs_term = std::max(out.max_abs_term, mag);
        double ref = std::max(1.0, (double)std::abs(sum));
        if (mag < tol * ref)
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 3) {
            out.converged = true;
            break;
        }
    }
    out.value = sum;
    out.terms = std::min(j + 2, max_terms + 1);
    out.last_term_mag = (double)std::abs(term);
    double eps = std::is_same_v<Scalar, long double> ? 1.1e-19 : 2.3e-16;
    // truncation bound (first omitted term) plus the summation roundoff floor
    out.error = out.last_term_mag + eps * out.max_abs_term * std::sqrt((double)out.terms);
    return out;
}

}  // namespace

EvalResult ml3_series(double q, double r, double g, double z, double tol, int max_terms) {
    if (!(q > 0.0) || !(g > 0.0) || !(tol > 0.0))
        throw std::invalid_argument("ml3_series: requires q > 0, g > 0, tol > 0");
    auto s = ml3_sum<long double, long double>((long double)q, (long double)r, (long double)g,
                                               (long double)z, tol, max_terms);
    if (!s.converged)
        throw NotConverged("ml3_series: stopping rule not reached", s.terms, s.last_term_mag);
    EvalResult out;
    out.value = (double)s.value;
    out.error_estimate = s.error;
    out.terms_used = s.terms;
    out.route = EvalRoute::Series;
    return out;
}

ComplexEvalResult ml3_series(double q, double r, double g, std::complex<double> z, double tol,
                             int max_terms) {
    if (!(q > 0.0) || !(g > 0.0) || !(tol > 0.0))
        throw std::invalid_argument("ml3_series: requires q > 0, g > 0, tol > 0");
    auto s = ml3_sum<double, std::complex<double>>(q, r, g, z, tol, max_terms);
    if (!s.converged)
        throw NotConverged("ml3_series: stopping rule not reached", s.terms, s.last_term_mag);
    ComplexEvalResult out;
    out.value = s.value;
    out.error_estimate = s.error;
    out.terms_used = s.terms;
    out.route = EvalRoute::Series;
    return out;
}

EvalResult ml3_contour(double q, double r, double g, double z, double tol) {
    if (!(q > 0.0) || !(g > 0.0)) throw std::invalid_argument("ml3_contour: q, g must be > 0");
    if (z > 0.0)
        throw std::invalid_argument("ml3_contour: only z <= 0 supported (pole right of contour)");
    const double a = -z;
    // L{ t^{r-1} E^g_{q,r}(-a t^q) }(s) = s^{q g - r} / (s^q + a)^g, inverted at t = 1.
    // Singularities: branch at s = 0 (cut on the negative axis) and the ring
    // s^q = -a at |arg s| = pi/q; keep the rays strictly inside that angle.
    const double pi = std::numbers::pi;
    ContourSpec spec;
    spec.half_angle = pi / 2 + 0.4 * (pi / q - pi / 2);
    spec.radius = 1.0;  // e^{rt} amplification at t = 1 stays O(1)
    spec.base_nodes = 48;
    auto symbol = [q, r, g, a](std::complex<double> s) {
        std::complex<double> sq = std::pow(s, q);
        return std::pow(s, q * g - r) / std::pow(sq + a, g);
    };
    // node count rises until the doubling check clears (the pole ring
    // s^q = -a can sit close to the rays for small |z|)
    EvalResult out;
    out.route = EvalRoute::Contour;
    for (int attempt = 0; attempt < 3; ++attempt) {
        InversionResult inv = invert_laplace(symbol, 1.0, spec);
        out.value = inv.value;
        out.error_estimate = std::max(inv.doubling_diff, inv.imag_residual);
        out.terms_used = inv.nodes_used;
        if (out.error_estimate <= std::max(tol, 1e-9) * std::max(1.0, std::abs(out.value)))
            return out;
        spec.base_nodes *= 2;
    }
    throw NonConvergedQuadrature("ml3_contour: node-doubling disagreement too large",
                                 out.error_estimate);
}

EvalResult ml3_eval(double q, double r, double g, double z, double tol, const Ml3Options& opts) {
    const bool in_band =
        z < 0.0 && std::abs(z) >= opts.overlap_lo && std::abs(z) <= opts.overlap_hi;
    if (std::abs(z) <= opts.z_switch) {
        EvalResult series = ml3_series(q, r, g, z, tol, opts.max_terms);
        if (in_band && opts.cross_check) {
            EvalResult contour = ml3_contour(q, r, g, z, tol);
            double rel = std::abs(series.value - contour.value) /
                         std::max(1e-300, std::abs(series.value));
            if (rel > opts.overlap_tol)
                throw RouteDisagreement("ml3_eval: series/contour disagree in the overlap band",
                                        series.value, contour.value, rel);
        }
        return series;
    }
    if (z > 0.0) {
        // positive arguments stay on the series route (all terms positive,
        // no cancellation); allow a larger budget
        return ml3_series(q, r, g, z, tol, std::max(opts.max_terms, 4000));
    }
    EvalResult contour = ml3_contour(q, r, g, z, tol);
    if (in_band && opts.cross_check) {
        EvalResult series = ml3_series(q, r, g, z, tol, opts.max_terms);
        double rel =
            std::abs(series.value - contour.value) / std::max(1e-300, std::abs(contour.value));
        if (rel > opts.overlap_tol)
            throw RouteDisagreement("ml3_eval: series/contour disagree in the overlap band",
                                    series.value, contour.value, rel);
    }
    return contour;
}

Ml3Ext ml3_series_ext(long double q, long double r, long double g, long double z, double tol,
                      int max_terms) {
    auto s = ml3_sum<long double, long double>(q, r, g, z, tol, max_terms);
    Ml3Ext out;
    out.value = s.value;
    out.error = s.error;
    out.terms = s.terms;
    out.converged = s.converged;
    return out;
}

long double hyp1f1_regularized(long double a, long double c, long double x) {
    if (!(c > 0.0L)) throw std::invalid_argument("hyp1f1_regularized: requires c > 0");
    if (a < 0.0L) throw std::invalid_argument("hyp1f1_regularized: requires a >= 0");
    long double prefactor = 1.0L;
    if (x < 0.0L) {  // Kummer: M(a;c;x) = e^x M(c-a;c;-x), keeps all terms positive
        prefactor = expl(x);
        a = c - a;
        x = -x;
    }
    long double term = expl(-lgammal(c));
    long double sum = term;
    for (int k = 0; k < 100000; ++k) {
        term *= (a + k) * x / ((c + k) * (k + 1));
        sum += term;
        if (term < 1e-22L * sum && k > 2) break;
    }
    return prefactor * sum;
}

}  // namespace memctrl
