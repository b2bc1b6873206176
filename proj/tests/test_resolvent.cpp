#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "memctrl/resolvent.hpp"
#include "memctrl/serialize.hpp"
#include "test_util.hpp"

using namespace memctrl;

namespace {

std::vector<double> uniform_times(double T, int nodes) {
    std::vector<double> t(nodes);
    for (int i = 0; i < nodes; ++i) t[i] = T * i / (nodes - 1);
    t[nodes - 1] = T;
    return t;
}

}  // namespace

TEST_CASE("MemoryKernel validation and evaluation") {
    CHECK_THROWS_AS(MemoryKernel(0.0, 0.0, 0.5), ValidationError);
    CHECK_THROWS_AS(MemoryKernel(1.0, -0.1, 0.5), ValidationError);
    CHECK_THROWS_AS(MemoryKernel(1.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(MemoryKernel(1.0, 0.0, 1.0), ValidationError);

    MemoryKernel k(2.0, 0.5, 0.3);
    CHECK_THROWS_AS(k.kernel_at(0.0), std::invalid_argument);
    const double t = 0.7;
    CHECK(k.kernel_at(t) ==
          doctest::Approx(2.0 * std::exp(-0.5 * t) * std::pow(t, -0.7) / std::tgamma(0.3))
              .epsilon(1e-14));

    // (1 * kappa): beta = 0 closed form, beta > 0 vs adaptive reference
    // (de-singularized by the u = tau^nu substitution)
    MemoryKernel k0(1.5, 0.0, 0.4);
    CHECK(k0.kernel_integral(0.8) ==
          doctest::Approx(1.5 * std::pow(0.8, 0.4) / std::tgamma(1.4)).epsilon(1e-13));
    const double ref =
        testutil::ref_singular_integral([&](double s) { return k.kernel_at(s); }, 0.3, 0.9);
    CHECK(k.kernel_integral(0.9) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("kernel moments against adaptive quadrature") {
    MemoryKernel k(1.0, 0.5, 0.5);
    for (int n = 0; n <= 2; ++n) {
        for (auto [a, b] : {std::pair{0.0, 0.3}, {0.2, 0.9}, {1.0, 2.5}}) {
            auto f = [&](double tau) { return std::pow(tau, n) * k.kernel_at(tau); };
            const double ref = a == 0.0
                                   ? testutil::ref_singular_integral(f, 0.5, b)
                                   : testutil::ref_integral(f, a, b);
            CHECK(k.moment(n, a, b) == doctest::Approx(ref).epsilon(1e-11));
        }
    }
    MemoryKernel k0(0.7, 0.0, 0.25);
    CHECK(k0.moment(1, 0.0, 1.0) ==
          doctest::Approx(0.7 / std::tgamma(0.25) / 1.25).epsilon(1e-13));
}

TEST_CASE("laplace_symbol values and symmetry") {
    // alpha -> 0 guarded path
    MemoryKernel tiny(1e-300, 0.0, 0.5);
    auto v = laplace_symbol(tiny, 1.0, {1.0, 0.0});
    CHECK(std::abs(v - std::complex<double>(0.5, 0.0)) <= 1e-15);

    // direct substitution: 1/(3 + 1/sqrt(3))
    MemoryKernel k(1.0, 1.0, 0.5);
    auto w = laplace_symbol(k, 1.0, {2.0, 0.0});
    CHECK(std::abs(w - std::complex<double>(1.0 / (3.0 + 1.0 / std::sqrt(3.0)), 0.0)) <= 1e-15);
    CHECK(w.real() == doctest::Approx(0.27953650740119703).epsilon(1e-14));

    // conjugate symmetry
    MemoryKernel k2(1.0, 0.5, 0.5);
    auto a = laplace_symbol(k2, 4.0, {1.0, 2.0});
    auto b = laplace_symbol(k2, 4.0, {1.0, -2.0});
    CHECK(std::abs(a - std::conj(b)) <= 1e-16 * std::abs(a));

    CHECK_THROWS_AS(laplace_symbol(k2, 1.0, {-0.6, 0.0}), BranchCutError);
}

TEST_CASE("laplace_symbol pole raises SingularSymbol") {
    // poles of 1/(s + 1 + (s+1/2)^{-1/2}) via w^3 + w/2 + 1 = 0, s = w^2 - 1/2
    std::complex<double> w(0.42, 1.01);
    for (int i = 0; i < 100; ++i) {
        auto f = w * w * w + 0.5 * w + 1.0;
        auto df = 3.0 * w * w + 0.5;
        w -= f / df;
    }
    std::complex<double> pole = w * w - 0.5;
    MemoryKernel k(1.0, 0.5, 0.5);
    CHECK_THROWS_AS(laplace_symbol(k, 1.0, pole), SingularSymbol);
    // the located pole sits outside the integration wedge used by the contour
    CHECK(std::arg(pole) > std::numbers::pi / 2 + 0.9 * 0.5 * std::numbers::pi / 2);
}

TEST_CASE("scalar_resolvent_ml values") {
    MemoryKernel k(1.0, 0.5, 0.5);
    CHECK(scalar_resolvent_ml(k, 7.3, 0.0, 1e-12).value == 1.0);

    // degenerate reduction: alpha -> 0 collapses to e^{-beta t} e^{(beta-lam)t}
    MemoryKernel tiny(1e-12, 0.5, 0.5);
    auto d = scalar_resolvent_ml(tiny, 1.0, 1.0, 1e-12);
    CHECK(std::abs(d.value - std::exp(-1.0)) <= 1e-8 * std::exp(-1.0));

    // independent contour oracle
    auto ml = scalar_resolvent_ml(k, 1.0, 0.5, 1e-12);
    auto ct = scalar_resolvent_contour(k, 1.0, 0.5);
    CHECK(std::abs(ml.value - ct.value) <= 1e-6 * std::abs(ct.value));

    // frozen 40-digit anchors (both series arrangements exercised)
    struct Ref {
        double lam, t, value;
    };
    const Ref refs[] = {{1.0, 0.5, 0.4496303611640667},   {1.0, 1.0, 0.1224922891566366},
                        {4.0, 0.5, -0.02305730542246576}, {9.0, 1.0, -0.01168988127194288},
                        {25.0, 1.0, -0.003561174332259161}, {25.0, 0.25, -0.02572273452886727}};
    for (const auto& r : refs) {
        auto e = scalar_resolvent_ml(k, r.lam, r.t, 1e-12);
        CHECK(std::abs(e.value - r.value) <= 1e-11 * std::abs(r.value));
        CHECK(e.error_estimate >= 0.0);
    }
}

TEST_CASE("scalar_resolvent_contour behavior") {
    MemoryKernel tiny(1e-12, 0.0, 0.5);
    auto e = scalar_resolvent_contour(tiny, 1.0, 1.0);
    CHECK(std::abs(e.value - std::exp(-1.0)) <= 1e-8 * std::exp(-1.0));

    MemoryKernel k(1.0, 0.5, 0.5);
    auto a = scalar_resolvent_contour(k, 1.0, 0.5);
    auto b = scalar_resolvent_ml(k, 1.0, 0.5, 1e-12);
    CHECK(std::abs(a.value - b.value) <= 1e-6 * std::abs(b.value));
    CHECK(a.error_estimate <= 1e-6);

    CHECK_THROWS_AS(scalar_resolvent_contour(k, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(scalar_resolvent_contour(k, 1.0, 0.5, 8), std::invalid_argument);
}

TEST_CASE("build_resolvent_table basics") {
    MemoryKernel k(1.0, 0.5, 0.5);
    SpectralSystem sys(5, 64, 2.0);

    // single-node grid: column of ones
    ResolventTable t0 = build_resolvent_table(k, sys, {0.0}, ResolventRoute::MLSeries, 1e-10);
    CHECK(t0.time_count() == 1);
    for (int m = 0; m < 5; ++m) CHECK(t0.values(m, 0) == 1.0);
    CHECK(t0.sup_norm == 1.0);

    auto times = uniform_times(1.0, 33);
    ResolventTable ml = build_resolvent_table(k, sys, times, ResolventRoute::MLSeries, 1e-10);
    ResolventTable ct = build_resolvent_table(k, sys, times, ResolventRoute::Contour, 1e-10);
    for (int m = 0; m < 5; ++m) {
        CHECK(ml.values(m, 0) == 1.0);
        CHECK(ct.values(m, 0) == 1.0);
    }
    double worst = 0.0;
    for (int m = 0; m < 5; ++m)
        for (int kk = 1; kk < 33; ++kk)
            worst = std::max(worst, std::abs(ml.values(m, kk) - ct.values(m, kk)) /
                                        std::max(1e-30, std::abs(ct.values(m, kk))));
    CHECK(worst <= 1e-6);
    CHECK(ml.sup_norm <= 1.0 + 1e-8);
    CHECK(ct.sup_norm <= 1.0 + 1e-8);

    CHECK_THROWS_AS(build_resolvent_table(k, sys, {0.5, 1.0}, ResolventRoute::MLSeries, 1e-10),
                    ValidationError);
    CHECK_THROWS_AS(build_resolvent_table(k, sys, {0.0, 0.5, 0.5}, ResolventRoute::MLSeries, 1e-10),
                    ValidationError);
}

TEST_CASE("apply_resolvent diagonal action") {
    MemoryKernel k(1.0, 0.5, 0.5);
    SpectralSystem sys(4, 64, 2.0);
    auto table = build_resolvent_table(k, sys, uniform_times(1.0, 9), ResolventRoute::MLSeries, 1e-10);

    Vector zero = Vector::Zero(4);
    CHECK(apply_resolvent(table, 3, zero).norm() == 0.0);

    for (int m = 0; m < 4; ++m) {
        Vector e = Vector::Unit(4, m);
        Vector out = apply_resolvent(table, 5, e);
        CHECK(out[m] == table.values(m, 5));
        CHECK(out.cwiseAbs().sum() == std::abs(table.values(m, 5)));
    }

    auto gen = testutil::rng(7);
    Vector state = testutil::random_vector(gen, 4);
    CHECK(apply_resolvent(table, 8, state).norm() <= table.sup_norm * state.norm() * (1 + 1e-15));

    CHECK_THROWS_AS(apply_resolvent(table, 99, zero), DimensionMismatch);
    CHECK_THROWS_AS(apply_resolvent(table, 0, Vector::Zero(3)), DimensionMismatch);
}

TEST_CASE("resolvent equation residual") {
    SpectralSystem sys(1, 64, 2.0);

    // alpha -> 0: pure quadrature error of the exponential (Simpson-level)
    MemoryKernel tiny(1e-12, 0.0, 0.5);
    auto t129 = build_resolvent_table(tiny, sys, uniform_times(1.0, 129), ResolventRoute::MLSeries,
                                      1e-12);
    CHECK(verify_resolvent_equation(t129, 0) <= 1e-6);

    // refinement order >= 1.8 for the singular kernel
    MemoryKernel k(1.0, 0.0, 0.5);
    double res[3];
    int idx = 0;
    for (int nodes : {65, 129, 257}) {
        auto t = build_resolvent_table(k, sys, uniform_times(1.0, nodes), ResolventRoute::MLSeries,
                                       1e-12);
        res[idx++] = verify_resolvent_equation(t, 0);
    }
    CHECK(res[1] <= 1e-4);
    const double order = std::log2(res[0] / res[2]) / 2.0;
    CHECK(order >= 1.8);
}

TEST_CASE("decay diagnostics") {
    MemoryKernel k(1.0, 0.0, 0.5);
    SpectralSystem sys(2, 64, 2.0);
    auto table = build_resolvent_table(k, sys, uniform_times(1.0, 33), ResolventRoute::MLSeries,
                                       1e-10);
    DecayReport rep = decay_diagnostics(table, k, sys);

    // t = 0 rows: lhs = rhs = 1, no violation
    for (const auto& row : rep.rows)
        if (row.t == 0.0) {
            CHECK(row.lhs == 1.0);
            CHECK(row.rhs == 1.0);
            CHECK(!row.violation);
        }

    // derivative identity s_m'(0+) = -lam_m within 5%
    for (const auto& d : rep.derivatives) CHECK(d.rel_deviation <= 0.05);

    // beta = 0 row at (m=1, t=0.5) recorded with no violation
    bool found = false;
    for (const auto& row : rep.rows)
        if (row.mode == 1 && std::abs(row.t - 0.5) < 1e-12) {
            found = true;
            CHECK(!row.violation);
        }
    CHECK(found);
}

TEST_CASE("resolvent table serialization round trips") {
    MemoryKernel k(1.0, 0.5, 0.5);
    SpectralSystem sys(3, 64, 2.0);
    auto table = build_resolvent_table(k, sys, uniform_times(1.0, 9), ResolventRoute::Contour,
                                       1e-10);

    const std::string csv = resolvent_table_csv(table);
    ResolventTable back = resolvent_table_from_csv(csv, k);
    CHECK(back.modes() == table.modes());
    CHECK(back.time_count() == table.time_count());
    for (int m = 0; m < table.modes(); ++m)
        for (int kk = 0; kk < table.time_count(); ++kk) {
            CHECK(back.values(m, kk) == table.values(m, kk));  // lossless at 17 digits
            CHECK(back.error_estimates(m, kk) == table.error_estimates(m, kk));
            CHECK(back.entry_routes[m][kk] == table.entry_routes[m][kk]);
        }
    CHECK(resolvent_table_csv(back) == csv);

    auto j = resolvent_table_json(table);
    ResolventTable jback = resolvent_table_from_json(j);
    for (int m = 0; m < table.modes(); ++m)
        for (int kk = 0; kk < table.time_count(); ++kk)
            CHECK(jback.values(m, kk) == table.values(m, kk));
    CHECK(jback.sup_norm == table.sup_norm);
}
