#include <doctest.h>

#include "mehler/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace mehler;

TEST_CASE("gauss rule integrates polynomials of degree 39 exactly") {
    const GaussRule& g = gauss_rule();
    double wsum = 0.0;
    for (std::size_t i = 0; i < GaussRule::order; ++i) {
        wsum += g.w[i];
        if (i > 0)
            CHECK(g.x[i] > g.x[i - 1]);
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // integral of x^38 over [-1, 1] is 2/39
    const double v = integrate_panels([](double x) { return std::pow(x, 38); }, -1.0, 1.0, 1);
    CHECK(v == doctest::Approx(2.0 / 39.0).epsilon(1e-13));
}

TEST_CASE("time quadrature: sqrt substitution handles 1/sqrt(s)") {
    // integral over [0, 2] of 1/sqrt(s) is 2 sqrt(2)
    TimeQuadrature q{2.0, Substitution::sqrt, 8};
    const double v = q.integrate([](double s) { return 1.0 / std::sqrt(s); });
    CHECK(v == doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-13));

    TimeQuadrature u{2.0, Substitution::uniform, 8};
    const double w = u.integrate([](double s) { return std::exp(-s); });
    CHECK(w == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("time quadrature validation") {
    CHECK_THROWS(TimeQuadrature{1.0, Substitution::sqrt, 4}.nodes());
    CHECK_THROWS(TimeQuadrature{-1.0, Substitution::sqrt, 8}.nodes());
    CHECK(TimeQuadrature{0.0, Substitution::sqrt, 8}.nodes().empty());
    CHECK(TimeQuadrature{1.0, Substitution::sqrt, 8}.refined().panels == 16);
}
