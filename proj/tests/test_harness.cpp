#include <doctest.h>

#include "mehler/error.hpp"
#include "mehler/harness.hpp"
#include "mehler/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace mehler;

namespace {

SampleMatrix gaussian_samples(std::size_t n, double sd, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, sd);
    SampleMatrix m{n, 1, std::vector<double>(n)};
    for (double& v : m.values)
        v = normal(gen);
    return m;
}

std::vector<std::string> one_name() { return {"g"}; }

}  // namespace

TEST_CASE("empirical cf of degenerate samples") {
    const SampleMatrix zeros{200, 2, std::vector<double>(400, 0.0)};
    const auto emp = empirical_cf(zeros, {"a", "b"}, default_points());
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t p = 0; p < emp.points.size(); ++p) {
            CHECK(emp.estimates[k][p] == cplx(1.0, 0.0));
            CHECK(emp.se(k, p) == 0.0);
        }
    const auto rep = compare_cf(emp, tabulate_log_cf(emp, [](std::size_t, double) { return cplx{}; }));
    CHECK(rep.pass);
    CHECK(rep.max_abs_gap == 0.0);
}

TEST_CASE("empirical cf of a standard normal sample") {
    const auto emp = empirical_cf(gaussian_samples(20000, 1.0, 1), one_name(), {1.0});
    CHECK(std::abs(emp.estimates[0][0] - std::exp(-0.5)) < 3.0 * emp.se(0, 0));
}

TEST_CASE("estimator is conjugate symmetric and bounded") {
    const auto emp = empirical_cf(gaussian_samples(500, 1.3, 2), one_name(), default_points());
    const std::size_t np = emp.points.size();
    for (std::size_t p = 0; p < np; ++p) {
        CHECK(emp.points[np - 1 - p] == -emp.points[p]);
        CHECK(emp.estimates[0][np - 1 - p] == std::conj(emp.estimates[0][p]));
        CHECK(std::abs(emp.estimates[0][p]) <= 1.0 + 3.0 * emp.se(0, p));
    }
}

TEST_CASE("empirical cf needs enough replicas") {
    CHECK_THROWS_AS(empirical_cf(gaussian_samples(99, 1.0, 3), one_name(), {1.0}), PreconditionError);
    CHECK_THROWS_AS(empirical_cf(gaussian_samples(200, 1.0, 3), {"a", "b"}, {1.0}), PreconditionError);
}

TEST_CASE("comparison against the generating law passes and a wrong variance fails") {
    const auto emp = empirical_cf(gaussian_samples(100000, 1.0, 4), one_name(), default_points());
    const auto truth = tabulate_log_cf(emp, [](std::size_t, double xi) { return cplx(-0.5 * xi * xi); });
    const auto wrong = tabulate_log_cf(emp, [](std::size_t, double xi) { return cplx(-0.75 * xi * xi); });
    const auto good = compare_cf(emp, truth);
    CHECK(good.pass);
    CHECK(good.worst_ratio() <= 1.0);
    const auto bad = compare_cf(emp, wrong);
    CHECK_FALSE(bad.pass);
    CHECK(bad.bonferroni_note().find("6 cells") != std::string::npos);
}

TEST_CASE("self consistency and determinism") {
    const auto emp = empirical_cf(gaussian_samples(1000, 0.8, 5), one_name(), default_points());
    const auto own = tabulate_log_cf(emp, [&](std::size_t k, double xi) {
        const auto it = std::find(emp.points.begin(), emp.points.end(), xi);
        return std::log(emp.estimates[k][static_cast<std::size_t>(it - emp.points.begin())]);
    });
    const auto rep = compare_cf(emp, own);
    CHECK(rep.pass);
    CHECK(rep.max_abs_gap < 1e-14);

    const auto again = empirical_cf(gaussian_samples(1000, 0.8, 5), one_name(), default_points());
    CHECK(again.estimates == emp.estimates);
    CHECK(compare_cf(again, own).max_abs_gap == rep.max_abs_gap);
}

TEST_CASE("two-sample comparison") {
    const auto a = empirical_cf(gaussian_samples(20000, 1.0, 6), one_name(), default_points());
    const auto b = empirical_cf(gaussian_samples(20000, 1.0, 7), one_name(), default_points());
    const auto c = empirical_cf(gaussian_samples(20000, 1.5, 8), one_name(), default_points());
    CHECK(compare_two_sample(a, b, constant_budget(a, 0.0)).pass);
    CHECK_FALSE(compare_two_sample(a, c, constant_budget(a, 0.0)).pass);
}

TEST_CASE("richardson budget") {
    const CellValues coarse{{cplx(-0.5), cplx(0.0, 0.3)}};
    const CellValues fine{{cplx(-0.45), cplx(0.0, 0.3)}};
    const auto b = richardson_budget(coarse, fine);
    CHECK(b[0][0] == doctest::Approx(2.0 * (std::exp(-0.45) - std::exp(-0.5))));
    CHECK(b[0][1] == 0.0);
    CHECK_THROWS_AS(richardson_budget(coarse, CellValues{}), PreconditionError);
}

TEST_CASE("cf distance picks the worst cell") {
    const auto emp = empirical_cf(gaussian_samples(400, 1.0, 9), one_name(), default_points());
    const auto zero = tabulate_log_cf(emp, [](std::size_t, double) { return cplx{}; });
    const auto d = cf_distance(emp, zero);
    CHECK(d.distance == doctest::Approx(compare_cf(emp, zero).max_abs_gap));
    CHECK(d.se > 0.0);
}

TEST_CASE("weierstrass anchors") {
    for (int k : {1, 5, 20}) {
        CHECK(weierstrass_linear_part(k, 0.0) == 0.0);
        CHECK(std::abs(weierstrass_linear_part(k, std::numbers::pi)) < 1e-12);
    }
    CHECK(weierstrass_norm_sq(20) == doctest::Approx(2.0 * (1.0 - std::ldexp(1.0, -20))));
    CHECK_THROWS_AS(weierstrass_linear_part(0, 1.0), DomainError);
}

TEST_CASE("weierstrass direct route matches the series") {
    WeierstrassDirect direct(12);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 20; ++i) {
        const double t = angle(gen);
        CHECK(std::abs(direct(t) - weierstrass_linear_part(12, t)) < 1e-8);
    }
    CHECK(std::abs(direct(0.0)) < 1e-12);
}

TEST_CASE("constant SC identity in Fourier coordinates") {
    const auto zero = sc_constant_check({0.3, 1.7}, {0.0}, 20);
    CHECK(zero.max_residual == 0.0);

    std::mt19937_64 gen(12);
    std::uniform_int_distribution<int> ticks(0, 4096);
    std::vector<double> ts, rs;
    for (int i = 0; i < 10; ++i) {
        ts.push_back(std::ldexp(ticks(gen), -10));
        rs.push_back(std::ldexp(ticks(gen), -10));
    }
    const auto check = sc_constant_check(ts, rs, 20);
    CHECK(check.cases == 100);
    CHECK(check.max_residual <= 1e-12);
    CHECK(check.max_modulus_defect <= 1e-15);
}

TEST_CASE("difference quotient diagnostic") {
    const auto q = difference_quotients(12, {0.1, 0.01, 0.001}, 128);
    REQUIRE(q.size() == 3);
    for (const auto& s : q)
        CHECK(std::isfinite(s.max_quotient));
    CHECK(q[2].max_quotient > q[0].max_quotient);
}
