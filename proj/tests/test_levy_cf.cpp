#include <doctest.h>

#include "mehler/error.hpp"
#include "mehler/levy.hpp"
#include "mehler/panel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace mehler;

namespace {

auto default_grid() { return make_grid(GridSpec{}); }

std::vector<GridFunction> default_panel(const std::shared_ptr<const SpatialGrid>& g) {
    return sample_panel(g, parse_panel(default_panel_specs()));
}

LocalMechanism single_jump(double u, double mass) {
    return {0.0, AtomicLevyMeasure({{u, mass}})};
}

}  // namespace

TEST_CASE("levy exponent examples") {
    const LocalMechanism m = single_jump(1.0, 1.0);
    CHECK(std::abs(levy_exponent(m, 0.0)) == 0.0);
    const cplx v = levy_exponent(m, std::numbers::pi);
    CHECK(std::abs(v - cplx(-2.0, -std::numbers::pi)) < 1e-14);
    const LocalMechanism g{0.7, {}};
    const cplx w = levy_exponent(g, 1.5);
    CHECK(w.imag() == 0.0);
    CHECK(w.real() == doctest::Approx(-0.7 * 2.25));
}

TEST_CASE("compensated exponential is accurate for small arguments") {
    // Reference: alternating Taylor series in long double, summed to convergence.
    auto reference = [](long double y) {
        long double re = 0.0L, im = 0.0L, term = 1.0L;
        for (int k = 1; k < 60; ++k) {
            term *= y / k;
            const int phase = k % 4;
            if (k >= 2 && phase == 2) re -= term;
            if (k >= 2 && phase == 0) re += term;
            if (k >= 3 && phase == 3) im -= term;
            if (k >= 3 && phase == 1) im += term;
        }
        return std::pair<double, double>(static_cast<double>(re), static_cast<double>(im));
    };
    for (double y : {1e-8, 1e-4, 0.01, 0.2, 0.3, 1.0, -0.7}) {
        const cplx v = compensated_exponential(y);
        const auto [re, im] = reference(y);
        CHECK(std::abs(v.real() - re) <= 1e-14 * std::abs(re));
        CHECK(std::abs(v.imag() - im) <= 1e-12 * std::abs(im));
    }
}

TEST_CASE("levy exponent: real part nonpositive, Laplace link") {
    const LocalMechanism m{0.4, AtomicLevyMeasure({{0.5, 1.0}, {2.0, 0.3}})};
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i)
        CHECK(levy_exponent(m, u(gen)).real() <= 0.0);
    // psi(z) = phi(i z) for z >= 0
    for (double z : {0.0, 0.3, 1.0, 2.5}) {
        const cplx viaF = levy_exponent(m, cplx(0.0, z));
        CHECK(std::abs(viaF.imag()) < 1e-14);
        CHECK(viaF.real() == doctest::Approx(branching_mechanism_real(m, z)).epsilon(1e-12));
    }
}

TEST_CASE("branching mechanism, Laplace form") {
    CHECK(branching_mechanism_real(LocalMechanism{1.0, {}}, 0.0) == 0.0);
    CHECK(branching_mechanism_real(LocalMechanism{1.0, {}}, 2.0) == doctest::Approx(4.0));
    CHECK(branching_mechanism_real(single_jump(1.0, 1.0), 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(branching_mechanism_real(LocalMechanism{1.0, {}}, -1.0), DomainError);
    CHECK_THROWS_AS(branching_mechanism_real(single_jump(-1.0, 1.0), 1.0), DomainError);
    // convex and nonnegative
    const LocalMechanism m{0.2, AtomicLevyMeasure({{0.5, 2.0}, {3.0, 0.1}})};
    for (double z = 0.05; z < 4.0; z += 0.05) {
        const double a = branching_mechanism_real(m, z - 0.05);
        const double b = branching_mechanism_real(m, z);
        const double c = branching_mechanism_real(m, z + 0.05);
        CHECK(b >= 0.0);
        CHECK(a + c - 2.0 * b >= -1e-14);
    }
}

TEST_CASE("atomic Levy measure flags") {
    const AtomicLevyMeasure m({{1.0, 2.0}, {-0.5, 1.0}});
    CHECK(m.finite_activity());
    CHECK(m.bounded_weighted());
    CHECK_FALSE(m.positive_support());
    CHECK(m.total_mass() == 3.0);
    CHECK(m.mean_jump_rate() == doctest::Approx(1.5));
    const AtomicLevyMeasure inf({{0.1, std::numeric_limits<double>::infinity()}});
    CHECK_FALSE(inf.finite_activity());
    CHECK_FALSE(inf.bounded_weighted());
    CHECK_THROWS_AS(AtomicLevyMeasure({{0.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(AtomicLevyMeasure({{1.0, -1.0}}), DomainError);
}

TEST_CASE("triplet log-CF") {
    LevyTriplet tr;
    tr.b = Eigen::Vector2d(0.3, -0.2);
    tr.R = Eigen::Matrix2d{{1.0, 0.2}, {0.2, 0.5}};
    tr.validate();
    CHECK(std::abs(triplet_log_cf(tr, Eigen::Vector2d::Zero())) == 0.0);

    LevyTriplet gauss = tr;
    gauss.b.setZero();
    const cplx g = triplet_log_cf(gauss, Eigen::Vector2d(0.7, 1.1));
    CHECK(g.imag() == 0.0);
    CHECK(g.real() <= 0.0);

    LevyTriplet big;
    big.b = Eigen::Vector2d::Zero();
    big.R = Eigen::Matrix2d::Zero();
    big.jumps.push_back({Eigen::Vector2d(1.5, 0.5), 0.8});
    const Eigen::Vector2d a(0.4, -0.9);
    const double xa = 1.5 * 0.4 - 0.5 * 0.9;
    const cplx expected = 0.8 * (std::exp(cplx(0.0, xa)) - 1.0);
    CHECK(std::abs(triplet_log_cf(big, a) - expected) < 1e-15);

    LevyTriplet bad = tr;
    bad.R(0, 1) = 5.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad.R = Eigen::Matrix2d{{1.0, 2.0}, {2.0, 1.0}};
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("triplet flow under transport and convolution") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> n;
    const int d = 3;
    auto random_triplet = [&] {
        LevyTriplet tr;
        tr.b = Eigen::VectorXd(d);
        for (int i = 0; i < d; ++i)
            tr.b(i) = n(gen);
        Eigen::MatrixXd a(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                a(i, j) = n(gen);
        tr.R = a * a.transpose();
        for (int k = 0; k < 4; ++k) {
            Eigen::VectorXd x(d);
            for (int i = 0; i < d; ++i)
                x(i) = 0.6 * n(gen);
            tr.jumps.push_back({x, 0.5 + k});
        }
        return tr;
    };
    for (int rep = 0; rep < 10; ++rep) {
        const LevyTriplet r = random_triplet();
        const LevyTriplet t = random_triplet();
        Eigen::MatrixXd T(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                T(i, j) = 0.8 * n(gen);
        const LevyTriplet c = transport_convolve(r, T, t);
        c.validate();
        Eigen::VectorXd a(d);
        for (int i = 0; i < d; ++i)
            a(i) = n(gen);
        const cplx lhs = triplet_log_cf(c, a);
        const cplx rhs = triplet_log_cf(r, T.transpose() * a) + triplet_log_cf(t, a);
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("Gaussian example: forward route, monotone trace, SC identity") {
    auto grid = default_grid();
    const auto panel = default_panel(grid);
    const double c = 0.5, x0 = 1.0;
    BranchingMechanism mech{GridFunction::sample(grid, [c](double) { return c; }), {}};
    const auto el = EntranceLawCF::catalytic(mech, CatalystMeasure({{x0, 1.0}}));
    const TimeQuadrature tq{1.0, Substitution::sqrt, 8};

    CHECK(std::abs(cf_gaussian_example(c, x0, 0.0, panel[0])) == 0.0);
    CHECK(std::abs(cf_gaussian_example(c, x0, 0.7, GridFunction::zero(grid))) == 0.0);
    for (const auto& f : panel) {
        const cplx a = sc_from_entrance_law(el, 0.9, f, tq);
        const cplx b = cf_gaussian_example(c, x0, 0.9, f);
        CHECK(std::abs(a - b) < 1e-6);
        CHECK(b.imag() == 0.0);
        CHECK(b.real() <= 0.0);
        double prev = 0.0;
        for (double t : {0.1, 0.3, 0.6, 1.0}) {
            const double v = -cf_gaussian_example(c, x0, t, f).real();
            CHECK(v >= prev);
            prev = v;
        }
        const LogCF L = [&](double t, const GridFunction& g) { return cf_gaussian_example(c, x0, t, g); };
        CHECK(sc_residual(L, 0.4, 0.6, f) < 1e-6);
        CHECK(sc_residual(L, 0.0, 0.6, f) == 0.0);
    }
    CHECK(std::abs(sc_from_entrance_law(el, 0.0, panel[0], tq)) == 0.0);

    // Additivity: value at r+t is value at t plus value of P_t f at r.
    const double r = 0.3, t = 0.5;
    const auto& f = panel[1];
    const cplx whole = sc_from_entrance_law(el, r + t, f, tq);
    const cplx parts = sc_from_entrance_law(el, t, f, tq) +
                       sc_from_entrance_law(el, r, apply_semigroup(t, f), tq);
    CHECK(std::abs(whole - parts) < 1e-6);
}

TEST_CASE("jump example: precondition, localisation, SC identity") {
    auto grid = default_grid();
    const auto panel = default_panel(grid);
    const AtomicLevyMeasure m({{0.8, 1.5}, {-0.5, 1.0}, {2.0, 0.3}});
    CHECK(std::abs(cf_jump_example(m, 0.0, panel[0])) == 0.0);
    const auto far = GridFunction::sample(grid, [](double x) { return std::exp(-(x - 6) * (x - 6)); });
    CHECK(std::abs(cf_jump_example(m, 0.01, far)) < 1e-12);
    const AtomicLevyMeasure inf({{0.1, std::numeric_limits<double>::infinity()}});
    CHECK_THROWS_AS(cf_jump_example(inf, 1.0, panel[0]), PreconditionError);
    const LogCF L = [&](double t, const GridFunction& g) { return cf_jump_example(m, t, g); };
    for (const auto& f : panel) {
        CHECK(sc_residual(L, 0.35, 0.5, f) < 1e-6);
        const cplx v = L(0.8, f);
        CHECK(v.real() <= 0.0);
        // conjugate symmetry
        CHECK(std::abs(L(0.8, f.scaled(-1.0)) - std::conj(v)) < 1e-12);
        // centeredness: derivative in the multiplier vanishes at 0
        const double h = 1e-5;
        const cplx d = (L(0.8, f.scaled(h)) - L(0.8, f.scaled(-h))) / (2.0 * h);
        CHECK(std::abs(d) < 1e-6);
    }
}

TEST_CASE("entrance OU log-CF closed form for a sine") {
    auto grid = default_grid();
    const double w = 1.7, c = 0.6, t = 0.9;
    const auto f = GridFunction::sample(grid, [w](double x) { return std::sin(w * x); });
    const double expected = -c * (1.0 - std::exp(-w * w * t)) / 4.0;
    // Truncating D at epsilon drops O(epsilon^2) of the time integral.
    const cplx v = entrance_ou_log_cf(LocalMechanism{c, {}}, {}, t, f);
    CHECK(std::abs(v - cplx(expected, 0.0)) < 1e-8);
    GridSpec tight;
    tight.epsilon = 1e-6;
    const auto g2 = make_grid(tight);
    const auto f2 = GridFunction::sample(g2, [w](double x) { return std::sin(w * x); });
    const cplx v2 = entrance_ou_log_cf(LocalMechanism{c, {}}, {}, t, f2);
    CHECK(std::abs(v2 - cplx(expected, 0.0)) < 1e-10);
}

TEST_CASE("limit OU log-CF special cases") {
    auto grid = default_grid();
    const auto panel = default_panel(grid);
    const double c = 0.8, x0 = 1.3, t = 0.7;
    BranchingMechanism unit{GridFunction::sample(grid, [](double) { return 1.0; }), {}};
    const CatalystMeasure eta({{x0, c}});
    const SignedAtomicMeasure none;
    CHECK(std::abs(limit_ou_log_cf(unit, eta, none, t, GridFunction::zero(grid))) == 0.0);
    for (const auto& f : panel)
        CHECK(std::abs(limit_ou_log_cf(unit, eta, none, t, f) - cf_gaussian_example(c, x0, t, f)) <
              1e-9);
    BranchingMechanism zero{GridFunction::zero(grid), {}};
    const SignedAtomicMeasure mu({{0.7, 2.0}, {2.0, -0.5}});
    const auto& f = panel[0];
    const cplx v = limit_ou_log_cf(zero, eta, mu, t, f);
    const double drift = 2.0 * semigroup_at(t, f, 0.7) - 0.5 * semigroup_at(t, f, 2.0);
    CHECK(v.real() == 0.0);
    CHECK(v.imag() == doctest::Approx(drift).epsilon(1e-14));
}

TEST_CASE("SC residual and negative control") {
    auto grid = default_grid();
    const auto panel = default_panel(grid);
    const double c = 0.5, x0 = 1.0;
    const LogCF gauss = [&](double t, const GridFunction& g) { return cf_gaussian_example(c, x0, t, g); };
    const AtomicLevyMeasure m({{0.8, 1.5}, {-0.5, 1.0}});
    const LogCF jump = [&](double t, const GridFunction& g) { return cf_jump_example(m, t, g); };
    CHECK(sc_residual(gauss, 0.5, 0.5, panel[0], KernelKind::free) > 1e-5);
    CHECK(sc_residual(jump, 0.5, 0.5, panel[0], KernelKind::free) > 1e-5);
}

TEST_CASE("h-transform log-CF") {
    auto grid = default_grid();
    const LocalMechanism mech{0.0, AtomicLevyMeasure({{1.0, 1.2}, {-0.6, 0.9}})};
    const SignedAtomicMeasure mu({{0.0, 0.5}, {1.0, 0.25}});
    const BoundaryGridFunction origin{1.0, GridFunction::zero(grid)};
    CHECK(std::abs(h_transform_log_cf(mech, mu, 0.6, origin)) == 0.0);
    const auto f0 = parse_test_function("hsin:2:1.5:1");
    const BoundaryGridFunction f{0.0, GridFunction::sample(grid, f0.eval)};
    const cplx v = h_transform_log_cf(mech, mu, 0.6, f);
    const GridFunction hf = f.interior.times(excessive_h);
    const double drift = 0.5 * 2.0 * entrance_functional(0.6, hf) +
                         0.25 * semigroup_at(0.6, hf, 1.0) / excessive_h(1.0);
    CHECK(v.imag() - cf_jump_example(mech.jumps, 0.6, hf).imag() == doctest::Approx(drift).epsilon(1e-10));
    CHECK(v.real() == doctest::Approx(cf_jump_example(mech.jumps, 0.6, hf).real()).epsilon(1e-12));
}
