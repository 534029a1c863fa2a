#include <doctest.h>

#include "mehler/error.hpp"
#include "mehler/kernels.hpp"
#include "mehler/particles.hpp"
#include "mehler/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace mehler;

namespace {

std::shared_ptr<const ParticleConfig> share(ParticleConfig c) {
    return std::make_shared<const ParticleConfig>(std::move(c));
}

ParticleConfig quiet(double theta, double dt) {
    ParticleConfig c;
    c.theta = theta;
    c.dt = dt;
    return c;
}

struct Stats {
    double mean = 0.0;
    double se = 0.0;
    double var = 0.0;
};

Stats stats(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    Stats s;
    for (double x : v)
        s.mean += x / n;
    for (double x : v)
        s.var += (x - s.mean) * (x - s.mean) / (n - 1.0);
    s.se = std::sqrt(s.var / n);
    return s;
}

}  // namespace

TEST_CASE("poisson initial condition") {
    const auto cfg = share(quiet(0.5, 0.01));  // particle mass 0.25, mean count 20
    const double scale = 1.0 / cfg->particle_mass();
    const double eps = 0.1;
    std::vector<double> count, voids, left, right;
    for (std::uint32_t r = 0; r < 4000; ++r) {
        const auto ps = init_poisson_lambda(cfg, 1, r);
        count.push_back(static_cast<double>(ps.size()));
        double in_tail = 0.0, a = 0.0, b = 0.0;
        for (double x : ps.positions()) {
            CHECK(x > 0.0);
            in_tail += x > cfg->length - eps ? 1.0 : 0.0;
            a += x < 1.0 ? 1.0 : 0.0;
            b += (x > 2.0 && x < 3.0) ? 1.0 : 0.0;
        }
        voids.push_back(in_tail == 0.0 ? 1.0 : 0.0);
        left.push_back(a);
        right.push_back(b);
    }
    const Stats c = stats(count);
    CHECK(std::abs(c.mean - scale * cfg->length) < 3.0 * c.se);
    const Stats v = stats(voids);
    CHECK(std::abs(v.mean - std::exp(-scale * eps)) < 3.0 * v.se);
    const Stats l = stats(left), rr = stats(right);
    double cov = 0.0;
    for (std::size_t i = 0; i < left.size(); ++i)
        cov += (left[i] - l.mean) * (right[i] - rr.mean);
    cov /= static_cast<double>(left.size() - 1);
    // se of the sample covariance of independent variables: sqrt(var_a var_b / n)
    CHECK(std::abs(cov) < 3.0 * std::sqrt(l.var * rr.var / static_cast<double>(left.size())));
}

TEST_CASE("absorbed random walk survival") {
    ParticleConfig c = quiet(1.0, 1.0 / 64);
    c.immigration = false;
    const auto cfg = share(c);
    const double x0 = 0.6, t = 0.5;
    const std::size_t n = 20000;
    ParticleSystem ps(cfg, 2, 0);
    ps.set_positions(std::vector<double>(n, x0));
    for (int s = 0; s < 32; ++s) {
        const StepLog log = ps.step();
        CHECK(log.reconciles());
        CHECK(log.births == 0);
        CHECK(log.deaths == 0);
    }
    // oracle: quadrature of the killed density
    const double oracle = integrate_width([&](double y) { return abm_density(t, x0, y); }, 1e-12,
                                          x0 + 12.0, 0.05);
    CHECK(oracle == doctest::Approx(std::erf(x0 / std::sqrt(2.0 * t))).epsilon(1e-10));
    const double frac = static_cast<double>(ps.size()) / static_cast<double>(n);
    const double se = std::sqrt(oracle * (1.0 - oracle) / static_cast<double>(n));
    CHECK(std::abs(frac - oracle) < 3.0 * se);
}

TEST_CASE("immigration count and entry positions") {
    ParticleConfig c = quiet(0.5, 1.0 / 32);
    const auto cfg = share(c);
    const double t = 0.5;
    const double mass = cfg->particle_mass();
    // expected survivors at t: double quadrature of the entrance kernel
    const TimeQuadrature q{t, Substitution::sqrt, 16};
    const double oracle = q.integrate([&](double r) {
        return integrate_width([&](double y) { return entrance_kernel(r, y); }, 0.0,
                               12.0 * std::sqrt(r), 0.1 * std::sqrt(r));
    }) / mass;
    CHECK(oracle == doctest::Approx(std::sqrt(2.0 * t / std::numbers::pi) / mass).epsilon(1e-8));
    std::vector<double> counts;
    for (std::uint32_t r = 0; r < 3000; ++r) {
        ParticleSystem ps(cfg, 3, r);
        for (int s = 0; s < 16; ++s)
            CHECK(ps.step().reconciles());
        counts.push_back(static_cast<double>(ps.size()));
    }
    const Stats st = stats(counts);
    CHECK(std::abs(st.mean - oracle) < 3.0 * st.se);

    const double span = 1e-4;
    ParticleSystem fresh(share(quiet(0.1, 1e-3)), 4, 0);  // mass 0.002: many entries
    std::size_t total = 0;
    for (int i = 0; i < 20; ++i)
        total += fresh.immigrate(span);
    REQUIRE(total > 50);
    std::vector<double> pos = fresh.positions();
    std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(pos.size() / 2), pos.end());
    CHECK(pos[pos.size() / 2] <= 1.5 * std::sqrt(span));

    CHECK(fresh.immigrate(0.0) == 0);
    CHECK(fresh.size() == total);
}

TEST_CASE("branching mass variance scales like theta squared") {
    const double c = 0.5, dt = 1e-3;
    std::vector<double> rates;
    for (const double theta : {1.0, 0.5}) {
        ParticleConfig cfg = quiet(theta, dt);
        cfg.c = c;
        cfg.eta = CatalystMeasure({{1.0, 1.0}});
        cfg.rho = 40.0;  // keeps the per-step probability small at theta = 0.5
        const auto shared = share(cfg);
        ParticleSystem ps(shared, 5, 0);
        const double density = cfg.catalyst_density(1.0);
        const std::size_t n = 400000;
        std::vector<double> offspring(n);
        for (std::size_t i = 0; i < n; ++i)
            offspring[i] = static_cast<double>(ps.branch(1.0));
        const Stats s = stats(offspring);
        CHECK(std::abs(s.mean - 1.0) < 3.0 * s.se);
        // mass variance per unit mass and time equals 2 c theta^2 times the density
        const double rate = s.var * cfg.particle_mass() / (dt * density);
        const double p = 2.0 * c * theta * theta / cfg.particle_mass() * dt * density;
        // Var N is a mean of Bernoulli(p) indicators (N - 1)^2
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n)) * cfg.particle_mass() /
                          (dt * density);
        CHECK(std::abs(rate - 2.0 * c * theta * theta) < 3.0 * se);
        rates.push_back(rate);
    }
    CHECK(rates[1] / rates[0] == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("jump bursts are critical") {
    ParticleConfig cfg = quiet(0.5, 1e-3);
    cfg.jumps = AtomicLevyMeasure({{1.3, 2.0}});
    cfg.eta = CatalystMeasure({{1.0, 1.0}});
    ParticleSystem ps(share(cfg), 6, 0);
    std::vector<double> offspring(200000);
    for (double& v : offspring)
        v = static_cast<double>(ps.branch(1.0));
    const Stats s = stats(offspring);
    CHECK(std::abs(s.mean - 1.0) < 3.0 * s.se);
    CHECK(s.var > 0.0);
}

TEST_CASE("zero mechanism changes counts only by absorption and immigration") {
    ParticleConfig c = quiet(0.5, 1.0 / 64);
    c.eta = CatalystMeasure({{1.0, 1.0}});
    auto ps = init_poisson_lambda(share(c), 7, 0);
    for (int s = 0; s < 32; ++s) {
        const StepLog log = ps.step();
        CHECK(log.reconciles());
        CHECK(log.births == 0);
        CHECK(log.deaths == 0);
        CHECK(log.end == log.start - log.absorbed + log.immigrants);
    }
    for (double x : ps.positions())
        CHECK(x > 0.0);
}

TEST_CASE("configuration errors") {
    ParticleConfig c = quiet(0.1, 0.05);
    c.c = 1.0;
    c.eta = CatalystMeasure({{2.0, 1.0}});
    CHECK_THROWS_AS(c.validate(), ConfigError);  // branching probability far above 0.1
    c = quiet(1.5, 0.01);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = quiet(0.5, 0.01);
    c.eta = CatalystMeasure({{0.1, 1.0}});
    CHECK_THROWS_AS(c.validate(), ConfigError);  // hat reaches 0
    c = quiet(0.5, 0.01);
    c.jumps = AtomicLevyMeasure({{-1.0, 1.0}});
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("mollified limit atoms carry the catalyst mass") {
    ParticleConfig c = quiet(0.5, 1.0 / 64);
    c.c = 0.5;
    c.eta = CatalystMeasure({{1.0, 0.8}, {2.0, 1.2}});
    const auto lim = mollified_limit(c, make_grid(GridSpec{}));
    CHECK(lim.eta.total_mass() == doctest::Approx(2.0).epsilon(1e-13));
    for (const Atom& a : lim.eta.atoms())
        CHECK(std::min(std::abs(a.x - 1.0), std::abs(a.x - 2.0)) < c.hat_width() + 1e-12);
}

TEST_CASE("fluctuation field and mean conservation") {
    ParticleConfig c = quiet(0.3, 0.25 / 16);
    c.c = 0.5;
    c.eta = CatalystMeasure({{1.0, 1.0}});
    const auto cfg = share(c);
    const auto panel = parse_panel({"bump:1.5:0.25", "bump:2:0.3"});
    const auto grid = make_grid(GridSpec{});
    const auto sampled = sample_panel(grid, panel);

    // at t = 0 the centred field has mean 0
    std::vector<double> z0;
    for (std::uint32_t r = 0; r < 2000; ++r)
        z0.push_back(fluctuation_field(init_poisson_lambda(cfg, 8, r), panel).values[0]);
    const Stats s0 = stats(z0);
    CHECK(std::abs(s0.mean) < 3.0 * s0.se);

    SweepSettings set;
    set.base = c;
    set.thetas = {0.3};
    set.t = 0.25;
    set.panel = {"bump:1.5:0.25", "bump:2:0.3"};
    set.points = default_points();
    set.replicas = 2000;
    set.seed = 9;
    const auto sweep = run_theta_sweep(set, grid);
    REQUIRE(sweep.rows.size() == 1);
    const ThetaRow& row = sweep.rows[0];
    CHECK(row.mean_ok);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(row.mean_gap[k]) <= 3.0 * row.mean_se[k] + row.budget[k]);
        CHECK(row.budget[k] < 1e-6);
    }
    CHECK(row.population.size() == 16);
}

TEST_CASE("without branching the distance is the poisson noise baseline") {
    ParticleConfig c = quiet(0.5, 0.25 / 16);
    const auto grid = make_grid(GridSpec{});
    SweepSettings set;
    set.base = c;
    set.thetas = {0.5};
    set.t = 0.25;
    set.panel = {"bump:1.5:0.25"};
    set.points = default_points();
    set.replicas = 4000;
    set.seed = 10;
    const auto sweep = run_theta_sweep(set, grid);
    const ThetaRow& row = sweep.rows[0];
    const auto g = sample_panel(grid, parse_panel(set.panel))[0];
    const auto base = tabulate_log_cf(row.emp, [&](std::size_t, double xi) {
        return poisson_baseline_log_cf(c, set.t, g, xi);
    });
    CHECK(compare_cf(row.emp, base).pass);
    double baseline = 0.0;
    for (const auto& r : base)
        for (const cplx v : r)
            baseline = std::max(baseline, std::abs(std::exp(v) - 1.0));
    CHECK(std::abs(row.distance - baseline) < 3.0 * row.se);

    // doubling the replicas shrinks the standard errors by about 1/sqrt(2)
    set.replicas = 8000;
    const auto twice = run_theta_sweep(set, grid);
    const double ratio = twice.rows[0].emp.se(0, 4) / row.emp.se(0, 4);
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.08));
}

TEST_CASE("sweep rejects bad settings") {
    SweepSettings set;
    set.base = quiet(0.5, 0.1);
    set.thetas = {0.3, 0.5};
    set.t = 1.0;
    set.panel = {"bump:1.5:0.25"};
    set.points = {1.0};
    set.replicas = 100;
    const auto grid = make_grid(GridSpec{});
    CHECK_THROWS_AS(run_theta_sweep(set, grid), ConfigError);
    set.thetas = {0.5};
    set.t = 1.05;
    CHECK_THROWS_AS(run_theta_sweep(set, grid), ConfigError);
}
