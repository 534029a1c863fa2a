#include "mehler/particles.hpp"

#include "mehler/error.hpp"
#include "mehler/kernels.hpp"
#include "mehler/parallel.hpp"
#include "mehler/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mehler {

// ---------------------------------------------------------------- config

double ParticleConfig::hat_width() const { return width > 0.0 ? width : 4.0 * std::sqrt(dt); }

double ParticleConfig::catalyst_density(double x) const {
    const double w = hat_width();
    double d = 0.0;
    for (const Atom& a : eta.atoms()) {
        const double s = std::abs(x - a.x) / w;
        if (s < 1.0)
            d += a.w * (1.0 - s) / w;
    }
    return d;
}

namespace {

// Per-particle event rate per unit catalyst density, and its parts.
struct BranchRates {
    double binary = 0.0;
    std::vector<double> burst;  // per jump atom
    double total = 0.0;
};

BranchRates branch_rates(const ParticleConfig& cfg) {
    BranchRates r;
    const double mass = cfg.particle_mass();
    r.binary = 2.0 * cfg.c * cfg.theta * cfg.theta / mass;
    r.total = r.binary;
    for (const LevyAtom& a : cfg.jumps.atoms()) {
        r.burst.push_back((mass + cfg.theta * a.jump) * a.mass);
        r.total += r.burst.back();
    }
    return r;
}

}  // namespace

void ParticleConfig::validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
        throw ConfigError("particles: length must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("particles: dt must be positive");
    if (!(theta > 0.0) || theta > 1.0)
        throw ConfigError("particles: theta must lie in (0, 1]");
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw ConfigError("particles: rho must be positive");
    if (!(c >= 0.0) || !std::isfinite(c))
        throw ConfigError("particles: c must be nonnegative");
    if (!jumps.empty() && (!jumps.positive_support() || !jumps.finite_activity()))
        throw ConfigError("particles: jump measure must be finite on (0, inf)");
    const double w = hat_width();
    double peak = 0.0;
    for (const Atom& a : eta.atoms()) {
        if (a.x - w <= 0.0)
            throw ConfigError("particles: catalyst hat reaches the boundary");
        for (const double x : {a.x - w, a.x, a.x + w})
            peak = std::max(peak, catalyst_density(x));
    }
    if (dt * peak * branch_rates(*this).total > max_branch_probability)
        throw ConfigError("particles: dt too large, branching probability per step exceeds " +
                          std::to_string(max_branch_probability));
}

// ---------------------------------------------------------------- system

ParticleSystem::ParticleSystem(std::shared_ptr<const ParticleConfig> config, std::uint64_t seed,
                               std::uint32_t replica, std::uint32_t stream)
    : config_(std::move(config)), gen_(seed, replica, 0x8000'0000u | stream) {
    config_->validate();
}

void ParticleSystem::set_positions(std::vector<double> positions) {
    for (double x : positions)
        if (!(x > 0.0) || !std::isfinite(x))
            throw PreconditionError("particle positions must be positive");
    positions_ = std::move(positions);
}

std::size_t ParticleSystem::branch(double x) {
    const ParticleConfig& cfg = *config_;
    const double density = cfg.catalyst_density(x);
    if (density == 0.0)
        return 1;
    const BranchRates rates = branch_rates(cfg);
    const double scale = cfg.dt * density;
    double u = uniform_open(gen_);
    if (u >= scale * rates.total)
        return 1;
    u /= scale;
    if (u < rates.binary)
        return uniform_open(gen_) < 0.5 ? 0 : 2;
    u -= rates.binary;
    std::size_t j = 0;
    while (j + 1 < rates.burst.size() && u >= rates.burst[j])
        u -= rates.burst[j++];
    // burst of K = theta u / mass extra particles, randomly rounded, or death
    const double k = cfg.theta * cfg.jumps.atoms()[j].jump / cfg.particle_mass();
    const double whole = std::floor(k);
    const auto extra = static_cast<std::size_t>(whole) + (uniform_open(gen_) < k - whole ? 1 : 0);
    const double die = static_cast<double>(extra) / (1.0 + static_cast<double>(extra));
    return uniform_open(gen_) < die ? 0 : 1 + extra;
}

StepLog ParticleSystem::step() {
    const ParticleConfig& cfg = *config_;
    StepLog log;
    log.start = positions_.size();
    std::normal_distribution<double> normal;
    const double sd = std::sqrt(cfg.dt);
    std::vector<double> next;
    next.reserve(positions_.size() + positions_.size() / 8 + 16);
    for (const double x : positions_) {
        const double y = x + sd * normal(gen_);
        if (y <= 0.0) {
            ++log.absorbed;
            continue;
        }
        // Brownian bridge from x to y touches 0 with probability exp(-2xy/dt)
        const double e = 2.0 * x * y / cfg.dt;
        if (e < 40.0 && uniform_open(gen_) < std::exp(-e)) {
            ++log.absorbed;
            continue;
        }
        const std::size_t k = branch(y);
        if (k == 0)
            ++log.deaths;
        else
            log.births += k - 1;
        next.insert(next.end(), k, y);
    }
    positions_ = std::move(next);
    if (cfg.immigration)
        log.immigrants = immigrate(cfg.dt);
    t_ += cfg.dt;
    log.end = positions_.size();
    return log;
}

std::size_t ParticleSystem::immigrate(double span) {
    if (!(span > 0.0))
        return 0;
    // Mass entering over an interval of length span and surviving to its end
    // is the integral of kappa_a(1) = (2 pi a)^{-1/2} over ages a in (0, span).
    const double mean = std::sqrt(2.0 * span / std::numbers::pi) / config_->particle_mass();
    std::poisson_distribution<long> count(mean);
    const long n = count(gen_);
    for (long i = 0; i < n; ++i) {
        const double u = uniform_open(gen_);
        const double age = span * u * u;  // density proportional to a^{-1/2}
        // given the age, k_a(y) / kappa_a(1) is Rayleigh with scale sqrt(a)
        positions_.push_back(std::sqrt(-2.0 * age * std::log1p(-uniform_open(gen_))));
    }
    return static_cast<std::size_t>(n);
}

double ParticleSystem::mass_integral(const TestFunction& f) const {
    double s = 0.0;
    for (const double x : positions_)
        s += f.eval(x);
    return config_->particle_mass() * s;
}

ParticleSystem init_poisson_lambda(std::shared_ptr<const ParticleConfig> config, std::uint64_t seed,
                                   std::uint32_t replica, std::uint32_t stream) {
    ParticleSystem ps(std::move(config), seed, replica, stream);
    const double length = ps.config_->length;
    std::poisson_distribution<long> count(length / ps.config_->particle_mass());
    const long n = count(ps.gen_);
    ps.positions_.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        ps.positions_.push_back(length * uniform_open(ps.gen_));
    return ps;
}

double truncated_lebesgue(const TestFunction& f, double length) {
    return integrate_width([&](double x) { return f.eval(x); }, 0.0, length, 0.05);
}

namespace {

FluctuationSample fluctuation_with(const ParticleSystem& ps, const std::vector<TestFunction>& panel,
                                   const std::vector<double>& lambda) {
    FluctuationSample out;
    out.theta = ps.config().theta;
    out.t = ps.time();
    for (std::size_t k = 0; k < panel.size(); ++k)
        out.values.push_back((ps.mass_integral(panel[k]) - lambda[k]) / out.theta);
    return out;
}

std::vector<double> lambdas(const std::vector<TestFunction>& panel, double length) {
    std::vector<double> out;
    for (const auto& f : panel)
        out.push_back(truncated_lebesgue(f, length));
    return out;
}

}  // namespace

FluctuationSample fluctuation_field(const ParticleSystem& ps,
                                    const std::vector<TestFunction>& panel) {
    return fluctuation_with(ps, panel, lambdas(panel, ps.config().length));
}

double truncation_budget(const GridFunction& f, double length, double t) {
    if (t == 0.0)
        return 0.0;
    const double reach = std::min(f.grid().upper(), length + 12.0 * std::sqrt(t));
    if (reach <= length)
        return 0.0;
    return std::abs(integrate_width([&](double y) { return semigroup_at(t, f, y); }, length, reach,
                                    0.25 * std::sqrt(t)));
}

LimitModel mollified_limit(const ParticleConfig& config,
                           const std::shared_ptr<const SpatialGrid>& grid,
                           std::size_t atoms_per_hat) {
    if (atoms_per_hat < 3 || atoms_per_hat % 2 == 0)
        throw PreconditionError("mollified_limit: atoms_per_hat must be odd and at least 3");
    const double w = config.hat_width();
    const double h = 2.0 / static_cast<double>(atoms_per_hat - 1);
    std::vector<Atom> atoms;
    for (const Atom& a : config.eta.atoms()) {
        // trapezoid nodes on the hat, exact for the piecewise linear weight
        for (std::size_t j = 1; j + 1 < atoms_per_hat; ++j) {
            const double s = -1.0 + h * static_cast<double>(j);
            atoms.push_back({a.x + w * s, a.w * (1.0 - std::abs(s)) * h});
        }
    }
    LimitModel out{BranchingMechanism{GridFunction::sample(grid, [&](double) { return config.c; }), {}},
                   CatalystMeasure(atoms)};
    if (!config.jumps.empty())
        out.mech.jumps.push_back(config.jumps);
    return out;
}

cplx poisson_baseline_log_cf(const ParticleConfig& config, double t, const GridFunction& f,
                             double xi) {
    const double mass = config.particle_mass();
    const double length = config.length;
    const double root = std::sqrt(2.0 * t);
    const auto survivors = [&](double y) {
        if (t == 0.0)
            return y < length ? 1.0 : 0.0;
        return 0.5 * (std::erf((length - y) / root) - std::erf((length + y) / root)) +
               std::erf(y / root);
    };
    const auto intensity = [&](double y) {
        double d = survivors(y);
        if (config.immigration && t > 0.0)
            d += std::erfc(y / root);
        return d / mass;
    };
    const double lower = f.grid().lower();
    const double upper = std::min(f.grid().upper(), length + 10.0 * std::sqrt(t) + 1.0);
    const double step = 0.01;
    const cplx poisson = integrate_width(
        [&](double y) {
            const double a = xi * mass * f.at(y) / config.theta;
            return cplx(-2.0 * std::pow(std::sin(0.5 * a), 2), std::sin(a)) * intensity(y);
        },
        lower, upper, step);
    const double lambda = integrate_width([&](double y) { return f.at(y); }, lower, length, step);
    return poisson - cplx(0.0, xi * lambda / config.theta);
}

ThetaSweep run_theta_sweep(const SweepSettings& settings,
                           const std::shared_ptr<const SpatialGrid>& grid) {
    const double t = settings.t;
    const double dt = settings.base.dt;
    if (!(t > 0.0) || !(dt > 0.0))
        throw ConfigError("theta sweep: t and dt must be positive");
    const double ratio = t / dt;
    const auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
        throw ConfigError("theta sweep: t must be a multiple of dt");
    if (settings.thetas.empty())
        throw ConfigError("theta sweep: no theta values");
    for (std::size_t i = 1; i < settings.thetas.size(); ++i)
        if (!(settings.thetas[i] < settings.thetas[i - 1]))
            throw ConfigError("theta sweep: thetas must be decreasing");

    const auto functions = parse_panel(settings.panel);
    const auto sampled = sample_panel(grid, functions);
    const auto lambda = lambdas(functions, settings.base.length);
    std::vector<double> budget;
    for (const auto& g : sampled)
        budget.push_back(truncation_budget(g, settings.base.length, t));

    // The limit does not depend on theta.
    const LimitModel limit = mollified_limit(settings.base, grid);
    const SignedAtomicMeasure start;
    CellValues limit_log(sampled.size(), std::vector<cplx>(settings.points.size()));
    for (std::size_t k = 0; k < sampled.size(); ++k)
        for (std::size_t p = 0; p < settings.points.size(); ++p)
            limit_log[k][p] = limit_ou_log_cf(limit.mech, limit.eta, start, t,
                                              sampled[k].scaled(settings.points[p]));

    ThetaSweep sweep;
    for (std::size_t i = 0; i < settings.thetas.size(); ++i) {
        auto cfg = std::make_shared<ParticleConfig>(settings.base);
        cfg->theta = settings.thetas[i];
        cfg->validate();
        const std::size_t n = settings.replicas;
        const std::size_t nf = functions.size();
        SampleMatrix z{n, nf, std::vector<double>(n * nf)};
        std::vector<double> y(n * nf);
        std::vector<std::size_t> population(n * steps);
        for_each_index(n, settings.workers, [&](std::size_t r) {
            ParticleSystem ps = init_poisson_lambda(cfg, settings.seed, static_cast<std::uint32_t>(r),
                                                    static_cast<std::uint32_t>(i));
            for (std::size_t s = 0; s < steps; ++s) {
                const StepLog log = ps.step();
                if (!log.reconciles())
                    throw std::logic_error("particle bookkeeping does not reconcile");
                population[r * steps + s] = log.end;
            }
            const auto fl = fluctuation_with(ps, functions, lambda);
            for (std::size_t k = 0; k < nf; ++k) {
                z.values[r * nf + k] = fl.values[k];
                y[r * nf + k] = ps.mass_integral(functions[k]);
            }
        });

        ThetaRow row;
        row.theta = cfg->theta;
        row.budget = budget;
        for (std::size_t s = 0; s < steps; ++s) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                sum += static_cast<double>(population[r * steps + s]);
            row.population.push_back(sum / static_cast<double>(n));
        }
        for (std::size_t k = 0; k < nf; ++k) {
            double mean = 0.0, ss = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                mean += y[r * nf + k];
            mean /= static_cast<double>(n);
            for (std::size_t r = 0; r < n; ++r)
                ss += (y[r * nf + k] - mean) * (y[r * nf + k] - mean);
            const double se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
            row.mean_gap.push_back(mean - lambda[k]);
            row.mean_se.push_back(se);
            row.mean_ok = row.mean_ok &&
                          std::abs(row.mean_gap.back()) <= sigma_multiplier * se + budget[k];
        }
        row.emp = empirical_cf(z, settings.panel, settings.points);
        const CfDistance d = cf_distance(row.emp, limit_log);
        row.distance = d.distance;
        row.se = d.se;
        row.samples = std::move(z);
        sweep.means_ok = sweep.means_ok && row.mean_ok;
        sweep.rows.push_back(std::move(row));
    }
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
        const ThetaRow& a = sweep.rows[i - 1];
        const ThetaRow& b = sweep.rows[i];
        if (b.distance > a.distance + sigma_multiplier * std::hypot(a.se, b.se))
            sweep.nonincreasing = false;
    }
    return sweep;
}

}  // namespace mehler
