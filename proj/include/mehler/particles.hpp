#pragma once

#include "mehler/harness.hpp"
#include "mehler/levy.hpp"
#include "mehler/measure.hpp"
#include "mehler/panel.hpp"
#include "mehler/rng.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace mehler {

/// Largest branching probability per particle and step accepted.
inline constexpr double max_branch_probability = 0.1;

/// Parameters of the discrete branching particle system.
///
/// Each particle carries mass rho theta^3, so the Poisson noise of the
/// fluctuation field has variance rho theta lambda(f^2) and vanishes with
/// theta. Branching follows phi(theta z) near the catalyst, which is
/// mollified to hats of half-width `width` (default 4 sqrt(dt)).
struct ParticleConfig {
    double length = 5.0;  ///< initial particles fill (0, length)
    double dt = 0.0;
    double theta = 1.0;
    double rho = 2.0;
    double c = 0.0;            ///< Gaussian branching coefficient
    AtomicLevyMeasure jumps;   ///< positive jumps only
    CatalystMeasure eta;
    double width = 0.0;        ///< 0 selects 4 sqrt(dt)
    bool immigration = true;

    double particle_mass() const noexcept { return rho * theta * theta * theta; }
    double hat_width() const;
    /// Mollified catalyst density sum_i eta_i hat((x - x_i) / w) / w.
    double catalyst_density(double x) const;
    /// Throws ConfigError on bad parameters or when a particle at the
    /// catalyst peak would branch with probability above the limit.
    void validate() const;
};

/// Per-step population bookkeeping.
struct StepLog {
    std::size_t start = 0;
    std::size_t absorbed = 0;
    std::size_t deaths = 0;  ///< removed by branching
    std::size_t births = 0;  ///< added by branching
    std::size_t immigrants = 0;
    std::size_t end = 0;

    bool reconciles() const noexcept {
        return start + births + immigrants == end + absorbed + deaths;
    }
};

class ParticleSystem {
public:
    ParticleSystem(std::shared_ptr<const ParticleConfig> config, std::uint64_t seed,
                   std::uint32_t replica, std::uint32_t stream = 0);

    const ParticleConfig& config() const noexcept { return *config_; }
    double time() const noexcept { return t_; }
    const std::vector<double>& positions() const noexcept { return positions_; }
    std::size_t size() const noexcept { return positions_.size(); }

    /// Replaces the particles; every position must be positive.
    void set_positions(std::vector<double> positions);

    /// Offspring count of one branching trial at x over one step.
    std::size_t branch(double x);

    /// Motion, absorption, branching and immigration over one step.
    StepLog step();
    /// Adds immigrants entering during an interval of length span.
    std::size_t immigrate(double span);

    /// Y(f) = particle mass times the sum of f over particles.
    double mass_integral(const TestFunction& f) const;

private:
    friend ParticleSystem init_poisson_lambda(std::shared_ptr<const ParticleConfig>,
                                              std::uint64_t, std::uint32_t, std::uint32_t);

    std::shared_ptr<const ParticleConfig> config_;
    Philox4x32 gen_;
    double t_ = 0.0;
    std::vector<double> positions_;
};

/// Poisson sample of lambda on (0, L) at intensity 1 / particle_mass.
ParticleSystem init_poisson_lambda(std::shared_ptr<const ParticleConfig> config, std::uint64_t seed,
                                   std::uint32_t replica, std::uint32_t stream = 0);

/// Integral of f over (0, L).
double truncated_lebesgue(const TestFunction& f, double length);

/// theta^{-1}(Y(f) - lambda(f)) for every panel function.
struct FluctuationSample {
    double theta = 0.0;
    double t = 0.0;
    std::vector<double> values;
    std::uint32_t replica = 0;
};
FluctuationSample fluctuation_field(const ParticleSystem& ps, const std::vector<TestFunction>& panel);

/// Integral over y > L of P_t f(y): the mean lost by starting with lambda on (0, L) only.
double truncation_budget(const GridFunction& f, double length, double t);

/// Mechanism and catalyst of the limit: the hats resolved into atoms.
struct LimitModel {
    BranchingMechanism mech;
    CatalystMeasure eta;
};
LimitModel mollified_limit(const ParticleConfig& config,
                           const std::shared_ptr<const SpatialGrid>& grid,
                           std::size_t atoms_per_hat = 41);

/// log CF of Z_t(xi f) without branching: Poisson particles started from
/// lambda on (0, L) plus immigrants, centred by the truncated lambda(f).
cplx poisson_baseline_log_cf(const ParticleConfig& config, double t, const GridFunction& f,
                             double xi);

struct ThetaRow {
    double theta = 0.0;
    double distance = 0.0;  ///< max-cell CF distance to the limit
    double se = 0.0;
    std::vector<double> mean_gap;  ///< E Y_t(f) - lambda(f) per function
    std::vector<double> mean_se;
    std::vector<double> budget;    ///< truncation budget per function
    std::vector<double> population;  ///< mean particle count after each step
    EmpiricalCF emp;
    SampleMatrix samples;
    bool mean_ok = true;
};

struct ThetaSweep {
    std::vector<ThetaRow> rows;
    /// d_{k+1} <= d_k + 3 sqrt(se_k^2 + se_{k+1}^2) for consecutive thetas.
    bool nonincreasing = true;
    bool means_ok = true;
};

struct SweepSettings {
    ParticleConfig base;  ///< theta is overwritten per row
    std::vector<double> thetas;
    double t = 0.0;
    std::vector<std::string> panel;
    std::vector<double> points;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

/// Runs the particle system for each theta and measures the distance of
/// the empirical CF of Z^theta_t to the limit CF on a grid-sampled panel.
ThetaSweep run_theta_sweep(const SweepSettings& settings,
                           const std::shared_ptr<const SpatialGrid>& grid);

}  // namespace mehler
