#pragma once

#include "mehler/grid.hpp"
#include "mehler/levy.hpp"
#include "mehler/measure.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace mehler {

/// One independent noise source of a driven process.
///
/// A site source sits at a catalyst atom x and spreads its noise with the
/// absorbing kernel p(., x, .). The boundary source injects through the
/// entrance kernel k.
struct DriverSource {
    enum class Kind { site, boundary };
    Kind kind = Kind::site;
    double x = 0.0;
    double gaussian_rate = 0.0;  ///< variance rate of the Brownian driver
    AtomicLevyMeasure jumps;     ///< intensity of the Poisson driver

    /// A(tau, g): P_tau g(x) for a site, kappa_tau(g) for the boundary.
    double functional(double tau, const GridFunction& g) const;
    /// Integral of functional(r, g) over r in [0, span].
    double occupation(double span, const GridFunction& g) const;
    /// Density of functional(tau, .) at y.
    double kernel(double tau, double y) const;
    /// Integral of kernel(r, y) over r in [0, span].
    double occupation_kernel(double span, double y) const;
};

struct DriverModel {
    std::vector<DriverSource> sources;

    /// Checks sites against the grid and the finite-activity requirement.
    void validate(const SpatialGrid& grid) const;
};

/// White noise with covariance 2 c(x) ds eta(dx) and jumps m(x, du) eta(dx).
DriverModel catalyst_model(const BranchingMechanism& mech, const CatalystMeasure& eta);
/// Boundary driver with variance rate 2c and jump intensity m.
DriverModel entrance_model(const LocalMechanism& mech);

/// Euler grid on [start, end]: steps of dt, midpoint evaluation, and the last
/// step split geometrically (halving `levels` times) toward `end`.
class TimeGrid {
public:
    TimeGrid(double start, double end, double dt, unsigned levels = 6);

    double start() const noexcept { return edges_.front(); }
    double end() const noexcept { return edges_.back(); }
    std::size_t size() const noexcept { return edges_.size() - 1; }
    double length(std::size_t j) const { return edges_[j + 1] - edges_[j]; }
    double midpoint(std::size_t j) const { return 0.5 * (edges_[j] + edges_[j + 1]); }
    double dt() const noexcept { return dt_; }
    unsigned levels() const noexcept { return levels_; }

private:
    std::vector<double> edges_;
    double dt_;
    unsigned levels_;
};

struct JumpEvent {
    double s;
    double u;
    std::size_t source;
};

/// Driver realisation over one time interval.
struct Segment {
    TimeGrid grid;
    std::vector<std::vector<double>> gaussian;  ///< [source][step] increments
    std::vector<JumpEvent> jumps;               ///< sorted by time
};

/// Stream identity: route separates independent simulations of the same
/// replica (for instance one-shot and recursive), segment separates the
/// pieces of one path.
struct StreamId {
    std::uint64_t seed = 0;
    std::uint32_t replica = 0;
    std::uint32_t route = 0;
};

Segment sample_segment(const DriverModel& model, const TimeGrid& grid, const StreamId& id,
                       std::uint32_t segment);

/// Path of a driven process: the initial density and all driver segments.
struct PathState {
    double t = 0.0;
    std::optional<GridFunction> initial;
    std::vector<Segment> segments;
    /// Field view, kept only when requested.
    std::optional<GridFunction> field;
};

/// Density on the grid of the segment's contribution observed at time `at`.
GridFunction segment_field(const DriverModel& model, const Segment& seg, double at,
                           const std::shared_ptr<const SpatialGrid>& grid);

/// Field view of the whole path at its current time.
GridFunction path_field(const DriverModel& model, const PathState& state,
                        const std::shared_ptr<const SpatialGrid>& grid);

/// Extends the path by delta: field <- P_delta field + increment, segments appended.
PathState advance_markov(const PathState& state, double delta, const DriverModel& model,
                         double dt, const StreamId& id);

/// Tabulates u -> A(u^2, g) on an equispaced grid in u = sqrt(tau) and
/// interpolates with 8-point Lagrange stencils.
class SqrtTable {
public:
    SqrtTable() = default;
    SqrtTable(const DriverSource& src, const GridFunction& g, double horizon,
              std::size_t intervals = 1024);
    double operator()(double tau) const;

private:
    double step_ = 0.0;
    std::vector<double> values_;
};

/// Coefficients for evaluating <Z, g_k> of segments on one time grid.
class SegmentEvaluator {
public:
    SegmentEvaluator(std::shared_ptr<const DriverModel> model, const TimeGrid& grid,
                     std::vector<GridFunction> panel);

    std::size_t panel_size() const noexcept { return panel_.size(); }
    const std::vector<GridFunction>& panel() const noexcept { return panel_; }

    /// <contribution of seg, g_k> at the segment end.
    double evaluate(const Segment& seg, std::size_t k) const;

    /// Variance of the Gaussian part under this grid's Euler scheme.
    double discrete_variance(std::size_t k) const;
    /// The same variance with the exact time integral.
    double exact_variance(std::size_t k) const;

private:
    std::shared_ptr<const DriverModel> model_;
    TimeGrid grid_;
    std::vector<GridFunction> panel_;
    std::vector<std::vector<std::vector<double>>> coef_;  // [source][k][step]
    std::vector<std::vector<SqrtTable>> tables_;          // [source][k]
    std::vector<std::vector<double>> compensator_;        // [source][k]
};

/// Evaluates complete paths whose segments share a fixed partition of [0, t].
class PathEvaluator {
public:
    PathEvaluator(std::shared_ptr<const DriverModel> model, std::vector<TimeGrid> grids,
                  const std::vector<GridFunction>& panel);

    std::vector<double> evaluate(const PathState& state) const;
    double discrete_variance(std::size_t k) const;

private:
    double horizon_;
    std::vector<GridFunction> panel_;
    std::vector<SegmentEvaluator> parts_;
};

/// Row-major replicas x functions matrix of simulated functionals.
struct SampleMatrix {
    std::size_t replicas = 0;
    std::size_t functions = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t k) const { return values[r * functions + k]; }
    std::vector<double> column(std::size_t k) const;
};

/// One-shot simulation of <Z_t, g_k> for many replicas. With split > 0 the
/// path is built recursively with advance_markov at the split time instead.
SampleMatrix simulate_replicas(std::shared_ptr<const DriverModel> model,
                               const std::vector<GridFunction>& panel, double t, double dt,
                               std::uint64_t seed, std::size_t replicas, unsigned workers,
                               std::uint32_t route = 0, double split = 0.0);

/// Sample of the Gaussian field y -> sum_i int p_{t-s}(x_i, y) dB_i(s).
GridFunction simulate_gaussian_field(const GridFunction& c, const CatalystMeasure& eta, double t,
                                     double dt, const StreamId& id);

/// Sample of the field y -> int k_{t-s}(y) dB(s) with variance rate 2c.
GridFunction simulate_entrance_gaussian(double c, double t, double dt,
                                        const std::shared_ptr<const SpatialGrid>& grid,
                                        const StreamId& id);

/// Compensated boundary jump functional <Z_t, g_k> for each panel entry.
std::vector<double> simulate_jump_functional(const AtomicLevyMeasure& m, double t,
                                             const std::vector<GridFunction>& panel,
                                             const StreamId& id);

/// A realisation of a compensated jump process: its jumps plus the analytic
/// compensator, with both a measure view and panel values.
struct SignedMeasureSample {
    std::shared_ptr<const DriverModel> model;
    double t = 0.0;
    Segment segment;
    std::vector<double> values;

    /// Y_t as a density on the grid.
    SignedAtomicMeasure measure(const std::shared_ptr<const SpatialGrid>& grid) const;
    /// Nonnegative parts Y+ + |mean-|G and Y- + mean+ G split by jump sign.
    std::pair<SignedAtomicMeasure, SignedAtomicMeasure> sign_decomposition(
        const std::shared_ptr<const SpatialGrid>& grid) const;
};

/// Y_t(f) = int int int u P_{t-s} f(x) N~(ds, du, dx) for catalyst-site jumps.
SignedMeasureSample simulate_signed_measure(const BranchingMechanism& mech,
                                            const CatalystMeasure& eta, double t,
                                            const std::vector<GridFunction>& panel,
                                            const StreamId& id);

/// Z(f) = Y(h f) through the measure h Y, with no mass at the origin.
std::vector<double> h_transform_process(const SignedAtomicMeasure& y,
                                        const std::vector<BoundaryGridFunction>& panel);

/// sum_n 2^{-n} (1 ^ |mu(f_n) - nu(f_n)|) over the panel, n from 1.
double r_metric(const SignedAtomicMeasure& mu, const SignedAtomicMeasure& nu,
                const std::vector<GridFunction>& panel);
/// r applied to the Jordan parts separately: r(mu+, nu+) + r(mu-, nu-).
double r_metric_jordan(const SignedAtomicMeasure& mu, const SignedAtomicMeasure& nu,
                       const std::vector<GridFunction>& panel);

}  // namespace mehler
