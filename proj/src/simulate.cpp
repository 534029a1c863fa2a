#include "mehler/simulate.hpp"

#include "mehler/error.hpp"
#include "mehler/kernels.hpp"
#include "mehler/parallel.hpp"
#include "mehler/quadrature.hpp"
#include "mehler/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace mehler {

// ---------------------------------------------------------------- sources

double DriverSource::functional(double tau, const GridFunction& g) const {
    if (kind == Kind::site)
        return semigroup_at(tau, g, x);
    return entrance_functional(tau, g);
}

double DriverSource::occupation(double span, const GridFunction& g) const {
    if (kind == Kind::site)
        return occupation_functional(span, g, x);
    return entrance_occupation_functional(span, g);
}

double DriverSource::kernel(double tau, double y) const {
    if (kind == Kind::site)
        return abm_density(tau, x, y);
    return entrance_kernel(tau, y);
}

double DriverSource::occupation_kernel(double span, double y) const {
    if (span == 0.0)
        return 0.0;
    if (kind == Kind::site)
        return mehler::occupation_kernel(span, x, y);
    return entrance_mass_until(span, y);
}

void DriverModel::validate(const SpatialGrid& grid) const {
    for (const DriverSource& s : sources) {
        if (s.kind == DriverSource::Kind::site && (!(s.x > grid.lower()) || !(s.x < grid.upper())))
            throw PreconditionError("driver site outside the truncated domain");
        if (!(s.gaussian_rate >= 0.0) || !std::isfinite(s.gaussian_rate))
            throw PreconditionError("driver variance rate must be finite and nonnegative");
        if (!s.jumps.finite_activity() || !s.jumps.first_moment_finite())
            throw PreconditionError("jump driver must have finite activity and first moment");
    }
}

DriverModel catalyst_model(const BranchingMechanism& mech, const CatalystMeasure& eta) {
    DriverModel model;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const Atom& a = eta.atoms()[i];
        const LocalMechanism local = mech.at_site(i, a.x);
        DriverSource s;
        s.kind = DriverSource::Kind::site;
        s.x = a.x;
        s.gaussian_rate = 2.0 * local.c * a.w;
        if (!local.jumps.empty())
            s.jumps = local.jumps.scaled(a.w);
        model.sources.push_back(std::move(s));
    }
    return model;
}

DriverModel entrance_model(const LocalMechanism& mech) {
    if (!(mech.c >= 0.0))
        throw DomainError("entrance_model: c must be nonnegative");
    DriverSource s;
    s.kind = DriverSource::Kind::boundary;
    s.gaussian_rate = 2.0 * mech.c;
    s.jumps = mech.jumps;
    return DriverModel{{std::move(s)}};
}

// ---------------------------------------------------------------- time grid

TimeGrid::TimeGrid(double start, double end, double dt, unsigned levels) : levels_(levels) {
    const double span = end - start;
    if (!(span > 0.0) || !std::isfinite(span))
        throw DomainError("TimeGrid: empty interval");
    if (!(dt > 0.0))
        throw DomainError("TimeGrid: dt must be positive");
    if (dt > span * (1.0 + 1e-12))
        throw DomainError("TimeGrid: dt exceeds the interval");
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(span / dt)));
    dt_ = span / static_cast<double>(steps);
    for (std::size_t j = 0; j < steps; ++j)
        edges_.push_back(start + dt_ * static_cast<double>(j));
    double piece = dt_;
    for (unsigned l = 0; l < levels; ++l) {
        piece *= 0.5;
        edges_.push_back(end - piece);
    }
    edges_.push_back(end);
}

// ---------------------------------------------------------------- sampling

namespace {

std::uint32_t driver_id(const StreamId& id, std::uint32_t segment, std::size_t source,
                        unsigned kind) {
    if (source >= 2048 || segment >= 4096 || id.route >= 256)
        throw ConfigError("stream layout exhausted (too many sources, segments or routes)");
    return (id.route << 24) | (segment << 12) | static_cast<std::uint32_t>(2 * source + kind);
}

}  // namespace

Segment sample_segment(const DriverModel& model, const TimeGrid& grid, const StreamId& id,
                       std::uint32_t segment) {
    Segment seg{grid, {}, {}};
    seg.gaussian.resize(model.sources.size());
    const double span = grid.end() - grid.start();
    for (std::size_t s = 0; s < model.sources.size(); ++s) {
        const DriverSource& src = model.sources[s];
        if (src.gaussian_rate > 0.0) {
            Philox4x32 gen(id.seed, id.replica, driver_id(id, segment, s, 0));
            std::normal_distribution<double> normal;
            auto& inc = seg.gaussian[s];
            inc.resize(grid.size());
            for (std::size_t j = 0; j < grid.size(); ++j)
                inc[j] = std::sqrt(src.gaussian_rate * grid.length(j)) * normal(gen);
        }
        if (!src.jumps.empty()) {
            Philox4x32 gen(id.seed, id.replica, driver_id(id, segment, s, 1));
            std::poisson_distribution<long> count(src.jumps.total_mass() * span);
            std::vector<double> masses;
            for (const LevyAtom& a : src.jumps.atoms())
                masses.push_back(a.mass);
            std::discrete_distribution<std::size_t> mark(masses.begin(), masses.end());
            const long n = count(gen);
            for (long i = 0; i < n; ++i) {
                const double when = grid.start() + span * uniform_open(gen);
                seg.jumps.push_back({when, src.jumps.atoms()[mark(gen)].jump, s});
            }
        }
    }
    std::sort(seg.jumps.begin(), seg.jumps.end(),
              [](const JumpEvent& a, const JumpEvent& b) { return a.s < b.s; });
    return seg;
}

GridFunction segment_field(const DriverModel& model, const Segment& seg, double at,
                           const std::shared_ptr<const SpatialGrid>& grid) {
    if (at < seg.grid.end())
        throw DomainError("segment_field: observation before the segment end");
    std::vector<double> v(grid->size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double y = grid->node(i);
        double acc = 0.0;
        for (std::size_t s = 0; s < model.sources.size(); ++s) {
            const DriverSource& src = model.sources[s];
            const auto& inc = seg.gaussian[s];
            for (std::size_t j = 0; j < inc.size(); ++j)
                acc += inc[j] * src.kernel(at - seg.grid.midpoint(j), y);
            const double drift = src.jumps.mean_jump_rate();
            if (drift != 0.0)
                acc -= drift * (src.occupation_kernel(at - seg.grid.start(), y) -
                                src.occupation_kernel(at - seg.grid.end(), y));
        }
        for (const JumpEvent& e : seg.jumps)
            acc += e.u * model.sources[e.source].kernel(at - e.s, y);
        v[i] = acc;
    }
    return GridFunction(grid, std::move(v));
}

GridFunction path_field(const DriverModel& model, const PathState& state,
                        const std::shared_ptr<const SpatialGrid>& grid) {
    GridFunction out = state.initial ? apply_semigroup(state.t, *state.initial)
                                     : GridFunction::zero(grid);
    for (const Segment& seg : state.segments)
        out = out + segment_field(model, seg, state.t, grid);
    return out;
}

namespace {

// P_delta on a field known only at the nodes: trapezoid sums against the
// kernel. Unlike apply_semigroup this does not assume the field is smooth on
// the sqrt(delta) scale, only that the grid resolves it.
GridFunction transport_nodal(double delta, const GridFunction& field) {
    const SpatialGrid& g = field.grid();
    std::vector<double> out(g.size(), 0.0);
    const double reach = 10.0 * std::sqrt(delta);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double y = g.node(j);
            if (std::abs(y - x) <= reach)
                acc += g.weight(j) * abm_density(delta, x, y) * field[j];
        }
        out[i] = acc;
    }
    return GridFunction(field.grid_ptr(), std::move(out));
}

}  // namespace

PathState advance_markov(const PathState& state, double delta, const DriverModel& model,
                         double dt, const StreamId& id) {
    if (!(delta > 0.0))
        throw DomainError("advance_markov: delta must be positive");
    PathState next = state;
    const TimeGrid grid(state.t, state.t + delta, std::min(dt, delta));
    next.segments.push_back(
        sample_segment(model, grid, id, static_cast<std::uint32_t>(state.segments.size())));
    next.t = grid.end();
    if (state.field) {
        const auto& g = state.field->grid_ptr();
        next.field = transport_nodal(delta, *state.field) +
                     segment_field(model, next.segments.back(), next.t, g);
    }
    return next;
}

// ---------------------------------------------------------------- evaluation

namespace {

constexpr std::array<double, 8> bary8 = {1, -7, 21, -35, 35, -21, 7, -1};

}  // namespace

SqrtTable::SqrtTable(const DriverSource& src, const GridFunction& g, double horizon,
                     std::size_t intervals) {
    if (!(horizon > 0.0) || intervals < 8)
        throw DomainError("SqrtTable: bad horizon or resolution");
    step_ = std::sqrt(horizon) / static_cast<double>(intervals);
    values_.resize(intervals);
    for (std::size_t i = 0; i < intervals; ++i) {
        const double u = (static_cast<double>(i) + 0.5) * step_;
        values_[i] = src.functional(u * u, g);
    }
}

double SqrtTable::operator()(double tau) const {
    const double pos = std::sqrt(std::max(tau, 0.0)) / step_ - 0.5;
    const auto n = static_cast<std::ptrdiff_t>(values_.size());
    const auto first = std::clamp<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(std::floor(pos)) - 3, 0, n - 8);
    const double s = pos - static_cast<double>(first);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < 8; ++j) {
        const double d = s - static_cast<double>(j);
        const double v = values_[static_cast<std::size_t>(first) + j];
        if (d == 0.0)
            return v;
        const double c = bary8[j] / d;
        num += c * v;
        den += c;
    }
    return num / den;
}

SegmentEvaluator::SegmentEvaluator(std::shared_ptr<const DriverModel> model, const TimeGrid& grid,
                                   std::vector<GridFunction> panel)
    : model_(std::move(model)), grid_(grid), panel_(std::move(panel)) {
    const auto& sources = model_->sources;
    const double span = grid_.end() - grid_.start();
    coef_.resize(sources.size());
    tables_.resize(sources.size());
    compensator_.resize(sources.size());
    for (std::size_t s = 0; s < sources.size(); ++s) {
        const DriverSource& src = sources[s];
        coef_[s].resize(panel_.size());
        tables_[s].resize(panel_.size());
        compensator_[s].assign(panel_.size(), 0.0);
        for (std::size_t k = 0; k < panel_.size(); ++k) {
            if (src.gaussian_rate > 0.0) {
                auto& c = coef_[s][k];
                c.resize(grid_.size());
                for (std::size_t j = 0; j < grid_.size(); ++j)
                    c[j] = src.functional(grid_.end() - grid_.midpoint(j), panel_[k]);
            }
            if (!src.jumps.empty()) {
                tables_[s][k] = SqrtTable(src, panel_[k], span);
                compensator_[s][k] = src.jumps.mean_jump_rate() * src.occupation(span, panel_[k]);
            }
        }
    }
}

double SegmentEvaluator::evaluate(const Segment& seg, std::size_t k) const {
    double acc = 0.0;
    for (std::size_t s = 0; s < coef_.size(); ++s) {
        const auto& inc = seg.gaussian[s];
        const auto& c = coef_[s][k];
        if (!inc.empty() && !c.empty())
            for (std::size_t j = 0; j < inc.size(); ++j)
                acc += inc[j] * c[j];
        acc -= compensator_[s][k];
    }
    for (const JumpEvent& e : seg.jumps)
        acc += e.u * tables_[e.source][k](grid_.end() - e.s);
    return acc;
}

double SegmentEvaluator::discrete_variance(std::size_t k) const {
    double v = 0.0;
    for (std::size_t s = 0; s < coef_.size(); ++s) {
        const auto& c = coef_[s][k];
        double part = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j)
            part += grid_.length(j) * c[j] * c[j];
        v += model_->sources[s].gaussian_rate * part;
    }
    return v;
}

double SegmentEvaluator::exact_variance(std::size_t k) const {
    const TimeQuadrature q{grid_.end() - grid_.start(), Substitution::sqrt, 16};
    double v = 0.0;
    for (const DriverSource& src : model_->sources) {
        if (src.gaussian_rate == 0.0)
            continue;
        v += src.gaussian_rate * q.integrate([&](double tau) {
            const double a = src.functional(tau, panel_[k]);
            return a * a;
        });
    }
    return v;
}

PathEvaluator::PathEvaluator(std::shared_ptr<const DriverModel> model, std::vector<TimeGrid> grids,
                             const std::vector<GridFunction>& panel)
    : horizon_(grids.empty() ? 0.0 : grids.back().end()), panel_(panel) {
    if (grids.empty())
        throw DomainError("PathEvaluator: no segments");
    for (const TimeGrid& g : grids) {
        std::vector<GridFunction> moved;
        moved.reserve(panel.size());
        for (const auto& f : panel)
            moved.push_back(apply_semigroup(horizon_ - g.end(), f));
        parts_.emplace_back(model, g, std::move(moved));
    }
}

std::vector<double> PathEvaluator::evaluate(const PathState& state) const {
    if (state.segments.size() != parts_.size() || state.t != horizon_)
        throw DomainError("PathEvaluator: path does not match the evaluator partition");
    std::vector<double> out(panel_.size(), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (std::size_t i = 0; i < parts_.size(); ++i)
            out[k] += parts_[i].evaluate(state.segments[i], k);
        if (state.initial)
            out[k] += SignedAtomicMeasure({}, state.initial)
                          .integrate(apply_semigroup(horizon_, panel_[k]));
    }
    return out;
}

double PathEvaluator::discrete_variance(std::size_t k) const {
    double v = 0.0;
    for (const auto& p : parts_)
        v += p.discrete_variance(k);
    return v;
}

std::vector<double> SampleMatrix::column(std::size_t k) const {
    std::vector<double> c(replicas);
    for (std::size_t r = 0; r < replicas; ++r)
        c[r] = (*this)(r, k);
    return c;
}

SampleMatrix simulate_replicas(std::shared_ptr<const DriverModel> model,
                               const std::vector<GridFunction>& panel, double t, double dt,
                               std::uint64_t seed, std::size_t replicas, unsigned workers,
                               std::uint32_t route, double split) {
    if (panel.empty())
        throw PreconditionError("simulate_replicas: empty panel");
    if (!(t > 0.0) || !(dt > 0.0) || dt > t)
        throw DomainError("simulate_replicas: need 0 < dt <= t");
    if (split < 0.0 || split >= t)
        throw DomainError("simulate_replicas: split must lie in [0, t)");
    model->validate(panel.front().grid());

    std::vector<TimeGrid> grids;
    std::vector<double> deltas;
    if (split > 0.0) {
        grids.emplace_back(0.0, split, std::min(dt, split));
        grids.emplace_back(split, t, std::min(dt, t - split));
        deltas = {split, t - split};
    } else {
        grids.emplace_back(0.0, t, dt);
        deltas = {t};
    }
    const PathEvaluator eval(model, grids, panel);

    SampleMatrix out{replicas, panel.size(), std::vector<double>(replicas * panel.size())};
    for_each_index(replicas, workers, [&](std::size_t r) {
        const StreamId id{seed, static_cast<std::uint32_t>(r), route};
        PathState state;
        for (double d : deltas)
            state = advance_markov(state, d, *model, dt, id);
        const auto row = eval.evaluate(state);
        std::copy(row.begin(), row.end(), out.values.begin() + static_cast<std::ptrdiff_t>(r * panel.size()));
    });
    return out;
}

// ---------------------------------------------------------------- single draws

GridFunction simulate_gaussian_field(const GridFunction& c, const CatalystMeasure& eta, double t,
                                     double dt, const StreamId& id) {
    const DriverModel model = catalyst_model(BranchingMechanism{c, {}}, eta);
    model.validate(c.grid());
    const Segment seg = sample_segment(model, TimeGrid(0.0, t, dt), id, 0);
    return segment_field(model, seg, t, c.grid_ptr());
}

GridFunction simulate_entrance_gaussian(double c, double t, double dt,
                                        const std::shared_ptr<const SpatialGrid>& grid,
                                        const StreamId& id) {
    const DriverModel model = entrance_model(LocalMechanism{c, {}});
    const Segment seg = sample_segment(model, TimeGrid(0.0, t, dt), id, 0);
    return segment_field(model, seg, t, grid);
}

std::vector<double> simulate_jump_functional(const AtomicLevyMeasure& m, double t,
                                             const std::vector<GridFunction>& panel,
                                             const StreamId& id) {
    if (!m.bounded_weighted())
        throw PreconditionError("simulate_jump_functional: (1 v |u|) m(du) must be finite");
    auto model = std::make_shared<const DriverModel>(entrance_model(LocalMechanism{0.0, m}));
    const TimeGrid grid(0.0, t, t, 0);
    const SegmentEvaluator eval(model, grid, panel);
    const Segment seg = sample_segment(*model, grid, id, 0);
    std::vector<double> out(panel.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = eval.evaluate(seg, k);
    return out;
}

SignedMeasureSample simulate_signed_measure(const BranchingMechanism& mech,
                                            const CatalystMeasure& eta, double t,
                                            const std::vector<GridFunction>& panel,
                                            const StreamId& id) {
    if (mech.c.sup_norm() != 0.0)
        throw PreconditionError("simulate_signed_measure: the mechanism must be pure jump");
    auto model = std::make_shared<const DriverModel>(catalyst_model(mech, eta));
    if (!panel.empty())
        model->validate(panel.front().grid());
    const TimeGrid grid(0.0, t, t, 0);
    SignedMeasureSample out{model, t, sample_segment(*model, grid, id, 0), {}};
    if (!panel.empty()) {
        const SegmentEvaluator eval(model, grid, panel);
        for (std::size_t k = 0; k < panel.size(); ++k)
            out.values.push_back(eval.evaluate(out.segment, k));
    }
    return out;
}

SignedAtomicMeasure SignedMeasureSample::measure(
    const std::shared_ptr<const SpatialGrid>& grid) const {
    return SignedAtomicMeasure({}, segment_field(*model, segment, t, grid));
}

std::pair<SignedAtomicMeasure, SignedAtomicMeasure> SignedMeasureSample::sign_decomposition(
    const std::shared_ptr<const SpatialGrid>& grid) const {
    std::vector<double> pos(grid->size(), 0.0), neg(grid->size(), 0.0);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const double y = grid->node(i);
        for (const JumpEvent& e : segment.jumps) {
            const double v = std::abs(e.u) * model->sources[e.source].kernel(t - e.s, y);
            (e.u > 0.0 ? pos[i] : neg[i]) += v;
        }
        for (const DriverSource& src : model->sources) {
            double up = 0.0, down = 0.0;
            for (const LevyAtom& a : src.jumps.atoms())
                (a.jump > 0.0 ? up : down) += a.mass * a.jump;
            const double occ = src.occupation_kernel(t - segment.grid.start(), y);
            pos[i] -= down * occ;
            neg[i] += up * occ;
        }
    }
    return {SignedAtomicMeasure({}, GridFunction(grid, std::move(pos))),
            SignedAtomicMeasure({}, GridFunction(grid, std::move(neg)))};
}

std::vector<double> h_transform_process(const SignedAtomicMeasure& y,
                                        const std::vector<BoundaryGridFunction>& panel) {
    std::vector<Atom> atoms;
    for (const Atom& a : y.atoms())
        if (a.x > 0.0)
            atoms.push_back({a.x, excessive_h(a.x) * a.w});
    std::optional<GridFunction> density;
    if (y.density())
        density = y.density()->times(excessive_h);
    const SignedAtomicMeasure z(std::move(atoms), std::move(density));
    std::vector<double> out;
    out.reserve(panel.size());
    for (const auto& f : panel)
        out.push_back(z.integrate(f));
    return out;
}

double r_metric(const SignedAtomicMeasure& mu, const SignedAtomicMeasure& nu,
                const std::vector<GridFunction>& panel) {
    double r = 0.0;
    double weight = 1.0;
    for (const auto& f : panel) {
        weight *= 0.5;
        r += weight * std::min(1.0, std::abs(mu.integrate(f) - nu.integrate(f)));
    }
    return r;
}

double r_metric_jordan(const SignedAtomicMeasure& mu, const SignedAtomicMeasure& nu,
                       const std::vector<GridFunction>& panel) {
    return r_metric(mu.positive_part(), nu.positive_part(), panel) +
           r_metric(mu.negative_part(), nu.negative_part(), panel);
}

}  // namespace mehler
