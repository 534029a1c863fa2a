// Monte Carlo experiments: driven processes, signed measures, particles.

#include "experiment_detail.hpp"

#include "mehler/error.hpp"
#include "mehler/kernels.hpp"
#include "mehler/panel.hpp"
#include "mehler/particles.hpp"

#include <cmath>

namespace mehler::detail {

namespace {

constexpr std::uint32_t route_main = 0;
constexpr std::uint32_t route_one_shot = 1;
constexpr std::uint32_t route_recursive = 2;
constexpr std::uint32_t route_views = 3;
constexpr std::uint32_t route_boundary = 4;

json route_seeds(std::uint64_t seed) {
    return {{"master", seed},
            {"routes",
             {{"cf", route_main},
              {"markov_one_shot", route_one_shot},
              {"markov_recursive", route_recursive},
              {"views", route_views},
              {"boundary", route_boundary}}}};
}

GridFunction constant(const std::shared_ptr<const SpatialGrid>& grid, double v) {
    return GridFunction::sample(grid, [v](double) { return v; });
}

CatalystMeasure catalyst_of(const json& cfg, const SpatialGrid& grid) {
    const auto atoms = atoms_of(cfg.at("catalyst"), "catalyst");
    if (atoms.empty())
        throw ConfigError("catalyst must have at least one atom");
    for (const Atom& a : atoms)
        if (!(a.x > 0.0) || !(a.w > 0.0))
            throw ConfigError("catalyst atoms need positive positions and weights");
    CatalystMeasure eta(atoms);
    try {
        eta.require_inside(grid);
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("catalyst: ") + e.what());
    }
    return eta;
}

void require_replicas(const json& j, const char* key) {
    if (count(j, key, 0) < min_replicas)
        throw ConfigError(std::string("'") + key + "' must be at least " + std::to_string(min_replicas));
}

struct MarkovSpec {
    bool enabled;
    double split;
    std::size_t replicas;
};

MarkovSpec markov_of(const json& cfg, double t) {
    const json& m = cfg.at("markov");
    if (!m.at("enabled").is_boolean())
        throw ConfigError("markov.enabled must be true or false");
    MarkovSpec s{m["enabled"].get<bool>(), 0.0, 0};
    if (s.enabled) {
        s.split = positive(m, "fraction") * t;
        if (!(s.split < t))
            throw ConfigError("markov.fraction must lie in (0, 1)");
        require_replicas(m, "replicas");
        s.replicas = count(m, "replicas");
    }
    return s;
}

// One-shot against recursive simulation of the same model.
void markov_sections(ExperimentOutput& out, const RunContext& ctx,
                     const std::shared_ptr<const DriverModel>& model,
                     const std::vector<GridFunction>& panel, const std::vector<std::string>& specs,
                     const std::vector<double>& points, double t, double dt, const MarkovSpec& mk,
                     bool gaussian) {
    if (!mk.enabled)
        return;
    const auto one = simulate_replicas(model, panel, t, dt, ctx.seed, mk.replicas, ctx.workers,
                                       route_one_shot);
    const auto two = simulate_replicas(model, panel, t, dt, ctx.seed, mk.replicas, ctx.workers,
                                       route_recursive, mk.split);
    require_finite(one, "markov one-shot");
    require_finite(two, "markov recursive");
    const auto a = empirical_cf(one, specs, points);
    const auto b = empirical_cf(two, specs, points);
    CellReals budget = constant_budget(a, 0.0);
    if (gaussian) {
        // The two Euler schemes have slightly different exact Gaussian laws.
        const PathEvaluator pe1(model, {TimeGrid(0.0, t, dt)}, panel);
        const PathEvaluator pe2(model,
                                {TimeGrid(0.0, mk.split, std::min(dt, mk.split)),
                                 TimeGrid(mk.split, t, std::min(dt, t - mk.split))},
                                panel);
        for (std::size_t k = 0; k < panel.size(); ++k)
            for (std::size_t p = 0; p < points.size(); ++p) {
                const double x2 = points[p] * points[p];
                budget[k][p] = std::abs(std::exp(-0.5 * x2 * pe1.discrete_variance(k)) -
                                        std::exp(-0.5 * x2 * pe2.discrete_variance(k)));
            }
    }
    const auto rep = compare_two_sample(a, b, budget);
    Section s = cf_section("markov", a, rep);
    s.detail["split"] = mk.split;
    s.detail["replicas_each"] = mk.replicas;
    out.sections.push_back(std::move(s));
    out.markov_rows = Rows(sample_header);
    append_samples(out.markov_rows, "one-shot", one, ctx.seed, t);
    append_samples(out.markov_rows, "recursive", two, ctx.seed, t);
}

std::string process_of(const json& cfg) {
    const auto p = cfg.at("process").get<std::string>();
    if (p != "catalyst" && p != "entrance")
        throw ConfigError("process must be \"catalyst\" or \"entrance\"");
    return p;
}

// ---------------------------------------------------------------- simulate-gauss

void validate_gauss(const json& cfg) {
    const auto grid = grid_of(cfg);
    if (process_of(cfg) == "catalyst")
        catalyst_of(cfg, *grid);
    nonnegative(cfg.at("mechanism"), "c");
    const double t = horizon_of(cfg);
    steps_of(cfg);
    require_replicas(cfg, "replicas");
    markov_of(cfg, t);
}

ExperimentOutput run_gauss(const RunContext& ctx) {
    const json& cfg = ctx.config;
    const auto grid = grid_of(cfg);
    const auto specs = panel_specs(cfg);
    const auto points = points_of(cfg);
    const auto panel = sample_panel(grid, parse_panel(specs));
    const double t = horizon_of(cfg);
    const double dt = t / static_cast<double>(steps_of(cfg));
    const double c = nonnegative(cfg["mechanism"], "c");
    const bool catalytic = process_of(cfg) == "catalyst";

    std::shared_ptr<const DriverModel> model;
    std::function<cplx(const GridFunction&)> exact_log;
    if (catalytic) {
        const CatalystMeasure eta = catalyst_of(cfg, *grid);
        const BranchingMechanism mech{constant(grid, c), {}};
        model = std::make_shared<const DriverModel>(catalyst_model(mech, eta));
        exact_log = [=](const GridFunction& f) {
            return limit_ou_log_cf(mech, eta, SignedAtomicMeasure{}, t, f);
        };
    } else {
        const LocalMechanism local{c, {}};
        model = std::make_shared<const DriverModel>(entrance_model(local));
        exact_log = [=](const GridFunction& f) {
            return entrance_ou_log_cf(local, SignedAtomicMeasure{}, t, f);
        };
    }

    ExperimentOutput out;
    out.seeds = route_seeds(ctx.seed);
    const auto samples = simulate_replicas(model, panel, t, dt, ctx.seed, ctx.replicas, ctx.workers,
                                           route_main);
    require_finite(samples, "cf");
    const auto emp = empirical_cf(samples, specs, points);

    // Gaussian laws: log CF at xi is xi^2 times the value at 1.
    const PathEvaluator coarse(model, {TimeGrid(0.0, t, dt)}, panel);
    const PathEvaluator fine(model, {TimeGrid(0.0, t, dt / 2)}, panel);
    CellValues analytic(panel.size()), coarse_log(panel.size()), fine_log(panel.size());
    json variances = json::array();
    for (std::size_t k = 0; k < panel.size(); ++k) {
        const cplx unit = exact_log(panel[k]);
        const double vc = coarse.discrete_variance(k), vf = fine.discrete_variance(k);
        variances.push_back({{"function", specs[k]}, {"exact", -2.0 * unit.real()},
                             {"dt", vc}, {"dt_half", vf}});
        for (const double xi : points) {
            analytic[k].push_back(xi * xi * unit);
            coarse_log[k].push_back(-0.5 * xi * xi * vc);
            fine_log[k].push_back(-0.5 * xi * xi * vf);
        }
    }
    const auto rep = compare_cf(emp, analytic, richardson_budget(coarse_log, fine_log));
    Section cf = cf_section("cf", emp, rep);
    cf.detail["variances"] = variances;
    cf.detail["dt"] = dt;
    out.sections.push_back(std::move(cf));
    out.sections.push_back(mean_section("mean", samples, specs));
    out.rows = Rows(sample_header);
    append_samples(out.rows, "cf", samples, ctx.seed, t);
    markov_sections(out, ctx, model, panel, specs, points, t, dt, markov_of(cfg, t), true);
    return out;
}

// ---------------------------------------------------------------- simulate-jump

AtomicLevyMeasure finite_jumps(const json& list, const char* what) {
    AtomicLevyMeasure m = jumps_of(list, what);
    if (!m.bounded_weighted())
        throw ConfigError(std::string(what) + ": (1 v |u|) m(du) must be finite");
    return m;
}

void validate_jump(const json& cfg) {
    const auto grid = grid_of(cfg);
    if (process_of(cfg) == "catalyst")
        catalyst_of(cfg, *grid);
    finite_jumps(cfg.at("mechanism").at("jumps"), "mechanism.jumps");
    const double t = horizon_of(cfg);
    require_replicas(cfg, "replicas");
    markov_of(cfg, t);
}

ExperimentOutput run_jump(const RunContext& ctx) {
    const json& cfg = ctx.config;
    const auto grid = grid_of(cfg);
    const auto specs = panel_specs(cfg);
    const auto points = points_of(cfg);
    const auto panel = sample_panel(grid, parse_panel(specs));
    const double t = horizon_of(cfg);
    const AtomicLevyMeasure m = finite_jumps(cfg["mechanism"]["jumps"], "mechanism.jumps");

    std::shared_ptr<const DriverModel> model;
    std::function<cplx(const GridFunction&)> exact_log;
    if (process_of(cfg) == "catalyst") {
        const CatalystMeasure eta = catalyst_of(cfg, *grid);
        const BranchingMechanism mech{GridFunction::zero(grid), {m}};
        model = std::make_shared<const DriverModel>(catalyst_model(mech, eta));
        exact_log = [=](const GridFunction& f) {
            return limit_ou_log_cf(mech, eta, SignedAtomicMeasure{}, t, f);
        };
    } else {
        const LocalMechanism local{0.0, m};
        model = std::make_shared<const DriverModel>(entrance_model(local));
        exact_log = [=](const GridFunction& f) {
            return entrance_ou_log_cf(local, SignedAtomicMeasure{}, t, f);
        };
    }

    ExperimentOutput out;
    out.seeds = route_seeds(ctx.seed);
    const auto samples = simulate_replicas(model, panel, t, t, ctx.seed, ctx.replicas, ctx.workers,
                                           route_main);
    require_finite(samples, "cf");
    const auto emp = empirical_cf(samples, specs, points);
    const auto analytic = tabulate_log_cf(
        emp, [&](std::size_t k, double xi) { return exact_log(panel[k].scaled(xi)); });
    // Jump times and marks are sampled exactly; there is no time step to budget.
    out.sections.push_back(cf_section("cf", emp, compare_cf(emp, analytic, 0.0)));
    out.sections.push_back(mean_section("mean", samples, specs));
    out.rows = Rows(sample_header);
    append_samples(out.rows, "cf", samples, ctx.seed, t);
    markov_sections(out, ctx, model, panel, specs, points, t, t, markov_of(cfg, t), false);
    return out;
}

// ---------------------------------------------------------------- signed-measure

BranchingMechanism site_mechanism(const json& cfg, const std::shared_ptr<const SpatialGrid>& grid,
                                  std::size_t atoms) {
    const json& list = cfg.at("mechanism").at("site_jumps");
    if (!list.is_array() || (list.size() != 1 && list.size() != atoms))
        throw ConfigError("mechanism.site_jumps needs one jump list, or one per catalyst atom");
    BranchingMechanism mech{GridFunction::zero(grid), {}};
    for (const auto& l : list)
        mech.jumps.push_back(finite_jumps(l, "mechanism.site_jumps"));
    return mech;
}

void validate_signed(const json& cfg) {
    const auto grid = grid_of(cfg);
    const auto eta = catalyst_of(cfg, *grid);
    site_mechanism(cfg, grid, eta.size());
    finite_jumps(cfg.at("mechanism").at("boundary_jumps"), "mechanism.boundary_jumps");
    const double t = horizon_of(cfg);
    require_replicas(cfg, "replicas");
    count(cfg, "views", 1);
    count(cfg, "view_nodes", 2);
    positive(cfg, "view_tol");
    markov_of(cfg, t);
}

ExperimentOutput run_signed(const RunContext& ctx) {
    const json& cfg = ctx.config;
    const auto grid = grid_of(cfg);
    const auto specs = panel_specs(cfg);
    const auto points = points_of(cfg);
    const auto panel = sample_panel(grid, parse_panel(specs));
    const double t = horizon_of(cfg);
    const CatalystMeasure eta = catalyst_of(cfg, *grid);
    const BranchingMechanism mech = site_mechanism(cfg, grid, eta.size());
    const LocalMechanism edge{0.0, finite_jumps(cfg["mechanism"]["boundary_jumps"],
                                                "mechanism.boundary_jumps")};

    ExperimentOutput out;
    out.seeds = route_seeds(ctx.seed);
    out.rows = Rows(sample_header);

    const auto site_model = std::make_shared<const DriverModel>(catalyst_model(mech, eta));
    {
        const auto samples = simulate_replicas(site_model, panel, t, t, ctx.seed, ctx.replicas,
                                               ctx.workers, route_main);
        require_finite(samples, "catalytic");
        const auto emp = empirical_cf(samples, specs, points);
        const auto analytic = tabulate_log_cf(emp, [&](std::size_t k, double xi) {
            return limit_ou_log_cf(mech, eta, SignedAtomicMeasure{}, t, panel[k].scaled(xi));
        });
        out.sections.push_back(cf_section("catalytic", emp, compare_cf(emp, analytic, 0.0)));
        out.sections.push_back(mean_section("catalytic-mean", samples, specs));
        append_samples(out.rows, "catalytic", samples, ctx.seed, t);
    }
    {
        const auto model = std::make_shared<const DriverModel>(entrance_model(edge));
        const auto samples = simulate_replicas(model, panel, t, t, ctx.seed, ctx.replicas,
                                               ctx.workers, route_boundary);
        require_finite(samples, "boundary");
        const auto emp = empirical_cf(samples, specs, points);
        const auto analytic = tabulate_log_cf(emp, [&](std::size_t k, double xi) {
            return entrance_ou_log_cf(edge, SignedAtomicMeasure{}, t, panel[k].scaled(xi));
        });
        out.sections.push_back(cf_section("boundary", emp, compare_cf(emp, analytic, 0.0)));
        out.sections.push_back(mean_section("boundary-mean", samples, specs));
        append_samples(out.rows, "boundary", samples, ctx.seed, t);
    }
    {
        // Measure views of single realisations: panel values against the
        // density, and the split by jump sign into nonnegative parts. The
        // density needs a finer grid than the CF check to resolve kernels
        // of jumps shortly before t.
        Section s{"views", true, json::object()};
        GridSpec fine_spec = grid_spec(cfg);
        fine_spec.nodes = count(cfg, "view_nodes", 2);
        const auto fine = make_grid(fine_spec);
        const auto fine_panel = sample_panel(fine, parse_panel(specs));
        const TimeGrid tg(0.0, t, t, 0);
        const SegmentEvaluator ev(site_model, tg, fine_panel);
        double value_gap = 0.0, split_gap = 0.0;
        bool nonnegative_parts = true;
        const std::size_t views = count(cfg, "views", 1);
        for (std::size_t r = 0; r < views; ++r) {
            SignedMeasureSample y{site_model, t,
                                  sample_segment(*site_model, tg,
                                                 {ctx.seed, static_cast<std::uint32_t>(r), route_views}, 0),
                                  {}};
            for (std::size_t k = 0; k < fine_panel.size(); ++k)
                y.values.push_back(ev.evaluate(y.segment, k));
            const auto measure = y.measure(fine);
            for (std::size_t k = 0; k < fine_panel.size(); ++k)
                value_gap = std::max(value_gap, std::abs(measure.integrate(fine_panel[k]) - y.values[k]));
            const auto [pos, neg] = y.sign_decomposition(fine);
            nonnegative_parts = nonnegative_parts && pos.nonnegative() && neg.nonnegative();
            const auto diff = *pos.density() - *neg.density() - *measure.density();
            split_gap = std::max(split_gap, diff.sup_norm() / (1.0 + measure.density()->sup_norm()));
        }
        const double tol = positive(cfg, "view_tol");
        s.pass = value_gap <= tol && nonnegative_parts && split_gap <= 1e-10;
        s.detail = {{"realisations", views},
                    {"nodes", fine_spec.nodes},
                    {"max_value_gap", value_gap},
                    {"tol", tol},
                    {"nonnegative_parts", nonnegative_parts},
                    {"max_split_gap", split_gap}};
        out.sections.push_back(std::move(s));
    }
    markov_sections(out, ctx, site_model, panel, specs, points, t, t, markov_of(cfg, t), false);
    return out;
}

// ---------------------------------------------------------------- h-transform

void validate_h(const json& cfg) {
    grid_of(cfg);
    finite_jumps(cfg.at("mechanism").at("jumps"), "mechanism.jumps");
    atoms_of(cfg.at("initial"), "initial");
    horizon_of(cfg);
    require_replicas(cfg, "replicas");
    count(cfg, "views", 1);
    positive(cfg, "identity_tol");
}

BoundaryGridFunction scaled(const BoundaryGridFunction& f, double xi) {
    return {xi * f.at_zero, f.interior.scaled(xi)};
}

ExperimentOutput run_h(const RunContext& ctx) {
    const json& cfg = ctx.config;
    const auto grid = grid_of(cfg);
    const auto specs = panel_specs(cfg);
    const auto points = points_of(cfg);
    const auto functions = parse_panel(specs);
    const auto bpanel = sample_boundary_panel(grid, functions);
    const double t = horizon_of(cfg);
    const LocalMechanism local{0.0, finite_jumps(cfg["mechanism"]["jumps"], "mechanism.jumps")};
    const SignedAtomicMeasure mu(atoms_of(cfg["initial"], "initial"));

    std::vector<GridFunction> weighted;
    std::vector<double> shift;
    for (const auto& f : bpanel) {
        weighted.push_back(f.interior.times(excessive_h));
        shift.push_back(mu.integrate(h_transform_semigroup(t, f)));
    }

    ExperimentOutput out;
    out.seeds = route_seeds(ctx.seed);
    const auto model = std::make_shared<const DriverModel>(entrance_model(local));
    // Z_t(f) = mu(T_t f) + the boundary jump functional of h f
    SampleMatrix z = simulate_replicas(model, weighted, t, t, ctx.seed, ctx.replicas, ctx.workers,
                                       route_main);
    for (std::size_t r = 0; r < z.replicas; ++r)
        for (std::size_t k = 0; k < z.functions; ++k)
            z.values[r * z.functions + k] += shift[k];
    require_finite(z, "cf");
    const auto emp = empirical_cf(z, specs, points);
    const auto analytic = tabulate_log_cf(emp, [&](std::size_t k, double xi) {
        return h_transform_log_cf(local, mu, t, scaled(bpanel[k], xi));
    });
    Section cf = cf_section("cf", emp, compare_cf(emp, analytic, 0.0));
    cf.detail["deterministic_part"] = shift;
    out.sections.push_back(std::move(cf));
    out.rows = Rows(sample_header);
    append_samples(out.rows, "cf", z, ctx.seed, t);

    {
        // Z = h Y on realisations of the boundary-driven Y.
        const double tol = positive(cfg, "identity_tol");
        const std::size_t views = count(cfg, "views", 1);
        const TimeGrid tg(0.0, t, t, 0);
        double worst = 0.0;
        bool no_atom_at_zero = true;
        for (std::size_t r = 0; r < views; ++r) {
            const Segment seg = sample_segment(
                *model, tg, {ctx.seed, static_cast<std::uint32_t>(r), route_views}, 0);
            const SignedAtomicMeasure y({}, segment_field(*model, seg, t, grid));
            const auto zv = h_transform_process(y, bpanel);
            for (std::size_t k = 0; k < bpanel.size(); ++k) {
                const double direct = y.integrate(weighted[k]);
                // relative to the total variation pairing |Y|(|h f|)
                double scale = 0.0;
                const auto& d = *y.density();
                for (std::size_t i = 0; i < grid->size(); ++i)
                    scale += grid->weight(i) * std::abs(d[i] * weighted[k][i]);
                const double rel = std::abs(zv[k] - direct) / std::max(scale, 1e-300);
                worst = std::max(worst, scale == 0.0 ? std::abs(zv[k] - direct) : rel);
            }
            for (const Atom& a : y.atoms())
                no_atom_at_zero = no_atom_at_zero && a.x > 0.0;
        }
        out.sections.push_back({"identity", worst <= tol,
                                {{"realisations", views}, {"tol", tol}, {"max_relative_gap", worst},
                                 {"no_atom_at_zero", no_atom_at_zero}}});
    }
    {
        Section s{"boundary", true, json::object()};
        json list = json::array();
        for (std::size_t k = 0; k < functions.size(); ++k) {
            if (functions[k].name != "origin")
                continue;
            bool zero = true;
            for (std::size_t r = 0; r < z.replicas; ++r)
                zero = zero && z(r, k) == 0.0;
            s.pass = s.pass && zero;
            list.push_back({{"function", specs[k]}, {"all_zero", zero}});
        }
        s.detail = {{"checked", list}, {"applicable", !list.empty()}};
        out.sections.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------- fluctuation

SweepSettings sweep_of(const json& cfg, std::uint64_t seed, std::size_t replicas, unsigned workers) {
    SweepSettings s;
    const double t = horizon_of(cfg);
    s.t = t;
    s.base.dt = t / static_cast<double>(steps_of(cfg));
    const json& p = cfg.at("particles");
    s.base.length = positive(p, "length");
    s.base.rho = positive(p, "rho");
    s.base.width = nonnegative(p, "width");
    if (!p.at("immigration").is_boolean())
        throw ConfigError("particles.immigration must be true or false");
    s.base.immigration = p["immigration"].get<bool>();
    s.base.c = nonnegative(cfg.at("mechanism"), "c");
    s.base.jumps = jumps_of(cfg["mechanism"].at("jumps"), "mechanism.jumps");
    const auto atoms = atoms_of(cfg.at("catalyst"), "catalyst");
    for (const Atom& a : atoms)
        if (!(a.x > 0.0) || !(a.w > 0.0))
            throw ConfigError("catalyst atoms need positive positions and weights");
    s.base.eta = CatalystMeasure(atoms);
    s.thetas = numbers(cfg, "thetas");
    s.panel = panel_specs(cfg);
    s.points = points_of(cfg);
    s.replicas = replicas;
    s.seed = seed;
    s.workers = workers;
    if (s.thetas.empty())
        throw ConfigError("thetas must not be empty");
    for (std::size_t i = 0; i < s.thetas.size(); ++i) {
        if (i > 0 && !(s.thetas[i] < s.thetas[i - 1]))
            throw ConfigError("thetas must be decreasing");
        ParticleConfig probe = s.base;
        probe.theta = s.thetas[i];
        probe.validate();
    }
    return s;
}

void validate_fluctuation(const json& cfg) {
    require_replicas(cfg, "replicas");
    const auto s = sweep_of(cfg, 0, count(cfg, "replicas"), 1);
    const auto grid = grid_of(cfg);
    for (const Atom& a : s.base.eta.atoms())
        if (a.x + s.base.hat_width() >= grid->upper())
            throw ConfigError("catalyst hat leaves the grid");
}

ExperimentOutput run_fluctuation(const RunContext& ctx) {
    const json& cfg = ctx.config;
    const auto settings = sweep_of(cfg, ctx.seed, ctx.replicas, ctx.workers);
    const auto grid = grid_of(cfg);
    const ThetaSweep sweep = run_theta_sweep(settings, grid);

    ExperimentOutput out;
    out.seeds = {{"master", ctx.seed}, {"streams", "philox(seed, replica, theta index)"}};
    out.rows = Rows(sample_header);
    json rows = json::array();
    for (const ThetaRow& row : sweep.rows) {
        require_finite(row.samples, "theta=" + format_double(row.theta));
        append_samples(out.rows, "theta=" + format_double(row.theta), row.samples, ctx.seed, settings.t);
        rows.push_back({{"theta", row.theta},
                        {"distance", row.distance},
                        {"se", row.se},
                        {"mean_gap", row.mean_gap},
                        {"mean_se", row.mean_se},
                        {"truncation_budget", row.budget},
                        {"mean_ok", row.mean_ok},
                        {"population", row.population}});
    }
    out.sections.push_back({"mean", sweep.means_ok, {{"thetas", rows}}});
    json trend = json::array();
    for (const ThetaRow& row : sweep.rows)
        trend.push_back({{"theta", row.theta}, {"distance", row.distance}, {"se", row.se}});
    out.sections.push_back({"trend", sweep.nonincreasing,
                            {{"rule", "d[k+1] <= d[k] + 3 sqrt(se[k]^2 + se[k+1]^2)"},
                             {"distances", trend}}});
    return out;
}

}  // namespace

Experiment simulate_gauss_experiment() {
    json d = common_defaults("simulate-gauss", 100000);
    d["process"] = "catalyst";
    d["time"] = {{"t", 1.0}, {"steps", 256}};
    d["mechanism"] = {{"c", 0.5}};
    d["catalyst"] = json::array({{1.0, 1.0}});
    d["markov"] = {{"enabled", true}, {"fraction", 0.5}, {"replicas", 20000}};
    return {"simulate-gauss", "Gaussian catalytic or boundary-driven process against its CF", d,
            validate_gauss, run_gauss};
}

Experiment simulate_jump_experiment() {
    json d = common_defaults("simulate-jump", 100000);
    d["process"] = "entrance";
    d["time"] = {{"t", 1.0}, {"steps", 1}};
    d["mechanism"] = {{"jumps", json::array({{0.8, 1.5}, {-0.5, 1.0}, {2.0, 0.3}})}};
    d["catalyst"] = json::array({{1.0, 1.0}});
    d["markov"] = {{"enabled", true}, {"fraction", 0.5}, {"replicas", 20000}};
    return {"simulate-jump", "compensated jump process against its CF", d, validate_jump, run_jump};
}

Experiment signed_measure_experiment() {
    json d = common_defaults("signed-measure", 100000);
    d["time"] = {{"t", 1.0}, {"steps", 1}};
    d["catalyst"] = json::array({{1.0, 1.0}, {2.5, 0.6}});
    d["mechanism"] = {{"site_jumps", json::array({json::array({{1.0, 1.0}, {-0.7, 0.8}}),
                                                  json::array({{0.5, 2.0}})})},
                      {"boundary_jumps", json::array({{1.0, 1.2}, {-0.6, 0.9}})}};
    d["views"] = 50;
    d["view_nodes"] = 8192;
    d["view_tol"] = 1e-4;
    d["markov"] = {{"enabled", true}, {"fraction", 0.5}, {"replicas", 20000}};
    return {"signed-measure", "signed-measure processes driven at catalyst sites and at the boundary",
            d, validate_signed, run_signed};
}

Experiment h_transform_experiment() {
    json d = common_defaults("h-transform", 100000);
    d["time"] = {{"t", 1.0}, {"steps", 1}};
    d["mechanism"] = {{"jumps", json::array({{1.0, 1.2}, {-0.6, 0.9}})}};
    d["initial"] = json::array({{0.0, 0.5}, {1.0, 0.25}});
    d["panel"] = {"origin", "one", "bump:0.5:0.5", "bump:1.5:0.5", "hexp:1", "xexp:2"};
    d["views"] = 200;
    d["identity_tol"] = 1e-12;
    return {"h-transform", "h-transformed process on [0, inf) including the boundary point", d,
            validate_h, run_h};
}

Experiment fluctuation_experiment() {
    json d = common_defaults("fluctuation", 20000);
    d["time"] = {{"t", 0.25}, {"steps", 64}};
    d["mechanism"] = {{"c", 0.5}, {"jumps", json::array()}};
    d["catalyst"] = json::array({{1.0, 1.0}});
    d["particles"] = {{"length", 5.0}, {"rho", 2.0}, {"width", 0.0}, {"immigration", true}};
    d["thetas"] = {1.0, 0.3, 0.1};
    d["panel"] = {"bump:1.5:0.25", "bump:2:0.3"};
    return {"fluctuation", "branching particle system and its small-branching fluctuation limit", d,
            validate_fluctuation, run_fluctuation};
}

}  // namespace mehler::detail
