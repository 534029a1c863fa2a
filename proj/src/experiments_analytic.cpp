// Deterministic experiments: kernel identities, SC algebra, Weierstrass.

#include "experiment_detail.hpp"

#include "mehler/error.hpp"
#include "mehler/kernels.hpp"
#include "mehler/panel.hpp"
#include "mehler/quadrature.hpp"
#include "mehler/rng.hpp"
#include "mehler/weierstrass.hpp"

#include <cmath>
#include <numbers>

namespace mehler::detail {

namespace {

std::string csv(std::initializer_list<std::string> cells) {
    std::string line;
    for (const auto& c : cells) {
        if (!line.empty())
            line += ',';
        line += c;
    }
    return line;
}

double draw(Philox4x32& gen, double lo, double hi) { return lo + (hi - lo) * uniform_open(gen); }

// ---------------------------------------------------------------- kernels

ExperimentOutput run_kernels(const RunContext& ctx) {
    const json& cfg = ctx.config;
    ExperimentOutput out;
    out.rows = Rows("section,case,quantity,value,reference,abs_error");
    out.seeds = {{"master", ctx.seed}, {"tuples", "philox(seed, 0, 1)"}};

    {
        const Stopwatch clock;
        const json& id = cfg["identities"];
        const double tol = positive(id, "tol");
        Section s{"identities", true, json::object()};
        double worst_norm = 0.0;
        for (const double y : numbers(id, "y")) {
            // time integral of k_s(y) up to T by quadrature, closed-form tail beyond
            const double horizon = 4.0 * y * y;
            const TimeQuadrature q{horizon, Substitution::sqrt, 64};
            const double body = q.integrate([&](double s) { return entrance_kernel(s, y); });
            const double total = body + entrance_mass_beyond(horizon, y);
            const double err = std::abs(total - 1.0);
            worst_norm = std::max(worst_norm, err);
            out.rows.add(csv({"identities", "y=" + format_double(y), "entrance_mass",
                              format_double(total), "1", format_double(err)}));
        }
        Philox4x32 gen(ctx.seed, 0, 1);
        double worst_p = 0.0, worst_k = 0.0;
        const std::size_t tuples = count(id, "tuples");
        for (std::size_t i = 0; i < tuples; ++i) {
            const double r = draw(gen, 0.05, 1.0), t = draw(gen, 0.05, 1.0);
            const double x = draw(gen, 0.1, 3.0), y = draw(gen, 0.1, 3.0);
            const double reach = 12.0 * std::sqrt(r + t);
            const double pp = integrate_width(
                [&](double z) { return abm_density(r, x, z) * abm_density(t, z, y); }, 1e-12,
                x + y + reach, 0.05);
            const double kk = integrate_width(
                [&](double z) { return entrance_kernel(r, z) * abm_density(t, z, y); }, 1e-12,
                y + reach, 0.05);
            const double ep = std::abs(pp - abm_density(r + t, x, y));
            const double ek = std::abs(kk - entrance_kernel(r + t, y));
            worst_p = std::max(worst_p, ep);
            worst_k = std::max(worst_k, ek);
            const std::string tag = "r=" + format_double(r) + " t=" + format_double(t) +
                                    " x=" + format_double(x) + " y=" + format_double(y);
            out.rows.add(csv({"identities", tag, "ck_p", format_double(pp),
                              format_double(abm_density(r + t, x, y)), format_double(ep)}));
            out.rows.add(csv({"identities", tag, "ck_k", format_double(kk),
                              format_double(entrance_kernel(r + t, y)), format_double(ek)}));
        }
        s.pass = worst_norm <= tol && worst_p <= tol && worst_k <= tol;
        s.detail = {{"tol", tol},
                    {"max_normalization_error", worst_norm},
                    {"max_ck_p_error", worst_p},
                    {"max_ck_k_error", worst_k},
                    {"tuples", tuples},
                    {"seconds", clock.seconds()}};
        out.sections.push_back(std::move(s));
    }
    {
        const Stopwatch clock;
        const json& sg = cfg["semigroup"];
        const double r = positive(sg, "r"), t = positive(sg, "t"), tol = positive(sg, "tol");
        const auto grid = grid_of(cfg);
        const auto specs = panel_specs(cfg);
        const auto panel = sample_panel(grid, parse_panel(specs));
        Section s{"semigroup", true, json::object()};
        double worst = 0.0, contraction = 0.0;
        for (std::size_t k = 0; k < panel.size(); ++k) {
            const auto nested = apply_semigroup(r, apply_semigroup(t, panel[k]));
            const auto direct = apply_semigroup(r + t, panel[k]);
            const double gap = (nested - direct).sup_norm();
            const double excess = direct.sup_norm() - panel[k].sup_norm();
            worst = std::max(worst, gap);
            contraction = std::max(contraction, excess);
            out.rows.add(csv({"semigroup", specs[k], "sup_gap", format_double(gap), "0",
                              format_double(gap)}));
        }
        s.pass = worst <= tol && contraction <= tol_quad;
        s.detail = {{"r", r},
                    {"t", t},
                    {"tol", tol},
                    {"max_sup_gap", worst},
                    {"max_contraction_excess", contraction},
                    {"seconds", clock.seconds()}};
        out.sections.push_back(std::move(s));
    }
    return out;
}

void validate_kernels(const json& cfg) {
    const json& id = cfg.at("identities");
    for (const double y : numbers(id, "y"))
        if (!(y > 0.0))
            throw ConfigError("identities.y must be positive");
    positive(id, "tol");
    count(id, "tuples");
    const json& sg = cfg.at("semigroup");
    positive(sg, "r");
    positive(sg, "t");
    positive(sg, "tol");
}

// ---------------------------------------------------------------- sc-check

struct ScSetup {
    double c, x0;
    AtomicLevyMeasure m;
};

ScSetup sc_setup(const json& cfg) {
    const json& g = cfg.at("gaussian");
    ScSetup s{nonnegative(g, "c"), positive(g, "x0"), jumps_of(cfg.at("jumps"), "jumps")};
    if (!s.m.bounded_weighted())
        throw ConfigError("jumps: (1 v |u|) m(du) must be finite");
    return s;
}

ExperimentOutput run_sc_check(const RunContext& ctx) {
    const json& cfg = ctx.config;
    const ScSetup setup = sc_setup(cfg);
    const auto grid = grid_of(cfg);
    const auto specs = panel_specs(cfg);
    const auto panel = sample_panel(grid, parse_panel(specs));
    const double tol = positive(cfg, "tol");
    const auto t_range = numbers(cfg, "t_range");
    const auto r_range = numbers(cfg, "r_range");

    const LogCF gauss = [&](double t, const GridFunction& f) {
        return cf_gaussian_example(setup.c, setup.x0, t, f);
    };
    const LogCF jump = [&](double t, const GridFunction& f) { return cf_jump_example(setup.m, t, f); };

    ExperimentOutput out;
    out.rows = Rows("section,case,r,t,function,residual");
    out.seeds = {{"master", ctx.seed}, {"cases", "philox(seed, 0, 2)"}};

    Philox4x32 gen(ctx.seed, 0, 2);
    const std::size_t cases = count(cfg, "cases");
    struct Case {
        double r, t;
        std::size_t k;
    };
    std::vector<Case> drawn;
    for (std::size_t i = 0; i < cases; ++i) {
        const double r = draw(gen, r_range[0], r_range[1]);
        const double t = draw(gen, t_range[0], t_range[1]);
        const auto k = static_cast<std::size_t>(uniform_open(gen) * static_cast<double>(panel.size()));
        drawn.push_back({r, t, std::min(k, panel.size() - 1)});
    }

    const auto family = [&](const std::string& name, const LogCF& logcf) {
        Section s{name, true, json::object()};
        double worst = 0.0;
        for (std::size_t i = 0; i < drawn.size(); ++i) {
            const Case& c = drawn[i];
            const double res = sc_residual(logcf, c.r, c.t, panel[c.k]);
            if (!std::isfinite(res))
                throw DivergenceError(name + ": case " + std::to_string(i) + " is not finite");
            worst = std::max(worst, res);
            out.rows.add(csv({name, std::to_string(i), format_double(c.r), format_double(c.t),
                              specs[c.k], format_double(res)}));
        }
        s.pass = worst <= tol;
        s.detail = {{"cases", drawn.size()}, {"tol", tol}, {"max_residual", worst}};
        return s;
    };
    out.sections.push_back(family("gaussian", gauss));
    out.sections.push_back(family("jump", jump));

    {
        const double factor = positive(cfg, "negative_factor");
        Section s{"negative-control", true, json::object()};
        json list = json::array();
        for (const auto& nc : cfg["negative_cases"]) {
            const double r = nc.at(0).get<double>(), t = nc.at(1).get<double>();
            const auto k = nc.at(2).get<std::size_t>();
            for (const auto& [name, logcf] : {std::pair{"gaussian", gauss}, std::pair{"jump", jump}}) {
                const double res = sc_residual(logcf, r, t, panel[k], KernelKind::free);
                const bool ok = res > factor * tol;
                s.pass = s.pass && ok;
                list.push_back({{"family", name}, {"r", r}, {"t", t}, {"function", specs[k]},
                                {"residual", res}, {"pass", ok}});
                out.rows.add(csv({"negative-control", name, format_double(r), format_double(t),
                                  specs[k], format_double(res)}));
            }
        }
        s.detail = {{"threshold", factor * tol}, {"cases", list}};
        out.sections.push_back(std::move(s));
    }
    {
        // Two quadrature routes to the Gaussian example: the entrance law
        // integrated over time, and the closed-form time integral.
        const json& fw = cfg["forward"];
        const double t = positive(fw, "t"), ftol = positive(fw, "tol");
        const BranchingMechanism mech{GridFunction::sample(grid, [&](double) { return setup.c; }), {}};
        const auto el = EntranceLawCF::catalytic(mech, CatalystMeasure({{setup.x0, 1.0}}));
        const TimeQuadrature tq{t, Substitution::sqrt, 8};
        Section s{"forward", true, json::object()};
        double worst = 0.0;
        for (std::size_t k = 0; k < panel.size(); ++k) {
            const cplx a = sc_from_entrance_law(el, t, panel[k], tq);
            const cplx b = cf_gaussian_example(setup.c, setup.x0, t, panel[k]);
            const double gap = std::abs(a - b);
            worst = std::max(worst, gap);
            out.rows.add(csv({"forward", std::to_string(k), "0", format_double(t), specs[k],
                              format_double(gap)}));
        }
        s.pass = worst <= ftol;
        s.detail = {{"t", t}, {"tol", ftol}, {"max_gap", worst}};
        out.sections.push_back(std::move(s));
    }
    return out;
}

void validate_sc_check(const json& cfg) {
    sc_setup(cfg);
    positive(cfg, "tol");
    positive(cfg, "negative_factor");
    count(cfg, "cases");
    for (const char* key : {"t_range", "r_range"}) {
        const auto range = numbers(cfg, key);
        if (range.size() != 2 || !(range[0] >= 0.0) || !(range[1] > range[0]))
            throw ConfigError(std::string(key) + " must be [lo, hi] with 0 <= lo < hi");
    }
    const auto n = parse_panel(panel_specs(cfg)).size();
    if (!cfg.at("negative_cases").is_array())
        throw ConfigError("negative_cases must be a list of [r, t, function]");
    for (const auto& nc : cfg["negative_cases"]) {
        if (!nc.is_array() || nc.size() != 3 || !nc[0].is_number() || !nc[1].is_number() ||
            !nc[2].is_number_integer() || nc[2].get<std::int64_t>() < 0 ||
            nc[2].get<std::size_t>() >= n ||
            !(nc[0].get<double>() >= 0.0) || !(nc[1].get<double>() >= 0.0))
            throw ConfigError("negative_cases must be a list of [r, t, function index]");
    }
    const json& fw = cfg.at("forward");
    positive(fw, "t");
    positive(fw, "tol");
}

// ---------------------------------------------------------------- weierstrass

ExperimentOutput run_weierstrass(const RunContext& ctx) {
    const json& cfg = ctx.config;
    const int order = static_cast<int>(count(cfg, "order"));
    ExperimentOutput out;
    out.rows = Rows("section,case,t,series,direct,residual");
    out.seeds = {{"master", ctx.seed}, {"shifts", "philox(seed, 0, 3)"}};
    Philox4x32 gen(ctx.seed, 0, 3);
    {
        const double tol = positive(cfg, "tol_route");
        WeierstrassDirect direct(order);
        double worst = 0.0;
        const std::size_t shifts = count(cfg, "shifts");
        for (std::size_t i = 0; i < shifts; ++i) {
            const double t = draw(gen, 0.0, 2.0 * std::numbers::pi);
            const double a = weierstrass_linear_part(order, t);
            const double b = direct(t);
            worst = std::max(worst, std::abs(a - b));
            out.rows.add(csv({"route", std::to_string(i), format_double(t), format_double(a),
                              format_double(b), format_double(std::abs(a - b))}));
        }
        out.sections.push_back({"route", worst <= tol,
                                {{"order", order}, {"shifts", shifts}, {"tol", tol}, {"max_residual", worst}}});
    }
    {
        const double tol = positive(cfg, "tol_anchor");
        const double at0 = weierstrass_linear_part(order, 0.0);
        const double atpi = weierstrass_linear_part(order, std::numbers::pi);
        out.rows.add(csv({"anchors", "0", "0", format_double(at0), "", format_double(std::abs(at0))}));
        out.rows.add(csv({"anchors", "1", format_double(std::numbers::pi), format_double(atpi), "",
                          format_double(std::abs(atpi))}));
        out.sections.push_back({"anchors", std::abs(at0) <= tol && std::abs(atpi) <= tol,
                                {{"tol", tol}, {"at_zero", at0}, {"at_pi", atpi}}});
    }
    {
        const double tol = positive(cfg, "tol_sc");
        const std::size_t pairs = count(cfg, "sc_pairs");
        // dyadic shifts j / 1024 keep n t exact for n = 2^k
        std::vector<double> ts, rs;
        for (std::size_t i = 0; i < pairs; ++i) {
            ts.push_back(std::ldexp(std::floor(4096.0 * uniform_open(gen)), -10));
            rs.push_back(std::ldexp(std::floor(4096.0 * uniform_open(gen)), -10));
        }
        const ScConstantCheck random = sc_constant_check(ts, rs, order);
        const ScConstantCheck zero = sc_constant_check(ts, {0.0}, order);
        out.rows.add(csv({"sc-constant", "random", "", "", "", format_double(random.max_residual)}));
        out.rows.add(csv({"sc-constant", "r=0", "", "", "", format_double(zero.max_residual)}));
        out.sections.push_back({"sc-constant",
                                random.max_residual <= tol && zero.max_residual == 0.0 &&
                                    random.max_modulus_defect <= tol,
                                {{"tol", tol},
                                 {"cases", random.cases},
                                 {"max_residual", random.max_residual},
                                 {"r0_residual", zero.max_residual},
                                 {"max_modulus_defect", random.max_modulus_defect}}});
    }
    {
        // diagnostic only: growth of difference quotients toward small scales
        const auto q = difference_quotients(order, numbers(cfg, "quotient_scales"));
        json list = json::array();
        for (const auto& s : q) {
            list.push_back({{"h", s.h}, {"max_quotient", s.max_quotient}});
            out.rows.add(csv({"quotients", format_double(s.h), "", "", "", format_double(s.max_quotient)}));
        }
        out.sections.push_back({"quotients", true, {{"diagnostic", true}, {"scales", list}}});
    }
    return out;
}

void validate_weierstrass(const json& cfg) {
    const auto order = count(cfg, "order");
    if (order > 24)
        throw ConfigError("order must not exceed 24");
    count(cfg, "shifts");
    count(cfg, "sc_pairs");
    positive(cfg, "tol_route");
    positive(cfg, "tol_anchor");
    positive(cfg, "tol_sc");
    for (const double h : numbers(cfg, "quotient_scales"))
        if (!(h > 0.0))
            throw ConfigError("quotient_scales must be positive");
}

}  // namespace

Experiment kernels_experiment() {
    json d = common_defaults("kernels", 0);
    d["identities"] = {{"y", {0.25, 1.0, 4.0}}, {"tuples", 20}, {"tol", 1e-6}};
    d["semigroup"] = {{"r", 0.3}, {"t", 0.7}, {"tol", 1e-5}};
    return {"kernels", "entrance-law normalisation, Chapman-Kolmogorov, semigroup consistency", d,
            validate_kernels, run_kernels};
}

Experiment sc_check_experiment() {
    json d = common_defaults("sc-check", 0);
    d["gaussian"] = {{"c", 0.5}, {"x0", 1.0}};
    d["jumps"] = json::array({{0.8, 1.5}, {-0.5, 1.0}, {2.0, 0.3}});
    d["cases"] = 50;
    d["r_range"] = {0.05, 1.0};
    d["t_range"] = {0.05, 1.0};
    d["tol"] = 1e-6;
    d["negative_factor"] = 10.0;
    d["negative_cases"] = json::array({{0.5, 0.5, 0}, {0.3, 0.6, 4}});
    d["forward"] = {{"t", 1.0}, {"tol", 1e-6}};
    return {"sc-check", "SC-semigroup identity for the Gaussian and jump examples, forward route",
            d, validate_sc_check, run_sc_check};
}

Experiment weierstrass_experiment() {
    json d = common_defaults("weierstrass", 0);
    d["order"] = 20;
    d["shifts"] = 100;
    d["sc_pairs"] = 10;
    d["tol_route"] = 1e-8;
    d["tol_anchor"] = 1e-12;
    d["tol_sc"] = 1e-12;
    d["quotient_scales"] = {1e-1, 1e-2, 1e-3, 1e-4};
    return {"weierstrass", "lacunary Fourier example: series vs direct inner product, constant SC",
            d, validate_weierstrass, run_weierstrass};
}

}  // namespace mehler::detail
