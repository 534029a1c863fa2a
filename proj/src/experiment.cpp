#include "experiment_detail.hpp"

#include "mehler/error.hpp"
#include "mehler/panel.hpp"

#include <cmath>
#include <limits>

namespace mehler {

bool ExperimentOutput::pass() const {
    for (const Section& s : sections)
        if (!s.pass)
            return false;
    return true;
}

const std::vector<Experiment>& experiments() {
    static const std::vector<Experiment> all = {
        detail::kernels_experiment(),        detail::sc_check_experiment(),
        detail::simulate_gauss_experiment(), detail::simulate_jump_experiment(),
        detail::signed_measure_experiment(), detail::h_transform_experiment(),
        detail::fluctuation_experiment(),    detail::weierstrass_experiment(),
    };
    return all;
}

const Experiment& find_experiment(std::string_view name) {
    for (const Experiment& e : experiments())
        if (e.name == name)
            return e;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

namespace {

// Recursive merge that refuses keys absent from the defaults. Arrays and
// scalars are replaced whole.
void merge_known(json& target, const json& patch, const std::string& where) {
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string path = where.empty() ? it.key() : where + "." + it.key();
        if (!target.contains(it.key()))
            throw ConfigError("unknown config key '" + path + "'");
        json& slot = target[it.key()];
        if (slot.is_object() && it.value().is_object())
            merge_known(slot, it.value(), path);
        else
            slot = it.value();
    }
}

}  // namespace

json resolve_config(const json& user, const Overrides& overrides) {
    if (!user.is_object())
        throw ConfigError("config must be a JSON object");
    if (!user.contains("experiment") || !user["experiment"].is_string())
        throw ConfigError("config needs an \"experiment\" name");
    const Experiment& exp = find_experiment(user["experiment"].get<std::string>());
    json resolved = exp.defaults;
    merge_known(resolved, user, "");
    if (overrides.seed)
        resolved["seed"] = *overrides.seed;
    if (overrides.replicas)
        resolved["replicas"] = *overrides.replicas;
    if (overrides.parallelism)
        resolved["parallelism"] = *overrides.parallelism;
    if (!resolved["seed"].is_number_integer() ||
        (!resolved["seed"].is_number_unsigned() && resolved["seed"].get<std::int64_t>() < 0))
        throw ConfigError("seed is mandatory and must be a nonnegative integer");
    resolved["seed"] = resolved["seed"].get<std::uint64_t>();
    try {
        detail::validate_common(resolved);
        exp.validate(resolved);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return resolved;
}

namespace detail {

json common_defaults(const std::string& name, std::size_t replicas) {
    json d;
    d["experiment"] = name;
    d["seed"] = nullptr;
    d["replicas"] = replicas;
    d["parallelism"] = 1;
    d["output"] = {{"dir", "runs/" + name}};
    d["grid"] = {{"epsilon", 1e-4}, {"horizon", 2.0}, {"support", 8.0}, {"nodes", 512}};
    d["panel"] = default_panel_specs();
    d["points"] = default_points();
    return d;
}

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string("'") + key + "' must be a number");
    const double v = j[key].get<double>();
    if (!std::isfinite(v))
        throw ConfigError(std::string("'") + key + "' must be finite");
    return v;
}

double positive(const json& j, const char* key) {
    const double v = number(j, key);
    if (!(v > 0.0))
        throw ConfigError(std::string("'") + key + "' must be positive");
    return v;
}

double nonnegative(const json& j, const char* key) {
    const double v = number(j, key);
    if (v < 0.0)
        throw ConfigError(std::string("'") + key + "' must be nonnegative");
    return v;
}

std::size_t count(const json& j, const char* key, std::size_t min) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 0)
        throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
    const auto v = j[key].get<std::size_t>();
    if (v < min)
        throw ConfigError(std::string("'") + key + "' must be at least " + std::to_string(min));
    return v;
}

std::vector<double> numbers(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        throw ConfigError(std::string("'") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number() || !std::isfinite(v.get<double>()))
            throw ConfigError(std::string("'") + key + "' must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

GridSpec grid_spec(const json& config) {
    const json& g = config.at("grid");
    GridSpec s;
    s.epsilon = positive(g, "epsilon");
    s.horizon = positive(g, "horizon");
    s.support = positive(g, "support");
    s.nodes = count(g, "nodes", 10);
    return s;
}

std::shared_ptr<const SpatialGrid> grid_of(const json& config) { return make_grid(grid_spec(config)); }

std::vector<std::string> panel_specs(const json& config) {
    if (!config.at("panel").is_array() || config["panel"].empty())
        throw ConfigError("'panel' must be a nonempty array of function specs");
    return config["panel"].get<std::vector<std::string>>();
}

std::vector<double> points_of(const json& config) {
    auto p = numbers(config, "points");
    if (p.empty())
        throw ConfigError("'points' must not be empty");
    return p;
}

AtomicLevyMeasure jumps_of(const json& list, const char* what) {
    if (!list.is_array())
        throw ConfigError(std::string(what) + " must be a list of [jump, mass] pairs");
    std::vector<LevyAtom> atoms;
    for (const auto& a : list) {
        if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
            throw ConfigError(std::string(what) + " must be a list of [jump, mass] pairs");
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    try {
        return AtomicLevyMeasure(std::move(atoms));
    } catch (const std::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

std::vector<Atom> atoms_of(const json& list, const char* what) {
    if (!list.is_array())
        throw ConfigError(std::string(what) + " must be a list of [x, weight] pairs");
    std::vector<Atom> atoms;
    for (const auto& a : list) {
        if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
            throw ConfigError(std::string(what) + " must be a list of [x, weight] pairs");
        const double x = a[0].get<double>(), w = a[1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(w) || x < 0.0)
            throw ConfigError(std::string(what) + ": positions must be finite and nonnegative");
        atoms.push_back({x, w});
    }
    return atoms;
}

double horizon_of(const json& config) { return positive(config.at("time"), "t"); }

std::size_t steps_of(const json& config) { return count(config.at("time"), "steps", 1); }

void validate_common(const json& config) {
    count(config, "replicas", 0);
    count(config, "parallelism", 1);
    if (!config.at("output").at("dir").is_string())
        throw ConfigError("'output.dir' must be a string");
    const GridSpec g = grid_spec(config);
    if (!(g.epsilon < g.upper()))
        throw ConfigError("grid: epsilon must lie below the upper end");
    parse_panel(panel_specs(config));
    points_of(config);
}

void require_finite(const SampleMatrix& samples, const std::string& section) {
    for (std::size_t r = 0; r < samples.replicas; ++r)
        for (std::size_t k = 0; k < samples.functions; ++k)
            if (!std::isfinite(samples(r, k)))
                throw DivergenceError(section + ": replica " + std::to_string(r) + ", function " +
                                      std::to_string(k) + " is not finite");
}

json report_json(const ComparisonReport& rep) {
    json cells = json::array();
    for (const CellGap& c : rep.cells)
        cells.push_back({{"function", c.function},
                         {"multiplier", c.multiplier},
                         {"estimate", {c.estimate.real(), c.estimate.imag()}},
                         {"expected", {c.expected.real(), c.expected.imag()}},
                         {"gap", c.gap},
                         {"stat_tol", c.stat_tol},
                         {"disc_tol", c.disc_tol},
                         {"pass", c.ok()}});
    return {{"pass", rep.pass},
            {"max_abs_gap", rep.max_abs_gap},
            {"worst_ratio", rep.worst_ratio()},
            {"bonferroni", rep.bonferroni_note()},
            {"cells", cells}};
}

json emp_json(const EmpiricalCF& emp) {
    return {{"replicas", emp.replicas}, {"panel", emp.panel}, {"points", emp.points}};
}

void append_samples(Rows& rows, const std::string& section, const SampleMatrix& samples,
                    std::uint64_t seed, double t) {
    const std::string prefix = section + ",";
    const std::string suffix = "," + std::to_string(seed) + "," + format_double(t) + ",";
    for (std::size_t r = 0; r < samples.replicas; ++r)
        for (std::size_t k = 0; k < samples.functions; ++k)
            rows.add(prefix + std::to_string(r) + suffix + std::to_string(k) + "," +
                     format_double(samples(r, k)));
}

Section mean_section(const std::string& name, const SampleMatrix& samples,
                     const std::vector<std::string>& panel) {
    Section s{name, true, json::object()};
    json fns = json::array();
    const auto n = static_cast<double>(samples.replicas);
    for (std::size_t k = 0; k < samples.functions; ++k) {
        double mean = 0.0, ss = 0.0;
        for (std::size_t r = 0; r < samples.replicas; ++r)
            mean += samples(r, k);
        mean /= n;
        for (std::size_t r = 0; r < samples.replicas; ++r)
            ss += (samples(r, k) - mean) * (samples(r, k) - mean);
        const double se = std::sqrt(ss / (n - 1.0) / n);
        const bool ok = std::abs(mean) <= sigma_multiplier * se;
        s.pass = s.pass && ok;
        fns.push_back({{"function", panel[k]}, {"mean", mean}, {"se", se}, {"pass", ok}});
    }
    s.detail["functions"] = fns;
    return s;
}

Section cf_section(const std::string& name, const EmpiricalCF& emp, const ComparisonReport& rep) {
    Section s{name, rep.pass, report_json(rep)};
    s.detail["empirical"] = emp_json(emp);
    return s;
}

}  // namespace detail
}  // namespace mehler
