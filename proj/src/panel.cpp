#include "mehler/panel.hpp"

#include "mehler/error.hpp"
#include "mehler/kernels.hpp"

#include <charconv>
#include <cmath>

namespace mehler {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double number(const std::string& text, const std::string& spec) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw ConfigError("test function '" + spec + "': bad number '" + text + "'");
    return v;
}

}  // namespace

TestFunction parse_test_function(const std::string& spec) {
    const auto parts = split(spec, ':');
    const std::string& kind = parts.front();
    auto arity = [&](std::size_t n) {
        if (parts.size() != n + 1)
            throw ConfigError("test function '" + spec + "': expected " + std::to_string(n) +
                              " parameters");
    };
    auto arg = [&](std::size_t i) { return number(parts[i], spec); };
    auto positive = [&](double v) {
        if (!(v > 0.0))
            throw ConfigError("test function '" + spec + "': width and rate must be positive");
        return v;
    };

    if (kind == "xbump" || kind == "hbump" || kind == "bump") {
        arity(2);
        const double c = arg(1);
        const double s = positive(arg(2));
        auto gauss = [c, s](double x) { return std::exp(-(x - c) * (x - c) / (2.0 * s * s)); };
        if (kind == "xbump")
            return {spec, [gauss](double x) { return x * gauss(x); }};
        if (kind == "hbump")
            return {spec, [gauss](double x) { return excessive_h(x) * gauss(x); }};
        return {spec, gauss};
    }
    if (kind == "hexp" || kind == "xexp") {
        arity(1);
        const double a = positive(arg(1));
        if (kind == "hexp")
            return {spec, [a](double x) { return excessive_h(x) * std::exp(-a * x); }};
        return {spec, [a](double x) { return x * std::exp(-a * x); }};
    }
    if (kind == "hsin") {
        arity(3);
        const double w = arg(1);
        const double c = arg(2);
        const double s = positive(arg(3));
        return {spec, [w, c, s](double x) {
                    return excessive_h(x) * std::sin(w * x) *
                           std::exp(-(x - c) * (x - c) / (2.0 * s * s));
                }};
    }
    if (kind == "one") {
        arity(0);
        return {spec, [](double) { return 1.0; }, 1.0};
    }
    if (kind == "origin") {
        arity(0);
        return {spec, [](double) { return 0.0; }, 1.0};
    }
    throw ConfigError("unknown test function '" + spec + "'");
}

std::vector<std::string> default_panel_specs() {
    return {"xbump:1:0.5",  "xbump:2.5:0.4", "hexp:2",      "hexp:3",
            "xexp:2",       "hsin:2:1.5:1",  "hbump:3:0.5", "xbump:4:0.6"};
}

std::vector<TestFunction> parse_panel(const std::vector<std::string>& specs) {
    if (specs.empty())
        throw ConfigError("panel must contain at least one test function");
    std::vector<TestFunction> out;
    out.reserve(specs.size());
    for (const auto& s : specs)
        out.push_back(parse_test_function(s));
    return out;
}

std::vector<GridFunction> sample_panel(const std::shared_ptr<const SpatialGrid>& grid,
                                       const std::vector<TestFunction>& panel) {
    std::vector<GridFunction> out;
    out.reserve(panel.size());
    for (const auto& f : panel)
        out.push_back(GridFunction::sample(grid, f.eval));
    return out;
}

std::vector<BoundaryGridFunction> sample_boundary_panel(
    const std::shared_ptr<const SpatialGrid>& grid, const std::vector<TestFunction>& panel) {
    std::vector<BoundaryGridFunction> out;
    out.reserve(panel.size());
    for (const auto& f : panel)
        out.push_back({f.at_zero, GridFunction::sample(grid, f.eval)});
    return out;
}

}  // namespace mehler
