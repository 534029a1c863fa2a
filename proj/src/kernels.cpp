#include "mehler/kernels.hpp"

#include "mehler/error.hpp"
#include "mehler/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mehler {

namespace {

// Half-width of the integration window in units of sqrt(t).
constexpr double window_sigmas = 10.0;
constexpr double max_panel = 0.5;

double panel_width(double t) { return std::min(std::sqrt(t), max_panel); }

void require_positive_time(double t, const char* who) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError(std::string(who) + ": time must be positive and finite");
}

// Integral over a in [0, t] of g_r(a) dr.
double occupation_profile(double t, double a) {
    const double aa = std::abs(a);
    return std::sqrt(2.0 * t / std::numbers::pi) * std::exp(-aa * aa / (2.0 * t)) -
           aa * std::erfc(aa / std::sqrt(2.0 * t));
}

}  // namespace

double gaussian_density(double t, double x) {
    require_positive_time(t, "gaussian_density");
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

double abm_density(double t, double x, double y) {
    require_positive_time(t, "abm_density");
    if (!(x > 0.0) || !(y > 0.0))
        throw DomainError("abm_density: x and y must be positive");
    // g(x-y) - g(x+y) = g(x-y) (1 - exp(-2xy/t)), without cancellation near 0.
    return gaussian_density(t, x - y) * -std::expm1(-2.0 * x * y / t);
}

double entrance_kernel(double t, double y) {
    require_positive_time(t, "entrance_kernel");
    if (!(y > 0.0))
        throw DomainError("entrance_kernel: y must be positive");
    return y * gaussian_density(t, y) / t;
}

double entrance_mass_until(double horizon, double y) {
    require_positive_time(horizon, "entrance_mass_until");
    return std::erfc(y / std::sqrt(2.0 * horizon));
}

double entrance_mass_beyond(double horizon, double y) {
    require_positive_time(horizon, "entrance_mass_beyond");
    return std::erf(y / std::sqrt(2.0 * horizon));
}

double occupation_kernel(double t, double x, double y) {
    require_positive_time(t, "occupation_kernel");
    if (!(x > 0.0) || !(y > 0.0))
        throw DomainError("occupation_kernel: x and y must be positive");
    return occupation_profile(t, x - y) - occupation_profile(t, x + y);
}

double semigroup_at(double t, const GridFunction& f, double x, KernelKind kind) {
    if (t == 0.0)
        return f.at(x);
    require_positive_time(t, "semigroup_at");
    const SpatialGrid& g = f.grid();
    const double reach = window_sigmas * std::sqrt(t);
    const double a = std::max(g.lower(), x - reach);
    const double b = std::min(g.upper(), x + reach);
    if (!(b > a))
        return 0.0;
    const double inv_norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
    if (kind == KernelKind::free) {
        return integrate_width(
            [&](double y) {
                const double d = x - y;
                return inv_norm * std::exp(-d * d / (2.0 * t)) * f.at(y);
            },
            a, b, panel_width(t));
    }
    if (!(x > 0.0))
        return 0.0;
    return integrate_width(
        [&](double y) {
            const double d = x - y;
            return inv_norm * std::exp(-d * d / (2.0 * t)) * -std::expm1(-2.0 * x * y / t) *
                   f.at(y);
        },
        a, b, panel_width(t));
}

GridFunction apply_semigroup(double t, const GridFunction& f, KernelKind kind) {
    if (t == 0.0)
        return f;
    require_positive_time(t, "apply_semigroup");
    const SpatialGrid& g = f.grid();
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = semigroup_at(t, f, g.node(i), kind);
    return GridFunction(f.grid_ptr(), std::move(v));
}

double entrance_functional(double t, const GridFunction& f) {
    require_positive_time(t, "entrance_functional");
    const SpatialGrid& g = f.grid();
    const double b = std::min(g.upper(), (window_sigmas + 2.0) * std::sqrt(t));
    if (!(b > g.lower()))
        return 0.0;
    const double scale = 1.0 / (t * std::sqrt(2.0 * std::numbers::pi * t));
    return integrate_width(
        [&](double y) { return scale * y * std::exp(-y * y / (2.0 * t)) * f.at(y); },
        g.lower(), b, panel_width(t));
}

double occupation_functional(double t, const GridFunction& f, double x) {
    if (t == 0.0)
        return 0.0;
    require_positive_time(t, "occupation_functional");
    const SpatialGrid& g = f.grid();
    const double reach = (window_sigmas + 2.0) * std::sqrt(t);
    const double a = std::max(g.lower(), x - reach);
    const double b = std::min(g.upper(), x + reach);
    if (!(b > a) || !(x > 0.0))
        return 0.0;
    auto integrand = [&](double y) {
        return (occupation_profile(t, x - y) - occupation_profile(t, x + y)) * f.at(y);
    };
    // The profile has a kink at y = x; split the range there.
    const double mid = std::clamp(x, a, b);
    return integrate_width(integrand, a, mid, panel_width(t)) +
           integrate_width(integrand, mid, b, panel_width(t));
}

double entrance_occupation_functional(double t, const GridFunction& f) {
    if (t == 0.0)
        return 0.0;
    require_positive_time(t, "entrance_occupation_functional");
    const SpatialGrid& g = f.grid();
    const double b = std::min(g.upper(), (window_sigmas + 2.0) * std::sqrt(t));
    if (!(b > g.lower()))
        return 0.0;
    const double root = std::sqrt(2.0 * t);
    return integrate_width([&](double y) { return std::erfc(y / root) * f.at(y); }, g.lower(),
                           b, panel_width(t));
}

double lebesgue_integral(const GridFunction& f) {
    const SpatialGrid& g = f.grid();
    return integrate_width([&](double y) { return f.at(y); }, g.lower(), g.upper(), max_panel);
}

double excessive_h(double x) { return -std::expm1(-x); }

double h_transform_at(double t, const BoundaryGridFunction& f, double x) {
    require_positive_time(t, "h_transform_at");
    const GridFunction hf = f.interior.times(excessive_h);
    if (x == 0.0)
        return 2.0 * entrance_functional(t, hf);
    if (!(x > 0.0))
        throw DomainError("h_transform_at: x must be non-negative");
    return semigroup_at(t, hf, x) / excessive_h(x);
}

BoundaryGridFunction h_transform_semigroup(double t, const BoundaryGridFunction& f) {
    require_positive_time(t, "h_transform_semigroup");
    const GridFunction hf = f.interior.times(excessive_h);
    const GridFunction moved = apply_semigroup(t, hf);
    std::vector<double> v(moved.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = moved[i] / excessive_h(moved.grid().node(i));
    return {2.0 * entrance_functional(t, hf), GridFunction(f.interior.grid_ptr(), std::move(v))};
}

}  // namespace mehler
