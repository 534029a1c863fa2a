#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mehler {

/// 20-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    static constexpr std::size_t order = 20;
    std::array<double, order> x;
    std::array<double, order> w;
};

const GaussRule& gauss_rule();

/// Composite Gauss-Legendre over [a, b] with equal panels.
template <class F>
auto integrate_panels(F&& f, double a, double b, std::size_t panels) -> decltype(f(a)) {
    using R = decltype(f(a));
    R total{};
    if (!(b > a) || panels == 0)
        return total;
    const GaussRule& g = gauss_rule();
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * static_cast<double>(p);
        const double mid = lo + 0.5 * width;
        R part{};
        for (std::size_t q = 0; q < GaussRule::order; ++q)
            part += g.w[q] * f(mid + 0.5 * width * g.x[q]);
        total += 0.5 * width * part;
    }
    return total;
}

/// Composite Gauss-Legendre with panels no wider than max_width.
template <class F>
auto integrate_width(F&& f, double a, double b, double max_width) -> decltype(f(a)) {
    if (!(b > a))
        return decltype(f(a)){};
    const auto panels = static_cast<std::size_t>(std::ceil((b - a) / max_width - 1e-12));
    return integrate_panels(f, a, b, panels == 0 ? 1 : panels);
}

enum class Substitution { sqrt, uniform };

/// Rule for integrals over [0, t]. The sqrt substitution s = u^2 absorbs
/// 1/sqrt(s) endpoint behaviour.
struct TimeQuadrature {
    double t = 0.0;
    Substitution substitution = Substitution::sqrt;
    std::size_t panels = 8;

    void validate() const;
    TimeQuadrature refined() const;

    struct Node {
        double s;
        double weight;
    };
    std::vector<Node> nodes() const;

    template <class F>
    auto integrate(F&& f) const -> decltype(f(0.0)) {
        decltype(f(0.0)) total{};
        for (const Node& n : nodes())
            total += n.weight * f(n.s);
        return total;
    }
};

}  // namespace mehler
