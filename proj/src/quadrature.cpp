#include "mehler/quadrature.hpp"

#include "mehler/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace mehler {

const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        using table = boost::math::quadrature::gauss<double, GaussRule::order>;
        const auto& xs = table::abscissa();
        const auto& ws = table::weights();
        // Boost stores the non-negative half of a symmetric even-order rule.
        GaussRule r{};
        const std::size_t half = GaussRule::order / 2;
        for (std::size_t i = 0; i < half; ++i) {
            r.x[half - 1 - i] = -xs[i];
            r.w[half - 1 - i] = ws[i];
            r.x[half + i] = xs[i];
            r.w[half + i] = ws[i];
        }
        return r;
    }();
    return rule;
}

void TimeQuadrature::validate() const {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("TimeQuadrature: t must be finite and non-negative");
    if (panels < 8)
        throw DomainError("TimeQuadrature: at least 8 panels required");
}

TimeQuadrature TimeQuadrature::refined() const {
    TimeQuadrature r = *this;
    r.panels *= 2;
    return r;
}

std::vector<TimeQuadrature::Node> TimeQuadrature::nodes() const {
    validate();
    std::vector<Node> out;
    if (t == 0.0)
        return out;
    const GaussRule& g = gauss_rule();
    out.reserve(panels * GaussRule::order);
    const double span = substitution == Substitution::sqrt ? std::sqrt(t) : t;
    const double width = span / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = width * (static_cast<double>(p) + 0.5);
        for (std::size_t q = 0; q < GaussRule::order; ++q) {
            const double v = mid + 0.5 * width * g.x[q];
            const double w = 0.5 * width * g.w[q];
            if (substitution == Substitution::sqrt)
                out.push_back({v * v, 2.0 * v * w});
            else
                out.push_back({v, w});
        }
    }
    return out;
}

}  // namespace mehler
