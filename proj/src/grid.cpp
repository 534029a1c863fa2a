#include "mehler/grid.hpp"

#include "mehler/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mehler {

namespace {

constexpr std::size_t stencil = 10;

// Barycentric weights for equispaced nodes: (-1)^j C(9, j).
constexpr std::array<double, stencil> bary = {1, -9, 36, -84, 126, -126, 84, -36, 9, -1};

}  // namespace

SpatialGrid::SpatialGrid(double lower, double upper, std::size_t n)
    : lower_(lower), upper_(upper), step_(0.0) {
    if (!(lower > 0.0) || !(upper > lower) || !std::isfinite(upper))
        throw DomainError("SpatialGrid: need 0 < lower < upper < inf");
    if (n < stencil)
        throw DomainError("SpatialGrid: need at least 10 nodes");
    step_ = (upper - lower) / static_cast<double>(n - 1);
    nodes_.resize(n);
    weights_.assign(n, step_);
    for (std::size_t i = 0; i < n; ++i)
        nodes_[i] = lower + step_ * static_cast<double>(i);
    nodes_.back() = upper;
    weights_.front() = weights_.back() = 0.5 * step_;
}

double GridSpec::upper() const { return 10.0 * std::sqrt(horizon) + support; }

std::shared_ptr<const SpatialGrid> make_grid(const GridSpec& spec) {
    if (!(spec.horizon > 0.0) || !(spec.support > 0.0))
        throw DomainError("GridSpec: horizon and support must be positive");
    return std::make_shared<const SpatialGrid>(spec.epsilon, spec.upper(), spec.nodes);
}

GridFunction::GridFunction(std::shared_ptr<const SpatialGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_)
        throw std::invalid_argument("GridFunction: null grid");
    if (values_.size() != grid_->size())
        throw std::invalid_argument("GridFunction: value count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v))
            throw DomainError("GridFunction: non-finite value");
}

GridFunction GridFunction::zero(std::shared_ptr<const SpatialGrid> grid) {
    const auto n = grid->size();
    return GridFunction(std::move(grid), std::vector<double>(n, 0.0));
}

GridFunction GridFunction::sample(std::shared_ptr<const SpatialGrid> grid,
                                  const std::function<double(double)>& fn) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = fn(grid->node(i));
    return GridFunction(std::move(grid), std::move(v));
}

double GridFunction::at(double x) const {
    const SpatialGrid& g = *grid_;
    if (x > g.upper())
        return 0.0;
    const double pos = (x - g.lower()) / g.step();
    const auto n = static_cast<std::ptrdiff_t>(g.size());
    auto first = static_cast<std::ptrdiff_t>(std::floor(pos)) - 4;
    first = std::clamp<std::ptrdiff_t>(first, 0, n - static_cast<std::ptrdiff_t>(stencil));
    const double s = pos - static_cast<double>(first);

    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < stencil; ++j) {
        const double d = s - static_cast<double>(j);
        const double v = values_[static_cast<std::size_t>(first) + j];
        if (d == 0.0)
            return v;
        const double c = bary[j] / d;
        num += c * v;
        den += c;
    }
    return num / den;
}

GridFunction GridFunction::scaled(double factor) const {
    std::vector<double> v(values_);
    for (double& x : v)
        x *= factor;
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::times(const std::function<double(double)>& fn) const {
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] *= fn(grid_->node(i));
    return GridFunction(grid_, std::move(v));
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

namespace {

template <class Op>
GridFunction combine(const GridFunction& a, const GridFunction& b, Op op) {
    const SpatialGrid& ga = a.grid();
    const SpatialGrid& gb = b.grid();
    if (&ga != &gb && (ga.size() != gb.size() || ga.lower() != gb.lower() || ga.upper() != gb.upper()))
        throw std::invalid_argument("GridFunction: mismatched grids");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = op(a[i], b[i]);
    return GridFunction(a.grid_ptr(), std::move(v));
}

}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    return combine(a, b, [](double x, double y) { return x + y; });
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    return combine(a, b, [](double x, double y) { return x - y; });
}

}  // namespace mehler
