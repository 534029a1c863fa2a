#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace mehler {

/// Uniform nodes on the truncated half line [lower, upper] with composite
/// trapezoid weights.
class SpatialGrid {
public:
    SpatialGrid(double lower, double upper, std::size_t n);

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

private:
    double lower_;
    double upper_;
    double step_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Truncation parameters. The upper end is 10 sqrt(horizon) + support so
/// Gaussian tails started inside the support are negligible at the cut.
struct GridSpec {
    double epsilon = 1e-4;
    double horizon = 2.0;
    double support = 8.0;
    std::size_t nodes = 512;

    double upper() const;
};

std::shared_ptr<const SpatialGrid> make_grid(const GridSpec& spec);

/// Point values of a real function on a SpatialGrid.
///
/// Off-node evaluation uses a 10-point Lagrange stencil. Beyond the upper
/// truncation the function is taken to be zero.
class GridFunction {
public:
    GridFunction(std::shared_ptr<const SpatialGrid> grid, std::vector<double> values);

    static GridFunction zero(std::shared_ptr<const SpatialGrid> grid);
    static GridFunction sample(std::shared_ptr<const SpatialGrid> grid,
                               const std::function<double(double)>& fn);

    const SpatialGrid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const SpatialGrid>& grid_ptr() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double at(double x) const;

    GridFunction scaled(double factor) const;
    /// Pointwise product with fn evaluated at the nodes.
    GridFunction times(const std::function<double(double)>& fn) const;
    double sup_norm() const;

    friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
    friend GridFunction operator-(const GridFunction& a, const GridFunction& b);

private:
    std::shared_ptr<const SpatialGrid> grid_;
    std::vector<double> values_;
};

/// Function on [0, inf): a value at the boundary point plus interior nodes.
struct BoundaryGridFunction {
    double at_zero = 0.0;
    GridFunction interior;
};

}  // namespace mehler
