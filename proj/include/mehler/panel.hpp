#pragma once

#include "mehler/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mehler {

/// A named test function on [0, inf).
struct TestFunction {
    std::string name;
    std::function<double(double)> eval;
    /// Value assigned to the boundary point when used on [0, inf).
    double at_zero = 0.0;
};

/// Builds a test function from a spec string.
///
/// Recognised forms (parameters separated by ':'):
///   xbump:c:s   x exp(-(x-c)^2 / 2s^2)
///   hbump:c:s   h(x) exp(-(x-c)^2 / 2s^2)
///   bump:c:s    exp(-(x-c)^2 / 2s^2)
///   hexp:a      h(x) exp(-a x)
///   xexp:a      x exp(-a x)
///   hsin:w:c:s  h(x) sin(w x) exp(-(x-c)^2 / 2s^2)
///   one         1 on [0, inf)
///   origin      indicator of {0}
/// where h(x) = 1 - exp(-x). Throws ConfigError on anything else.
TestFunction parse_test_function(const std::string& spec);

/// The eight-function default panel: bumps, damped exponentials and
/// h-weighted products, all vanishing at 0.
std::vector<std::string> default_panel_specs();

std::vector<TestFunction> parse_panel(const std::vector<std::string>& specs);

std::vector<GridFunction> sample_panel(const std::shared_ptr<const SpatialGrid>& grid,
                                       const std::vector<TestFunction>& panel);

std::vector<BoundaryGridFunction> sample_boundary_panel(
    const std::shared_ptr<const SpatialGrid>& grid, const std::vector<TestFunction>& panel);

}  // namespace mehler
