#pragma once

#include "mehler/grid.hpp"

#include <optional>
#include <vector>

namespace mehler {

struct Atom {
    double x;
    double w;
};

/// Finite signed measure on [0, inf): point masses plus an optional density
/// on a grid. The density pairs with grid functions by the grid's trapezoid
/// weights.
class SignedAtomicMeasure {
public:
    SignedAtomicMeasure() = default;
    explicit SignedAtomicMeasure(std::vector<Atom> atoms,
                                 std::optional<GridFunction> density = std::nullopt);

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    const std::optional<GridFunction>& density() const noexcept { return density_; }

    bool is_zero() const noexcept;
    bool nonnegative() const noexcept;

    /// mu(f) for f on D; atoms at 0 contribute nothing.
    double integrate(const GridFunction& f) const;
    /// mu(f) for f on [0, inf).
    double integrate(const BoundaryGridFunction& f) const;

    /// Jordan decomposition, both parts returned as nonnegative measures.
    SignedAtomicMeasure positive_part() const;
    SignedAtomicMeasure negative_part() const;

private:
    std::vector<Atom> atoms_;
    std::optional<GridFunction> density_;
};

/// Finite atomic catalyst with positive masses on D.
class CatalystMeasure {
public:
    CatalystMeasure() = default;
    explicit CatalystMeasure(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }
    double total_mass() const noexcept;

    /// Throws PreconditionError unless every site lies strictly inside the grid.
    void require_inside(const SpatialGrid& grid) const;

private:
    std::vector<Atom> atoms_;
};

}  // namespace mehler
