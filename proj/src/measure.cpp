#include "mehler/measure.hpp"

#include "mehler/error.hpp"

#include <algorithm>
#include <cmath>

namespace mehler {

SignedAtomicMeasure::SignedAtomicMeasure(std::vector<Atom> atoms,
                                         std::optional<GridFunction> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
    for (const Atom& a : atoms_)
        if (!(a.x >= 0.0) || !std::isfinite(a.x) || !std::isfinite(a.w))
            throw DomainError("SignedAtomicMeasure: atoms need finite x >= 0 and finite weight");
}

bool SignedAtomicMeasure::is_zero() const noexcept {
    const bool atoms_zero =
        std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.w == 0.0; });
    if (!density_)
        return atoms_zero;
    return atoms_zero && density_->sup_norm() == 0.0;
}

bool SignedAtomicMeasure::nonnegative() const noexcept {
    const bool atoms_ok =
        std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.w >= 0.0; });
    if (!density_)
        return atoms_ok;
    const auto v = density_->values();
    return atoms_ok && std::all_of(v.begin(), v.end(), [](double d) { return d >= 0.0; });
}

namespace {

double pair_density(const GridFunction& d, const GridFunction& f) {
    const SpatialGrid& g = d.grid();
    if (f.size() != d.size())
        throw std::invalid_argument("SignedAtomicMeasure: density and test function grids differ");
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        s += g.weight(i) * d[i] * f[i];
    return s;
}

SignedAtomicMeasure part(const SignedAtomicMeasure& m, double sign) {
    std::vector<Atom> atoms;
    for (const Atom& a : m.atoms())
        if (sign * a.w > 0.0)
            atoms.push_back({a.x, sign * a.w});
    std::optional<GridFunction> density;
    if (m.density()) {
        std::vector<double> v(m.density()->values().begin(), m.density()->values().end());
        for (double& x : v)
            x = std::max(sign * x, 0.0);
        density.emplace(m.density()->grid_ptr(), std::move(v));
    }
    return SignedAtomicMeasure(std::move(atoms), std::move(density));
}

}  // namespace

double SignedAtomicMeasure::integrate(const GridFunction& f) const {
    double s = 0.0;
    for (const Atom& a : atoms_)
        if (a.x > 0.0)
            s += a.w * f.at(a.x);
    if (density_)
        s += pair_density(*density_, f);
    return s;
}

double SignedAtomicMeasure::integrate(const BoundaryGridFunction& f) const {
    double s = 0.0;
    for (const Atom& a : atoms_)
        s += a.w * (a.x == 0.0 ? f.at_zero : f.interior.at(a.x));
    if (density_)
        s += pair_density(*density_, f.interior);
    return s;
}

SignedAtomicMeasure SignedAtomicMeasure::positive_part() const { return part(*this, 1.0); }
SignedAtomicMeasure SignedAtomicMeasure::negative_part() const { return part(*this, -1.0); }

CatalystMeasure::CatalystMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_)
        if (!(a.x > 0.0) || !std::isfinite(a.x) || !(a.w > 0.0) || !std::isfinite(a.w))
            throw DomainError("CatalystMeasure: sites must lie in D and masses be positive");
}

double CatalystMeasure::total_mass() const noexcept {
    double m = 0.0;
    for (const Atom& a : atoms_)
        m += a.w;
    return m;
}

void CatalystMeasure::require_inside(const SpatialGrid& grid) const {
    for (const Atom& a : atoms_)
        if (!(a.x > grid.lower()) || !(a.x < grid.upper()))
            throw PreconditionError("catalyst site outside the truncated domain");
}

}  // namespace mehler
