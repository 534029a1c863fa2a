#pragma once

#include "mehler/grid.hpp"

namespace mehler {

/// Target accuracy of every spatial kernel functional.
inline constexpr double tol_quad = 1e-6;

/// Centered Gaussian density with variance t.
double gaussian_density(double t, double x);

/// Transition density of Brownian motion killed at 0.
double abm_density(double t, double x, double y);

/// Boundary entrance density y g_t(y) / t.
double entrance_kernel(double t, double y);

/// Integral of entrance_kernel(s, y) over s in [0, horizon].
double entrance_mass_until(double horizon, double y);
/// Integral of entrance_kernel(s, y) over s > horizon.
double entrance_mass_beyond(double horizon, double y);

/// Occupation density: integral of abm_density(r, x, y) over r in [0, t].
double occupation_kernel(double t, double x, double y);

enum class KernelKind {
    absorbing,  ///< killed at 0
    free        ///< plain heat kernel restricted to D; only for negative controls
};

/// P_t f(x) by Gauss-Legendre panels over the kernel's effective support.
double semigroup_at(double t, const GridFunction& f, double x,
                    KernelKind kind = KernelKind::absorbing);

/// P_t f on every node. P_0 is the identity.
GridFunction apply_semigroup(double t, const GridFunction& f,
                             KernelKind kind = KernelKind::absorbing);

/// kappa_t(f): integral of entrance_kernel(t, y) f(y).
double entrance_functional(double t, const GridFunction& f);

/// Integral over r in [0, t] of P_r f(x), from the closed-form occupation kernel.
double occupation_functional(double t, const GridFunction& f, double x);

/// Integral over r in [0, t] of kappa_r(f), i.e. the erfc-weighted integral of f.
double entrance_occupation_functional(double t, const GridFunction& f);

/// Lebesgue integral of f over the truncated domain.
double lebesgue_integral(const GridFunction& f);

/// The excessive function 1 - exp(-x).
double excessive_h(double x);

/// h-transformed semigroup on [0, inf). Interior nodes get h^{-1} P_t(h f),
/// the boundary point gets 2 kappa_t(h f).
BoundaryGridFunction h_transform_semigroup(double t, const BoundaryGridFunction& f);

/// Value of the h-transformed semigroup at a single point x >= 0.
double h_transform_at(double t, const BoundaryGridFunction& f, double x);

}  // namespace mehler
