#pragma once

#include "mehler/grid.hpp"
#include "mehler/kernels.hpp"
#include "mehler/measure.hpp"
#include "mehler/quadrature.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace mehler {

using cplx = std::complex<double>;

struct LevyAtom {
    double jump;
    double mass;
};

/// Levy measure with finitely many atoms. A mass of +inf is accepted and
/// marks an infinite-activity measure so the moment flags can gate it.
class AtomicLevyMeasure {
public:
    AtomicLevyMeasure() = default;
    explicit AtomicLevyMeasure(std::vector<LevyAtom> atoms);

    const std::vector<LevyAtom>& atoms() const noexcept { return atoms_; }
    bool empty() const noexcept { return atoms_.empty(); }

    double total_mass() const noexcept { return mass_; }
    /// sum of mass * u
    double mean_jump_rate() const noexcept { return drift_; }

    bool finite_activity() const noexcept { return std::isfinite(mass_); }
    bool first_moment_finite() const noexcept { return std::isfinite(first_); }
    bool second_moment_finite() const noexcept { return std::isfinite(second_); }
    /// (1 v |u|) m(du) finite
    bool bounded_weighted() const noexcept { return finite_activity() && first_moment_finite(); }
    bool positive_support() const noexcept;

    AtomicLevyMeasure scaled(double factor) const;

private:
    std::vector<LevyAtom> atoms_;
    double mass_ = 0.0;
    double drift_ = 0.0;
    double first_ = 0.0;
    double second_ = 0.0;
};

/// Branching data at one site: Gaussian coefficient c and jump measure.
struct LocalMechanism {
    double c = 0.0;
    AtomicLevyMeasure jumps;
};

/// Site-dependent mechanism: c as a grid function and one jump measure per
/// catalyst atom (a single shared measure when only one is given).
struct BranchingMechanism {
    GridFunction c;
    std::vector<AtomicLevyMeasure> jumps;

    LocalMechanism at_site(std::size_t atom, double x) const;
};

/// e^{iy} - 1 - iy, accurate for small y.
cplx compensated_exponential(double y);

/// Fourier-form exponent -c z^2 + sum mass (e^{iuz} - 1 - iuz).
cplx levy_exponent(const LocalMechanism& mech, double z);
cplx levy_exponent(const LocalMechanism& mech, cplx z);

/// Laplace-form mechanism c z^2 + sum mass (e^{-zu} - 1 + zu) for z >= 0.
double branching_mechanism_real(const LocalMechanism& mech, double z);
double branching_mechanism_real(const BranchingMechanism& mech, std::size_t atom, double x,
                                double z);

/// Infinitely divisible law on a finite coordinate panel.
struct LevyTriplet {
    struct Jump {
        Eigen::VectorXd x;
        double mass;
    };
    Eigen::VectorXd b;
    Eigen::MatrixXd R;
    std::vector<Jump> jumps;

    void validate() const;
};

/// i<b,a> - <Ra,a>/2 + sum mass (e^{i<x,a>} - 1 - i<x,a> 1{|x| <= 1}).
cplx triplet_log_cf(const LevyTriplet& tr, const Eigen::VectorXd& a);

/// Triplet of T X_r + X_t for independent X_r ~ tr_r and X_t ~ tr_t.
LevyTriplet transport_convolve(const LevyTriplet& tr_r, const Eigen::MatrixXd& transport,
                               const LevyTriplet& tr_t);

/// Log characteristic functional s -> log nu_s(f) of an entrance law.
class EntranceLawCF {
public:
    using Fn = std::function<cplx(double, const GridFunction&)>;

    /// sum_i eta_i phi_i(P_s f(x_i)), the catalytic family.
    static EntranceLawCF catalytic(BranchingMechanism mech, CatalystMeasure eta);
    /// phi(kappa_s f), the boundary family.
    static EntranceLawCF boundary(LocalMechanism mech);

    cplx log_cf(double s, const GridFunction& f) const { return fn_(s, f); }

private:
    explicit EntranceLawCF(Fn fn) : fn_(std::move(fn)) {}
    Fn fn_;
};

/// Relative tolerance of the panel-doubling check in sc_from_entrance_law.
inline constexpr double time_quadrature_tol = 1e-9;

/// log mu_t(f) = integral over [0, t] of log nu_s(f). Throws QuadratureError
/// when doubling the panel count moves the result by more than the tolerance.
cplx sc_from_entrance_law(const EntranceLawCF& el, double t, const GridFunction& f,
                          const TimeQuadrature& tq);

/// -c times the integral over [0, t] of (P_s f(x0))^2, by uniform panels in s.
cplx cf_gaussian_example(double c, double x0, double t, const GridFunction& f);

/// Integral over [0, t] of phi(kappa_s f) with c = 0.
cplx cf_jump_example(const AtomicLevyMeasure& m, double t, const GridFunction& f);

/// i mu(P_t f) + integral over [0, t] of sum_i eta_i phi_i(P_s f(x_i)).
cplx limit_ou_log_cf(const BranchingMechanism& mech, const CatalystMeasure& eta,
                     const SignedAtomicMeasure& mu, double t, const GridFunction& f);

/// i mu(P_t f) + integral over [0, t] of phi(kappa_s f).
cplx entrance_ou_log_cf(const LocalMechanism& mech, const SignedAtomicMeasure& mu, double t,
                        const GridFunction& f);

/// i mu(T_t f) + integral over [0, t] of phi(kappa_s(h f)) for f on [0, inf).
cplx h_transform_log_cf(const LocalMechanism& mech, const SignedAtomicMeasure& mu, double t,
                        const BoundaryGridFunction& f);

using LogCF = std::function<cplx(double, const GridFunction&)>;

/// |L(r+t, f) - L(r, P_t f) - L(t, f)|. The shift uses the given kernel so a
/// mismatched kernel can serve as a negative control.
double sc_residual(const LogCF& logcf, double r, double t, const GridFunction& f,
                   KernelKind shift = KernelKind::absorbing);

}  // namespace mehler
