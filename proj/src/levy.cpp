#include "mehler/levy.hpp"

#include "mehler/error.hpp"

#include <algorithm>
#include <cmath>

namespace mehler {

namespace {

constexpr std::size_t analytic_panels = 16;

// e^{-x} - 1 + x for x >= 0.
double laplace_compensated(double x) {
    if (x < 0.1) {
        double tail = 1.0;
        for (int k = 9; k >= 3; --k)
            tail = 1.0 - x / k * tail;
        return 0.5 * x * x * tail;
    }
    return std::expm1(-x) + x;
}

// i mu(P_t f), evaluating atoms exactly and any density on the grid.
double transported(const SignedAtomicMeasure& mu, double t, const GridFunction& f) {
    double s = 0.0;
    for (const Atom& a : mu.atoms())
        if (a.x > 0.0)
            s += a.w * semigroup_at(t, f, a.x);
    if (mu.density())
        s += SignedAtomicMeasure({}, mu.density()).integrate(apply_semigroup(t, f));
    return s;
}

TimeQuadrature analytic_rule(double t, Substitution sub) {
    return TimeQuadrature{t, sub, analytic_panels};
}

}  // namespace

AtomicLevyMeasure::AtomicLevyMeasure(std::vector<LevyAtom> atoms) : atoms_(std::move(atoms)) {
    for (const LevyAtom& a : atoms_) {
        if (a.jump == 0.0 || !std::isfinite(a.jump))
            throw DomainError("AtomicLevyMeasure: jumps must be finite and nonzero");
        if (!(a.mass > 0.0) || std::isnan(a.mass))
            throw DomainError("AtomicLevyMeasure: masses must be positive");
        mass_ += a.mass;
        drift_ += a.mass * a.jump;
        first_ += a.mass * std::abs(a.jump);
        second_ += a.mass * a.jump * a.jump;
    }
}

bool AtomicLevyMeasure::positive_support() const noexcept {
    return std::all_of(atoms_.begin(), atoms_.end(), [](const LevyAtom& a) { return a.jump > 0.0; });
}

AtomicLevyMeasure AtomicLevyMeasure::scaled(double factor) const {
    if (!(factor > 0.0))
        throw DomainError("AtomicLevyMeasure::scaled: factor must be positive");
    std::vector<LevyAtom> a = atoms_;
    for (auto& x : a)
        x.mass *= factor;
    return AtomicLevyMeasure(std::move(a));
}

LocalMechanism BranchingMechanism::at_site(std::size_t atom, double x) const {
    LocalMechanism m;
    m.c = c.at(x);
    if (m.c < 0.0)
        throw DomainError("BranchingMechanism: c must be nonnegative");
    if (jumps.size() == 1)
        m.jumps = jumps.front();
    else if (!jumps.empty())
        m.jumps = jumps.at(atom);
    return m;
}

cplx compensated_exponential(double y) {
    const double half = std::sin(0.5 * y);
    const double re = -2.0 * half * half;
    double im;
    if (std::abs(y) < 0.25) {
        const double y2 = y * y;
        double tail = 1.0;
        for (int k : {110, 72, 42, 20})
            tail = 1.0 - y2 / k * tail;
        im = -y * y2 / 6.0 * tail;
    } else {
        im = std::sin(y) - y;
    }
    return {re, im};
}

cplx levy_exponent(const LocalMechanism& mech, double z) {
    cplx v = -mech.c * z * z;
    for (const LevyAtom& a : mech.jumps.atoms())
        v += a.mass * compensated_exponential(a.jump * z);
    return v;
}

cplx levy_exponent(const LocalMechanism& mech, cplx z) {
    const cplx i(0.0, 1.0);
    cplx v = -mech.c * z * z;
    for (const LevyAtom& a : mech.jumps.atoms()) {
        const cplx w = i * a.jump * z;
        v += a.mass * (std::exp(w) - 1.0 - w);
    }
    return v;
}

double branching_mechanism_real(const LocalMechanism& mech, double z) {
    if (!(z >= 0.0))
        throw DomainError("branching_mechanism_real: z must be nonnegative");
    if (!mech.jumps.positive_support())
        throw DomainError("branching_mechanism_real: jump measure must live on (0, inf)");
    double v = mech.c * z * z;
    for (const LevyAtom& a : mech.jumps.atoms())
        v += a.mass * laplace_compensated(z * a.jump);
    return v;
}

double branching_mechanism_real(const BranchingMechanism& mech, std::size_t atom, double x,
                                double z) {
    return branching_mechanism_real(mech.at_site(atom, x), z);
}

void LevyTriplet::validate() const {
    const auto n = b.size();
    if (R.rows() != n || R.cols() != n)
        throw DomainError("LevyTriplet: covariance shape does not match drift");
    const double scale = std::max(1.0, R.cwiseAbs().maxCoeff());
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DomainError("LevyTriplet: covariance not symmetric");
    if (n > 0) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-12)
            throw DomainError("LevyTriplet: covariance not positive semidefinite");
    }
    for (const Jump& j : jumps)
        if (j.x.size() != n || !(j.mass > 0.0) || !std::isfinite(j.mass))
            throw DomainError("LevyTriplet: bad jump atom");
}

cplx triplet_log_cf(const LevyTriplet& tr, const Eigen::VectorXd& a) {
    const cplx i(0.0, 1.0);
    cplx v = i * tr.b.dot(a) - 0.5 * a.dot(tr.R * a);
    for (const auto& j : tr.jumps) {
        const double xa = j.x.dot(a);
        const cplx k = j.x.norm() <= 1.0 ? compensated_exponential(xa)
                                         : cplx(std::cos(xa) - 1.0, std::sin(xa));
        v += j.mass * k;
    }
    return v;
}

LevyTriplet transport_convolve(const LevyTriplet& tr_r, const Eigen::MatrixXd& transport,
                               const LevyTriplet& tr_t) {
    tr_r.validate();
    tr_t.validate();
    LevyTriplet out;
    out.R = transport * tr_r.R * transport.transpose() + tr_t.R;
    out.b = tr_t.b + transport * tr_r.b;
    auto chi = [](const Eigen::VectorXd& x) { return x.norm() <= 1.0 ? 1.0 : 0.0; };
    for (const auto& j : tr_r.jumps) {
        Eigen::VectorXd moved = transport * j.x;
        out.b += (chi(moved) - chi(j.x)) * j.mass * moved;
        out.jumps.push_back({std::move(moved), j.mass});
    }
    out.jumps.insert(out.jumps.end(), tr_t.jumps.begin(), tr_t.jumps.end());
    return out;
}

EntranceLawCF EntranceLawCF::catalytic(BranchingMechanism mech, CatalystMeasure eta) {
    std::vector<LocalMechanism> local;
    for (std::size_t i = 0; i < eta.size(); ++i)
        local.push_back(mech.at_site(i, eta.atoms()[i].x));
    return EntranceLawCF([local = std::move(local), eta = std::move(eta)](
                             double s, const GridFunction& f) {
        cplx v = 0.0;
        for (std::size_t i = 0; i < local.size(); ++i) {
            const Atom& a = eta.atoms()[i];
            v += a.w * levy_exponent(local[i], semigroup_at(s, f, a.x));
        }
        return v;
    });
}

EntranceLawCF EntranceLawCF::boundary(LocalMechanism mech) {
    return EntranceLawCF([mech = std::move(mech)](double s, const GridFunction& f) {
        return levy_exponent(mech, entrance_functional(s, f));
    });
}

cplx sc_from_entrance_law(const EntranceLawCF& el, double t, const GridFunction& f,
                          const TimeQuadrature& tq) {
    if (!(t >= 0.0))
        throw DomainError("sc_from_entrance_law: t must be nonnegative");
    if (t == 0.0)
        return 0.0;
    TimeQuadrature q = tq;
    q.t = t;
    auto integrand = [&](double s) { return el.log_cf(s, f); };
    const cplx coarse = q.integrate(integrand);
    const cplx fine = q.refined().integrate(integrand);
    if (std::abs(fine - coarse) > time_quadrature_tol * std::max(1.0, std::abs(fine)))
        throw QuadratureError("sc_from_entrance_law: time quadrature did not converge at t = " +
                              std::to_string(t));
    return fine;
}

cplx cf_gaussian_example(double c, double x0, double t, const GridFunction& f) {
    if (!(c > 0.0))
        throw DomainError("cf_gaussian_example: c must be positive");
    if (!(x0 > f.grid().lower()) || !(x0 < f.grid().upper()))
        throw DomainError("cf_gaussian_example: x0 outside the truncated domain");
    if (!(t >= 0.0))
        throw DomainError("cf_gaussian_example: t must be nonnegative");
    const double v = analytic_rule(t, Substitution::uniform).integrate([&](double s) {
        const double p = semigroup_at(s, f, x0);
        return p * p;
    });
    return -c * v;
}

cplx cf_jump_example(const AtomicLevyMeasure& m, double t, const GridFunction& f) {
    if (!m.bounded_weighted())
        throw PreconditionError("cf_jump_example: (1 v |u|) m(du) must be finite");
    if (!(t >= 0.0))
        throw DomainError("cf_jump_example: t must be nonnegative");
    const LocalMechanism mech{0.0, m};
    return analytic_rule(t, Substitution::sqrt).integrate([&](double s) {
        return levy_exponent(mech, entrance_functional(s, f));
    });
}

cplx limit_ou_log_cf(const BranchingMechanism& mech, const CatalystMeasure& eta,
                     const SignedAtomicMeasure& mu, double t, const GridFunction& f) {
    if (!(t >= 0.0))
        throw DomainError("limit_ou_log_cf: t must be nonnegative");
    std::vector<LocalMechanism> local;
    for (std::size_t i = 0; i < eta.size(); ++i)
        local.push_back(mech.at_site(i, eta.atoms()[i].x));
    const cplx noise = analytic_rule(t, Substitution::sqrt).integrate([&](double s) {
        cplx v = 0.0;
        for (std::size_t i = 0; i < local.size(); ++i) {
            const Atom& a = eta.atoms()[i];
            v += a.w * levy_exponent(local[i], semigroup_at(s, f, a.x));
        }
        return v;
    });
    const double drift = mu.is_zero() ? 0.0 : transported(mu, t, f);
    return cplx(0.0, drift) + noise;
}

cplx entrance_ou_log_cf(const LocalMechanism& mech, const SignedAtomicMeasure& mu, double t,
                        const GridFunction& f) {
    if (!(t >= 0.0))
        throw DomainError("entrance_ou_log_cf: t must be nonnegative");
    const cplx noise = analytic_rule(t, Substitution::sqrt).integrate([&](double s) {
        return levy_exponent(mech, entrance_functional(s, f));
    });
    const double drift = mu.is_zero() ? 0.0 : transported(mu, t, f);
    return cplx(0.0, drift) + noise;
}

cplx h_transform_log_cf(const LocalMechanism& mech, const SignedAtomicMeasure& mu, double t,
                        const BoundaryGridFunction& f) {
    if (!(t >= 0.0))
        throw DomainError("h_transform_log_cf: t must be nonnegative");
    if (t == 0.0)
        return cplx(0.0, mu.integrate(f));
    const GridFunction hf = f.interior.times(excessive_h);
    const cplx noise = analytic_rule(t, Substitution::sqrt).integrate([&](double s) {
        return levy_exponent(mech, entrance_functional(s, hf));
    });
    double drift = 0.0;
    if (!mu.is_zero()) {
        for (const Atom& a : mu.atoms())
            drift += a.w * h_transform_at(t, f, a.x);
        if (mu.density())
            drift += SignedAtomicMeasure({}, mu.density())
                         .integrate(h_transform_semigroup(t, f).interior);
    }
    return cplx(0.0, drift) + noise;
}

double sc_residual(const LogCF& logcf, double r, double t, const GridFunction& f,
                   KernelKind shift) {
    if (!(r >= 0.0) || !(t >= 0.0))
        throw DomainError("sc_residual: r and t must be nonnegative");
    const GridFunction moved = apply_semigroup(t, f, shift);
    return std::abs(logcf(r + t, f) - logcf(r, moved) - logcf(t, f));
}

}  // namespace mehler
