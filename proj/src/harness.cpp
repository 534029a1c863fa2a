#include "mehler/harness.hpp"

#include "mehler/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mehler {

std::vector<double> default_points() { return {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}; }

double EmpiricalCF::se(std::size_t k, std::size_t p) const {
    return std::hypot(se_re[k][p], se_im[k][p]);
}

EmpiricalCF empirical_cf(const SampleMatrix& samples, std::vector<std::string> panel,
                         std::vector<double> points) {
    if (samples.replicas < min_replicas)
        throw PreconditionError("empirical_cf: at least " + std::to_string(min_replicas) +
                                " replicas required");
    if (panel.size() != samples.functions)
        throw PreconditionError("empirical_cf: panel size does not match the samples");
    const auto n = static_cast<double>(samples.replicas);
    EmpiricalCF out;
    out.replicas = samples.replicas;
    out.estimates.assign(samples.functions, std::vector<cplx>(points.size()));
    out.se_re.assign(samples.functions, std::vector<double>(points.size()));
    out.se_im = out.se_re;
    for (std::size_t k = 0; k < samples.functions; ++k) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            double sc = 0.0, ss = 0.0;
            for (std::size_t r = 0; r < samples.replicas; ++r) {
                const double a = points[p] * samples(r, k);
                sc += std::cos(a);
                ss += std::sin(a);
            }
            const double mc = sc / n, ms = ss / n;
            double vc = 0.0, vs = 0.0;
            for (std::size_t r = 0; r < samples.replicas; ++r) {
                const double a = points[p] * samples(r, k);
                vc += (std::cos(a) - mc) * (std::cos(a) - mc);
                vs += (std::sin(a) - ms) * (std::sin(a) - ms);
            }
            out.estimates[k][p] = {mc, ms};
            out.se_re[k][p] = std::sqrt(vc / (n - 1.0) / n);
            out.se_im[k][p] = std::sqrt(vs / (n - 1.0) / n);
        }
    }
    out.panel = std::move(panel);
    out.points = std::move(points);
    return out;
}

double ComparisonReport::worst_ratio() const {
    double worst = 0.0;
    for (const CellGap& c : cells) {
        const double tol = c.stat_tol + c.disc_tol;
        worst = std::max(worst, tol > 0.0 ? c.gap / tol : (c.gap > 0.0 ? HUGE_VAL : 0.0));
    }
    return worst;
}

std::string ComparisonReport::bonferroni_note() const {
    // A 3-sigma two-sided cell fails spuriously with probability at most 0.27 %.
    std::ostringstream s;
    s << cells.size() << " cells at " << sigma_multiplier
      << " se each; family-wise false-failure bound " << std::min(1.0, 0.0027 * cells.size())
      << " (Bonferroni)";
    return s.str();
}

CellValues tabulate_log_cf(const EmpiricalCF& emp,
                           const std::function<cplx(std::size_t, double)>& log_cf) {
    CellValues out(emp.estimates.size(), std::vector<cplx>(emp.points.size()));
    for (std::size_t k = 0; k < out.size(); ++k)
        for (std::size_t p = 0; p < emp.points.size(); ++p)
            out[k][p] = log_cf(k, emp.points[p]);
    return out;
}

namespace {

void require_shape(const EmpiricalCF& emp, const auto& table) {
    if (table.size() != emp.estimates.size())
        throw PreconditionError("comparison: panel mismatch");
    for (const auto& row : table)
        if (row.size() != emp.points.size())
            throw PreconditionError("comparison: point mismatch");
}

void finish(ComparisonReport& rep) {
    for (const CellGap& c : rep.cells) {
        rep.max_abs_gap = std::max(rep.max_abs_gap, c.gap);
        rep.pass = rep.pass && c.ok();
    }
}

}  // namespace

ComparisonReport compare_cf(const EmpiricalCF& emp, const CellValues& analytic_log,
                            const CellReals& disc_budget) {
    require_shape(emp, analytic_log);
    require_shape(emp, disc_budget);
    ComparisonReport rep;
    for (std::size_t k = 0; k < analytic_log.size(); ++k) {
        for (std::size_t p = 0; p < emp.points.size(); ++p) {
            CellGap c;
            c.function = k;
            c.point = p;
            c.multiplier = emp.points[p];
            c.estimate = emp.estimates[k][p];
            c.expected = std::exp(analytic_log[k][p]);
            c.gap = std::abs(c.estimate - c.expected);
            c.stat_tol = sigma_multiplier * emp.se(k, p);
            c.disc_tol = disc_budget[k][p];
            rep.cells.push_back(c);
        }
    }
    finish(rep);
    return rep;
}

ComparisonReport compare_cf(const EmpiricalCF& emp, const CellValues& analytic_log,
                            double disc_budget) {
    return compare_cf(emp, analytic_log, constant_budget(emp, disc_budget));
}

ComparisonReport compare_two_sample(const EmpiricalCF& a, const EmpiricalCF& b,
                                    const CellReals& disc_budget) {
    if (a.points != b.points || a.estimates.size() != b.estimates.size())
        throw PreconditionError("compare_two_sample: panels differ");
    require_shape(a, disc_budget);
    ComparisonReport rep;
    for (std::size_t k = 0; k < a.estimates.size(); ++k) {
        for (std::size_t p = 0; p < a.points.size(); ++p) {
            CellGap c;
            c.function = k;
            c.point = p;
            c.multiplier = a.points[p];
            c.estimate = a.estimates[k][p];
            c.expected = b.estimates[k][p];
            c.gap = std::abs(c.estimate - c.expected);
            c.stat_tol = sigma_multiplier * std::hypot(a.se(k, p), b.se(k, p));
            c.disc_tol = disc_budget[k][p];
            rep.cells.push_back(c);
        }
    }
    finish(rep);
    return rep;
}

CellReals richardson_budget(const CellValues& coarse_log, const CellValues& fine_log) {
    if (coarse_log.size() != fine_log.size())
        throw PreconditionError("richardson_budget: shape mismatch");
    CellReals out(coarse_log.size());
    for (std::size_t k = 0; k < coarse_log.size(); ++k) {
        if (coarse_log[k].size() != fine_log[k].size())
            throw PreconditionError("richardson_budget: shape mismatch");
        for (std::size_t p = 0; p < coarse_log[k].size(); ++p)
            out[k].push_back(2.0 * std::abs(std::exp(coarse_log[k][p]) - std::exp(fine_log[k][p])));
    }
    return out;
}

CellReals constant_budget(const EmpiricalCF& emp, double value) {
    return CellReals(emp.estimates.size(), std::vector<double>(emp.points.size(), value));
}

CfDistance cf_distance(const EmpiricalCF& emp, const CellValues& analytic_log) {
    require_shape(emp, analytic_log);
    CfDistance d;
    for (std::size_t k = 0; k < analytic_log.size(); ++k) {
        for (std::size_t p = 0; p < emp.points.size(); ++p) {
            const double gap = std::abs(emp.estimates[k][p] - std::exp(analytic_log[k][p]));
            if (gap >= d.distance) {
                d.distance = gap;
                d.se = emp.se(k, p);
            }
        }
    }
    return d;
}

}  // namespace mehler
