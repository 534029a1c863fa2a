#pragma once

#include "mehler/levy.hpp"
#include "mehler/simulate.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mehler {

/// Fewest replicas accepted by empirical_cf.
inline constexpr std::size_t min_replicas = 100;
/// Multiplier of the standard error in every per-cell tolerance.
inline constexpr double sigma_multiplier = 3.0;

/// CF evaluation multipliers applied to each panel function.
std::vector<double> default_points();

/// [function][point] table of complex values.
using CellValues = std::vector<std::vector<cplx>>;
/// [function][point] table of real values.
using CellReals = std::vector<std::vector<double>>;

/// Empirical characteristic function E exp(i xi <X, f_k>) on a panel.
struct EmpiricalCF {
    std::vector<std::string> panel;
    std::vector<double> points;
    CellValues estimates;
    CellReals se_re;
    CellReals se_im;
    std::size_t replicas = 0;

    /// Standard error of the complex estimate, sqrt(se_re^2 + se_im^2).
    double se(std::size_t k, std::size_t p) const;
};

/// Throws PreconditionError below min_replicas.
EmpiricalCF empirical_cf(const SampleMatrix& samples, std::vector<std::string> panel,
                         std::vector<double> points);

struct CellGap {
    std::size_t function = 0;
    std::size_t point = 0;
    double multiplier = 0.0;
    cplx estimate;
    cplx expected;
    double gap = 0.0;
    double stat_tol = 0.0;
    double disc_tol = 0.0;

    bool ok() const noexcept { return gap <= stat_tol + disc_tol; }
};

struct ComparisonReport {
    std::vector<CellGap> cells;
    double max_abs_gap = 0.0;
    bool pass = true;

    /// Largest gap / tolerance ratio; at most 1 when the report passes.
    double worst_ratio() const;
    /// Family-wise false-failure bound for the cell count.
    std::string bonferroni_note() const;
};

/// log CF values on the empirical panel: log_cf(k, xi) for every cell.
CellValues tabulate_log_cf(const EmpiricalCF& emp,
                           const std::function<cplx(std::size_t, double)>& log_cf);

/// Per-cell gap |estimate - exp(analytic)| against 3 se + budget.
ComparisonReport compare_cf(const EmpiricalCF& emp, const CellValues& analytic_log,
                            const CellReals& disc_budget);
ComparisonReport compare_cf(const EmpiricalCF& emp, const CellValues& analytic_log,
                            double disc_budget = 0.0);

/// Two independent samples of the same law: tolerance 3 sqrt(se_a^2 + se_b^2) + budget.
ComparisonReport compare_two_sample(const EmpiricalCF& a, const EmpiricalCF& b,
                                    const CellReals& disc_budget);

/// 2 |exp(coarse) - exp(fine)| per cell: the first-order bias of the coarse
/// scheme estimated from the scheme at dt and dt/2.
CellReals richardson_budget(const CellValues& coarse_log, const CellValues& fine_log);

CellReals constant_budget(const EmpiricalCF& emp, double value);

/// Max over cells of |estimate - exp(analytic)| with the standard error of
/// the cell that attains it.
struct CfDistance {
    double distance = 0.0;
    double se = 0.0;
};
CfDistance cf_distance(const EmpiricalCF& emp, const CellValues& analytic_log);

}  // namespace mehler
