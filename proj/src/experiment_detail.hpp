#pragma once

// Shared plumbing for the experiment definitions.

#include "mehler/experiment.hpp"
#include "mehler/grid.hpp"
#include "mehler/harness.hpp"
#include "mehler/levy.hpp"
#include "mehler/measure.hpp"
#include "mehler/simulate.hpp"

#include <chrono>
#include <string>
#include <vector>

namespace mehler::detail {

Experiment kernels_experiment();
Experiment sc_check_experiment();
Experiment weierstrass_experiment();
Experiment simulate_gauss_experiment();
Experiment simulate_jump_experiment();
Experiment signed_measure_experiment();
Experiment h_transform_experiment();
Experiment fluctuation_experiment();

/// Keys every experiment accepts, with their defaults.
json common_defaults(const std::string& name, std::size_t replicas);

// Typed readers; all throw ConfigError naming the key.
double number(const json& j, const char* key);
double positive(const json& j, const char* key);
double nonnegative(const json& j, const char* key);
std::size_t count(const json& j, const char* key, std::size_t min = 1);
std::vector<double> numbers(const json& j, const char* key);

GridSpec grid_spec(const json& config);
std::shared_ptr<const SpatialGrid> grid_of(const json& config);
std::vector<std::string> panel_specs(const json& config);
std::vector<double> points_of(const json& config);
/// [[jump, mass], ...]
AtomicLevyMeasure jumps_of(const json& list, const char* what);
/// [[x, weight], ...]
std::vector<Atom> atoms_of(const json& list, const char* what);
/// Time step count from "time": {"t", "steps"}.
double horizon_of(const json& config);
std::size_t steps_of(const json& config);

/// Validates the common keys and the panel.
void validate_common(const json& config);

/// Throws DivergenceError naming the first non-finite cell.
void require_finite(const SampleMatrix& samples, const std::string& section);

json report_json(const ComparisonReport& rep);
json emp_json(const EmpiricalCF& emp);

/// Rows "section,replica,seed,t,function,value".
void append_samples(Rows& rows, const std::string& section, const SampleMatrix& samples,
                    std::uint64_t seed, double t);
inline constexpr const char* sample_header = "section,replica,seed,t,function,value";

/// Per-function compensated-mean check |mean| <= 3 se.
Section mean_section(const std::string& name, const SampleMatrix& samples,
                     const std::vector<std::string>& panel);

/// CF comparison section with cells, budget and Bonferroni note.
Section cf_section(const std::string& name, const EmpiricalCF& emp, const ComparisonReport& rep);

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace mehler::detail
