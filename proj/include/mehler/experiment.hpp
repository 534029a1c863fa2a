#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mehler {

using json = nlohmann::ordered_json;

enum class ExitCode : int {
    pass = 0,
    fail = 1,
    invalid_config = 2,
    divergence = 3,
    hash_mismatch = 4,
};

/// CSV table built line by line; values use shortest round-trip formatting.
class Rows {
public:
    Rows() = default;
    explicit Rows(std::string header) : header_(std::move(header)) {}

    bool empty() const noexcept { return lines_.empty(); }
    std::size_t size() const noexcept { return lines_.size(); }
    void add(std::string line) { lines_.push_back(std::move(line)); }
    std::string text() const;

private:
    std::string header_;
    std::vector<std::string> lines_;
};

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

struct Section {
    std::string name;
    bool pass = true;
    json detail = json::object();
};

struct ExperimentOutput {
    std::vector<Section> sections;
    Rows rows;
    Rows markov_rows;
    json seeds = json::object();

    bool pass() const;
};

/// Typed view of the resolved configuration shared by all experiments.
struct RunContext {
    const json& config;
    std::uint64_t seed;
    std::size_t replicas;
    unsigned workers;
};

struct Experiment {
    std::string name;
    std::string summary;
    json defaults;
    /// Throws ConfigError on any invalid parameter; must not write anything.
    std::function<void(const json&)> validate;
    std::function<ExperimentOutput(const RunContext&)> run;
};

const std::vector<Experiment>& experiments();
/// Throws ConfigError for unknown names.
const Experiment& find_experiment(std::string_view name);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<unsigned> parallelism;
};

/// Defaults merged with the user config and overrides, rejecting unknown
/// keys, then validated. Throws ConfigError.
json resolve_config(const json& user, const Overrides& overrides);

struct RunResult {
    ExitCode code = ExitCode::pass;
    std::filesystem::path out_dir;
    json report;
    std::string message;
};

/// Resolves, validates, runs and writes manifest.json, rows.csv,
/// rows_markov.csv (when present), report.json and report.txt.
/// Nothing is written when the config is invalid.
RunResult run_experiment(const json& user, const Overrides& overrides,
                         const std::optional<std::filesystem::path>& out_dir);

/// Re-runs a manifest into `out_dir` (default: "replay" beside the
/// manifest) and checks the row hashes against the recorded ones.
RunResult replay_manifest(const std::filesystem::path& manifest,
                          const std::optional<std::filesystem::path>& out_dir);

/// SHA-1 of "blob <size>\0" followed by the content, as git computes it.
std::string git_blob_sha1(std::string_view content);

/// Reads a JSON config file; throws ConfigError when missing or malformed.
json load_config(const std::filesystem::path& path);

}  // namespace mehler
