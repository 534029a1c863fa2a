// Command-line front end: run, replay, list-experiments.

#include "mehler/error.hpp"
#include "mehler/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int finish(const mehler::RunResult& r) {
    if (!r.message.empty())
        std::cerr << "mehler: " << r.message << '\n';
    if (r.code != mehler::ExitCode::invalid_config)
        std::cout << r.out_dir.string() << ": " << (r.report.value("pass", false) ? "PASS" : "FAIL")
                  << '\n';
    return static_cast<int>(r.code);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mehler semigroup and superprocess experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<unsigned> parallelism;

    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--seed", seed, "override the master seed");
    run->add_option("--replicas", replicas, "override the replica count");
    run->add_option("--parallelism", parallelism, "worker threads");
    run->add_option("--out-dir", out_dir, "artifact directory");

    std::string manifest_path;
    auto* replay = app.add_subcommand("replay", "re-run a manifest and compare row hashes");
    replay->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
    replay->add_option("--out-dir", out_dir, "artifact directory (default: replay/ beside it)");

    auto* list = app.add_subcommand("list-experiments", "print experiment names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(mehler::ExitCode::invalid_config);
    }

    const std::optional<std::filesystem::path> out =
        out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);
    try {
        if (*list) {
            for (const auto& e : mehler::experiments())
                std::cout << e.name << "  " << e.summary << '\n';
            return 0;
        }
        if (*run) {
            const mehler::json user = mehler::load_config(config_path);
            return finish(mehler::run_experiment(user, {seed, replicas, parallelism}, out));
        }
        return finish(mehler::replay_manifest(manifest_path, out));
    } catch (const mehler::ConfigError& e) {
        std::cerr << "mehler: " << e.what() << '\n';
        return static_cast<int>(mehler::ExitCode::invalid_config);
    }
}
