// Run orchestration, artifact emission and replay.

#include "experiment_detail.hpp"

#include "mehler/error.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace mehler {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc())
        throw std::runtime_error("format_double: buffer too small");
    return {buf, end};
}

std::string Rows::text() const {
    std::string out = header_;
    out += '\n';
    for (const std::string& line : lines_) {
        out += line;
        out += '\n';
    }
    return out;
}

std::string git_blob_sha1(std::string_view content) {
    const std::string head = "blob " + std::to_string(content.size()) + '\0';
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                      EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), head.data(), head.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw std::runtime_error("sha1 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

json load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace {

constexpr const char* tool_name = "mehler";
constexpr int manifest_format = 1;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

std::string report_text(const std::string& experiment, const json& report) {
    std::ostringstream os;
    os << experiment << ": " << (report.value("pass", false) ? "PASS" : "FAIL") << '\n';
    if (report.contains("message"))
        os << "  " << report["message"].get<std::string>() << '\n';
    if (report.contains("sections"))
        for (const auto& s : report["sections"]) {
            os << "  [" << (s["pass"].get<bool>() ? "pass" : "FAIL") << "] "
               << s["name"].get<std::string>();
            const json& d = s["detail"];
            if (d.contains("max_abs_gap"))
                os << "  max gap " << format_double(d["max_abs_gap"].get<double>());
            if (d.contains("worst_ratio"))
                os << "  worst gap/tol " << format_double(d["worst_ratio"].get<double>());
            if (d.contains("bonferroni"))
                os << "\n      " << d["bonferroni"].get<std::string>();
            os << '\n';
        }
    os << "  seconds " << format_double(report.value("seconds", 0.0)) << '\n';
    return os.str();
}

ExitCode code_of(const json& report) {
    const std::string status = report.value("status", "fail");
    if (status == "divergence")
        return ExitCode::divergence;
    if (status == "invalid")
        return ExitCode::invalid_config;
    return report.value("pass", false) ? ExitCode::pass : ExitCode::fail;
}

}  // namespace

RunResult run_experiment(const json& user, const Overrides& overrides,
                         const std::optional<fs::path>& out_dir) {
    RunResult result;
    json config;
    try {
        config = resolve_config(user, overrides);
    } catch (const ConfigError& e) {
        result.code = ExitCode::invalid_config;
        result.message = e.what();
        return result;
    }
    const Experiment& exp = find_experiment(config["experiment"].get<std::string>());
    result.out_dir = out_dir ? *out_dir : fs::path(config["output"]["dir"].get<std::string>());
    config["output"]["dir"] = result.out_dir.string();

    const RunContext ctx{config, config["seed"].get<std::uint64_t>(),
                         config["replicas"].get<std::size_t>(),
                         config["parallelism"].get<unsigned>()};
    json report;
    report["experiment"] = exp.name;
    const detail::Stopwatch clock;
    std::optional<ExperimentOutput> output;
    try {
        output = exp.run(ctx);
    } catch (const DivergenceError& e) {
        report["status"] = "divergence";
        report["message"] = e.what();
    } catch (const QuadratureError& e) {
        report["status"] = "divergence";
        report["message"] = e.what();
    } catch (const PreconditionError& e) {
        report["status"] = "invalid";
        report["message"] = e.what();
    } catch (const DomainError& e) {
        report["status"] = "invalid";
        report["message"] = e.what();
    }
    if (output) {
        report["status"] = output->pass() ? "pass" : "fail";
        json sections = json::array();
        for (const Section& s : output->sections)
            sections.push_back({{"name", s.name}, {"pass", s.pass}, {"detail", s.detail}});
        report["sections"] = sections;
    }
    report["pass"] = output && output->pass();
    report["seconds"] = clock.seconds();

    fs::create_directories(result.out_dir);
    json manifest;
    manifest["tool"] = tool_name;
    manifest["format"] = manifest_format;
    manifest["experiment"] = exp.name;
    manifest["config"] = config;
    json hashes = json::object();
    if (output) {
        manifest["seeds"] = output->seeds;
        const std::string rows = output->rows.text();
        write_file(result.out_dir / "rows.csv", rows);
        hashes["rows.csv"] = git_blob_sha1(rows);
        if (!output->markov_rows.empty()) {
            const std::string markov = output->markov_rows.text();
            write_file(result.out_dir / "rows_markov.csv", markov);
            hashes["rows_markov.csv"] = git_blob_sha1(markov);
        }
    } else {
        manifest["seeds"] = {{"master", ctx.seed}};
    }
    manifest["hashes"] = hashes;
    write_file(result.out_dir / "report.json", report.dump(2) + "\n");
    write_file(result.out_dir / "report.txt", report_text(exp.name, report));
    write_file(result.out_dir / "manifest.json", manifest.dump(2) + "\n");

    result.report = std::move(report);
    result.code = code_of(result.report);
    if (result.report.contains("message"))
        result.message = result.report["message"].get<std::string>();
    return result;
}

RunResult replay_manifest(const fs::path& manifest_path, const std::optional<fs::path>& out_dir) {
    RunResult result;
    json manifest;
    try {
        manifest = load_config(manifest_path);
        if (manifest.value("tool", "") != tool_name || !manifest.contains("config") ||
            !manifest.contains("hashes") || !manifest["hashes"].is_object())
            throw ConfigError(manifest_path.string() + " is not a run manifest");
    } catch (const ConfigError& e) {
        result.code = ExitCode::invalid_config;
        result.message = e.what();
        return result;
    } catch (const json::exception& e) {
        result.code = ExitCode::invalid_config;
        result.message = e.what();
        return result;
    }
    const fs::path target = out_dir ? *out_dir : manifest_path.parent_path() / "replay";
    result = run_experiment(manifest["config"], {}, target);
    if (result.code == ExitCode::invalid_config || result.code == ExitCode::divergence)
        return result;

    std::vector<std::string> mismatched;
    const json& recorded = manifest["hashes"];
    json fresh = load_config(result.out_dir / "manifest.json")["hashes"];
    for (auto it = recorded.begin(); it != recorded.end(); ++it)
        if (!fresh.contains(it.key()) || fresh[it.key()] != it.value())
            mismatched.push_back(it.key());
    for (auto it = fresh.begin(); it != fresh.end(); ++it)
        if (!recorded.contains(it.key()))
            mismatched.push_back(it.key());
    if (!mismatched.empty()) {
        result.code = ExitCode::hash_mismatch;
        result.message = "row hashes differ:";
        for (const auto& m : mismatched)
            result.message += " " + m;
    }
    return result;
}

}  // namespace mehler
