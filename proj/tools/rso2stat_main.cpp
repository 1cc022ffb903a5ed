#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rso2stat/report.hpp"
#include "rso2stat/simulator.hpp"
#include "rso2stat/tomlmini.hpp"

namespace fs = std::filesystem;
using namespace rso2stat;

namespace {

constexpr std::uint64_t kDefaultSeed = 20180701;

void write_output(const fs::path& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    write_text_file((dir / name).string(), content);
}

int cmd_analyze(const std::vector<std::string>& session_files,
                const std::vector<std::string>& meta_files, const std::string& config_file,
                std::uint64_t seed, int workers_override, const std::string& out_dir) {
    AnalysisConfig cfg;
    try {
        if (!config_file.empty()) cfg = load_analysis_config(config_file);
        if (workers_override >= 0) cfg.workers = workers_override;
        validate_config(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    if (session_files.empty() || session_files.size() != meta_files.size()) {
        std::fprintf(stderr, "usage error: need matching --session/--meta pairs\n");
        return 2;
    }

    const RngStream rng(seed);
    std::vector<SessionAnalysis> results;
    std::vector<std::pair<std::string, std::string>> curve_files;
    std::size_t failures = 0;

    for (std::size_t i = 0; i < session_files.size(); ++i) {
        SessionAnalysis record;
        try {
            // the metadata's detection limit is per-session and authoritative
            const SessionMeta meta = parse_session_meta(read_text_file(meta_files[i]));
            const Session session = parse_session(read_text_file(session_files[i]), meta);
            const RngStream srng = rng.child(session.subject_id, i);
            record = analyze_session(session, cfg, srng);
            curve_files.emplace_back("curve_" + session.subject_id + ".csv",
                                     session_curve_csv(session, cfg, srng));
        } catch (const std::exception& e) {
            record.ok = false;
            record.subject_id = record.subject_id.empty()
                                    ? fs::path(session_files[i]).stem().string()
                                    : record.subject_id;
            record.error = e.what();
            ++failures;
            std::fprintf(stderr, "session %s: %s\n", session_files[i].c_str(), e.what());
        }
        results.push_back(std::move(record));
    }

    try {
        const nlohmann::json report = analysis_to_json(results, cfg, seed);
        write_output(out_dir, "report.json", report.dump(2) + "\n");
        write_output(out_dir, "report.csv", analysis_to_csv(results));
        for (const auto& [name, content] : curve_files) write_output(out_dir, name, content);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "write error: %s\n", e.what());
        return 1;
    }

    if (failures == results.size()) return 1;
    return 0;
}

int cmd_simulate(const std::string& scenario_file, const std::string& out_dir, bool seed_set,
                 std::uint64_t seed, int workers) {
    ScenarioDoc doc;
    try {
        doc = parse_scenario(load_config_file(scenario_file));
        if (seed_set) doc.seed = seed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "scenario error: %s\n", e.what());
        return 2;
    }
    try {
        const SimulationOutput out = run_simulation(doc, workers);
        for (const auto& [name, content] : out.files) write_output(out_dir, name, content);
        write_output(out_dir, doc.name + "_summary.json", out.summary.dump(2) + "\n");
        std::printf("%s: wrote %zu file(s) to %s (seed %llu)\n", doc.kind.c_str(),
                    out.files.size() + 1, out_dir.c_str(),
                    static_cast<unsigned long long>(doc.seed));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simulation error: %s\n", e.what());
        return 1;
    }
    return 0;
}

int cmd_validate(const std::string& config_file) {
    try {
        const AnalysisConfig cfg = load_analysis_config(config_file);
        validate_config(cfg);
        std::printf("%s: OK\n", config_file.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", config_file.c_str(), e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonparametric rSO2 analysis: detection-limit-aware MAUC and slope "
                 "estimation, permutation tests, and a simulation harness"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Analyze one or more session CSVs");
    std::vector<std::string> session_files, meta_files;
    std::string config_file, out_dir = ".";
    std::uint64_t seed = kDefaultSeed;
    int workers = -1;
    analyze->add_option("--session", session_files, "Session CSV (time_s,rso2)")->required();
    analyze->add_option("--meta", meta_files, "Session metadata JSON")->required();
    analyze->add_option("--config", config_file, "Config file (TOML or JSON)");
    analyze->add_option("--seed", seed, "Master seed");
    analyze->add_option("--workers", workers, "Worker threads (overrides config)");
    analyze->add_option("--out", out_dir, "Output directory");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a simulation scenario file");
    std::string scenario_file, sim_out = ".";
    std::uint64_t sim_seed = 0;
    int sim_workers = 1;
    bool sim_seed_set = false;
    simulate->add_option("--scenario", scenario_file, "Scenario file (TOML or JSON)")->required();
    simulate->add_option("--out", sim_out, "Output directory");
    simulate->add_option("--seed", sim_seed, "Master seed (overrides scenario)")
        ->each([&](const std::string&) { sim_seed_set = true; });
    simulate->add_option("--workers", sim_workers, "Worker threads");

    // validate
    auto* validate = app.add_subcommand("validate", "Check a config file");
    std::string validate_file;
    validate->add_option("--config", validate_file, "Config file (TOML or JSON)")->required();

    // version
    auto* version = app.add_subcommand("version", "Print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (analyze->parsed())
        return cmd_analyze(session_files, meta_files, config_file, seed, workers, out_dir);
    if (simulate->parsed())
        return cmd_simulate(scenario_file, sim_out, sim_seed_set, sim_seed, sim_workers);
    if (validate->parsed()) return cmd_validate(validate_file);
    if (version->parsed()) {
        std::printf("rso2stat %s\n", RSO2STAT_VERSION);
        return 0;
    }
    return 2;
}
