#include "rso2stat/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "rso2stat/tomlmini.hpp"

namespace rso2stat {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config key '" + key + "': " + why);
}

double want_number(const json& j, const std::string& key) {
    if (!j.is_number()) bad_key(key, "expected a number");
    return j.get<double>();
}

int want_int(const json& j, const std::string& key) {
    if (!j.is_number_integer()) bad_key(key, "expected an integer");
    return j.get<int>();
}

bool want_bool(const json& j, const std::string& key) {
    if (!j.is_boolean()) bad_key(key, "expected a boolean");
    return j.get<bool>();
}

}  // namespace

AnalysisConfig parse_analysis_config(const json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("config: expected a table at top level");
    AnalysisConfig cfg;
    static const std::set<std::string> known = {"M",          "M_test",  "G",       "B_boot",
                                                "block_len",  "detection_limit",    "workers",
                                                "corrected_p", "smoother"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) bad_key(key, "unknown key");
        if (key == "M") cfg.M = want_int(value, key);
        else if (key == "M_test") cfg.M_test = want_int(value, key);
        else if (key == "G") cfg.G = want_int(value, key);
        else if (key == "B_boot") cfg.B_boot = want_int(value, key);
        else if (key == "block_len") cfg.block_len = want_int(value, key);
        else if (key == "detection_limit") cfg.detection_limit = want_number(value, key);
        else if (key == "workers") cfg.workers = want_int(value, key);
        else if (key == "corrected_p") cfg.corrected_p = want_bool(value, key);
        else {
            if (!value.is_object()) bad_key("smoother", "expected a table");
            static const std::set<std::string> sm_known = {"max_interior_knots", "degree",
                                                           "lambda_log10_range", "grid_points"};
            for (const auto& [sk, sv] : value.items()) {
                const std::string full = "smoother." + sk;
                if (!sm_known.count(sk)) bad_key(full, "unknown key");
                if (sk == "max_interior_knots") cfg.smoother.max_interior_knots = want_int(sv, full);
                else if (sk == "degree") cfg.smoother.degree = want_int(sv, full);
                else if (sk == "grid_points") cfg.smoother.grid_points = want_int(sv, full);
                else {
                    if (!sv.is_array() || sv.size() != 2 || !sv[0].is_number() || !sv[1].is_number())
                        bad_key(full, "expected [lo, hi]");
                    cfg.smoother.lambda_log10_min = sv[0].get<double>();
                    cfg.smoother.lambda_log10_max = sv[1].get<double>();
                }
            }
        }
    }
    validate_config(cfg);
    return cfg;
}

AnalysisConfig load_analysis_config(const std::string& path) {
    return parse_analysis_config(load_config_file(path));
}

void validate_config(const AnalysisConfig& cfg) {
    if (cfg.M < 2) bad_key("M", "must be >= 2 (Rubin variance undefined below)");
    if (cfg.M_test < 2) bad_key("M_test", "must be >= 2");
    if (cfg.G < 100) bad_key("G", "must be >= 100");
    if (cfg.B_boot < 50) bad_key("B_boot", "must be >= 50 (unstable below)");
    if (cfg.block_len < 0) bad_key("block_len", "must be >= 0 (0 = automatic)");
    if (cfg.detection_limit <= 0.0 || cfg.detection_limit >= 100.0)
        bad_key("detection_limit", "must be in (0, 100)");
    if (cfg.workers < 0) bad_key("workers", "must be >= 0 (0 = hardware)");
    if (cfg.smoother.degree != 3) bad_key("smoother.degree", "only cubic (3) is supported");
    if (cfg.smoother.max_interior_knots < 2 || cfg.smoother.max_interior_knots > 200)
        bad_key("smoother.max_interior_knots", "must be in [2, 200]");
    if (cfg.smoother.grid_points < 5) bad_key("smoother.grid_points", "must be >= 5");
    if (!(cfg.smoother.lambda_log10_min < cfg.smoother.lambda_log10_max))
        bad_key("smoother.lambda_log10_range", "lo must be < hi");
}

nlohmann::json config_to_json(const AnalysisConfig& cfg) {
    // workers is deliberately not echoed: results are worker-count invariant
    return json{
        {"M", cfg.M},
        {"M_test", cfg.M_test},
        {"G", cfg.G},
        {"B_boot", cfg.B_boot},
        {"block_len", cfg.block_len},
        {"detection_limit", cfg.detection_limit},
        {"corrected_p", cfg.corrected_p},
        {"smoother",
         {{"max_interior_knots", cfg.smoother.max_interior_knots},
          {"degree", cfg.smoother.degree},
          {"lambda_log10_range", {cfg.smoother.lambda_log10_min, cfg.smoother.lambda_log10_max}},
          {"grid_points", cfg.smoother.grid_points}}},
    };
}

int effective_block_len(int block_len, std::size_t n) {
    if (block_len > 0) return static_cast<int>(std::min<std::size_t>(block_len, n));
    const int auto_len = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-9));
    return static_cast<int>(std::min<std::size_t>(std::max(auto_len, 1), n));
}

}  // namespace rso2stat
