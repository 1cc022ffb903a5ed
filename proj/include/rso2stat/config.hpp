#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace rso2stat {

struct SmootherConfig {
    int max_interior_knots = 40;
    int degree = 3;
    double lambda_log10_min = -6.0;
    double lambda_log10_max = 8.0;
    int grid_points = 25;
};

/// Everything the CLI/analysis layer needs; estimator functions take the
/// relevant pieces explicitly.
struct AnalysisConfig {
    int M = 20;           // imputations for estimation
    int M_test = 10;      // imputations inside permutation tests
    int G = 1000;         // permutations
    int B_boot = 500;     // bootstrap replicates for reported SEs
    int block_len = 0;    // 0 = ceil(n^(1/3))
    double detection_limit = 15.0;
    int workers = 1;
    bool corrected_p = false;  // (G+1)-denominator small-sample variant
    SmootherConfig smoother;
};

/// Parse config from a JSON document (as produced by load_config_file).
/// Unknown or ill-typed keys raise std::invalid_argument naming the key.
AnalysisConfig parse_analysis_config(const nlohmann::json& doc);

AnalysisConfig load_analysis_config(const std::string& path);

/// Range checks (M >= 2, degree == 3 supported, grid sane, ...).
void validate_config(const AnalysisConfig& config);

nlohmann::json config_to_json(const AnalysisConfig& config);

/// Effective moving-block length: explicit value, else ceil(n^(1/3)).
int effective_block_len(int block_len, std::size_t n);

}  // namespace rso2stat
