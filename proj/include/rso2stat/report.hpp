#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rso2stat/config.hpp"
#include "rso2stat/estimators.hpp"
#include "rso2stat/permtest.hpp"
#include "rso2stat/rng.hpp"
#include "rso2stat/series.hpp"

namespace rso2stat {

/// Everything cmd_analyze reports for one session: proposed estimators and
/// tests plus the sample-mean / naive-slope baselines.
struct SessionAnalysis {
    std::string subject_id;
    bool ok = false;
    std::string error;

    double censoring_pre = 0.0, censoring_post = 0.0;
    MaucEstimate mauc_pre, mauc_post;
    double delta_mauc = 0.0;
    PermTestResult mauc_test;
    SlopeEstimate slope_pre, slope_post;
    double delta_slope = 0.0;
    PermTestResult slope_test;

    BaselineEstimate mean_pre, mean_post;
    BaselineTestResult mean_t_test;
    BaselineEstimate naive_pre, naive_post;
    BaselineTestResult naive_test;
};

/// Run the full per-session pipeline. The stream should already be keyed to
/// the session (analyze keys it by subject id and input position).
SessionAnalysis analyze_session(const Session& session, const AnalysisConfig& config,
                                const RngStream& rng);

nlohmann::json analysis_to_json(const std::vector<SessionAnalysis>& sessions,
                                const AnalysisConfig& config, std::uint64_t seed);

/// One row per session, mirroring the JSON's numeric fields.
std::string analysis_to_csv(const std::vector<SessionAnalysis>& sessions);

/// Plot data for one session: segment, time, observed value, censor flag and
/// the imputation-averaged smooth evaluated at the observation times.
std::string session_curve_csv(const Session& session, const AnalysisConfig& config,
                              const RngStream& rng);

}  // namespace rso2stat
