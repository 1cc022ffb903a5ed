#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rso2stat/config.hpp"
#include "rso2stat/rng.hpp"
#include "rso2stat/series.hpp"

namespace rso2stat {

struct PermTestResult {
    std::string statistic_name;      // "MAUC" or "slope"
    double delta_obs = 0.0;
    std::vector<double> delta_perm;  // length G
    double p_value = 1.0;
    int G = 0;
    int M = 0;
    std::uint64_t seed = 0;
    /// With the strict-exceedance p-value, p can legitimately be 0; it then
    /// means p < 1/G, never "impossible".  degenerate marks constant
    /// uncensored input, where the permutation distribution collapses and
    /// p is reported as 1.
    bool degenerate = false;
};

struct PermTestOptions {
    int workers = 1;
    bool corrected_p = false;  // (count+1)/(G+1) small-sample variant
};

/// Imputation-nested permutation test for the pre/post MAUC change.
/// Values (with their censoring flags) are permuted over the pooled time
/// grid and split back at K_pre; each permuted sample is imputed M times.
PermTestResult mauc_perm_test(const Session& session, int G, int M, const RngStream& rng,
                              const SmootherConfig& smoother, const PermTestOptions& opts = {});

/// Same machinery for the slope change, except values are permuted within
/// the pre and post segments separately so mean-level differences cannot
/// masquerade as slope changes.
PermTestResult slope_perm_test(const Session& session, int G, int M, const RngStream& rng,
                               const SmootherConfig& smoother, const PermTestOptions& opts = {});

struct BaselineTestResult {
    double delta = 0.0;
    double p_value = 1.0;
};

/// Welch two-sample t-test on the raw clamped values.
BaselineTestResult t_test_baseline(const Session& session);

/// z-test of the naive OLS slope difference against its block-bootstrap SE.
BaselineTestResult naive_slope_test(const Session& session, int B_boot, int block_len,
                                    const RngStream& rng);

}  // namespace rso2stat
