#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rso2stat/config.hpp"
#include "rso2stat/imputation.hpp"
#include "rso2stat/rng.hpp"
#include "rso2stat/series.hpp"
#include "rso2stat/spline.hpp"

namespace rso2stat {

/// Imputation-pooled time-average of the smooth over (a, b).
struct MaucEstimate {
    double value = 0.0;
    std::vector<double> per_imputation;
    double se = -1.0;  // < 0 until a variance pass fills it
    double interval_a = 0.0;
    double interval_b = 0.0;
    int M = 0;
    int B_boot = 0;
    int block_len = 0;
};

/// Imputation-pooled slope of the linear model fitted to the smooth.
struct SlopeEstimate {
    double value = 0.0;
    std::vector<double> per_imputation;
    std::vector<double> intercepts;
    double se = -1.0;
    int M = 0;
    int B_boot = 0;
    int block_len = 0;
};

struct BaselineEstimate {
    double value = 0.0;
    double se = 0.0;
};

struct OlsLine {
    double intercept = 0.0;
    double slope = 0.0;
};

double mean_of(std::span<const double> v);
double sample_variance(std::span<const double> v);  // ddof = 1
OlsLine ols_line(std::span<const double> times, std::span<const double> values);

/// Moving-block resample of {0..n-1}: concatenated blocks of block_len
/// consecutive indices with uniformly random (non-circular) starts,
/// truncated to n entries.
std::vector<std::uint32_t> moving_block_indices(std::size_t n, int block_len, RngStream& rng);

/// Point estimate: per_imputation[m-1] = integral of the GCV spline fitted
/// to the m-th completed series over (a, b), divided by b - a; value is the
/// mean over imputations. se is left unset.
MaucEstimate mauc(const Rso2Series& series, double a, double b, int M, const RngStream& rng,
                  const SmootherConfig& smoother);

/// Rubin-combined SE: within-imputation variance from a moving-block
/// bootstrap of each completed series (refit + re-integrate per replicate),
/// between-imputation variance from per_imputation. The imputation streams
/// are re-derived from rng exactly as mauc() derived them, so the two calls
/// describe the same completed datasets.
double mauc_se(const std::vector<double>& per_imputation, const Rso2Series& series, double a,
               double b, int M, int B_boot, int block_len, const RngStream& rng,
               const SmootherConfig& smoother);

MaucEstimate mauc_with_se(const Rso2Series& series, double a, double b, int M, int B_boot,
                          int block_len, const RngStream& rng, const SmootherConfig& smoother);

/// Slope pipeline: fit the spline to the completed series, evaluate it at
/// the observation times, regress those fitted values on time.
SlopeEstimate slope(const Rso2Series& series, int M, const RngStream& rng,
                    const SmootherConfig& smoother);

/// Within-imputation variance via block bootstrap of residuals from the
/// m-th linear fit: resampled residual blocks are added back onto the line
/// and pushed through the full spline -> OLS pipeline.
double slope_se(const std::vector<double>& per_imputation,
                const std::vector<double>& intercepts, const Rso2Series& series, int M,
                int B_boot, int block_len, const RngStream& rng, const SmootherConfig& smoother);

SlopeEstimate slope_with_se(const Rso2Series& series, int M, int B_boot, int block_len,
                            const RngStream& rng, const SmootherConfig& smoother);

/// Sample mean of the observed (clamped) values; SE by moving-block
/// bootstrap of the observations.
BaselineEstimate sample_mean_baseline(const Rso2Series& series, int B_boot, int block_len,
                                      const RngStream& rng);

/// OLS slope on the raw observed values; SE by moving-block bootstrap of
/// the OLS residuals.
BaselineEstimate naive_slope_baseline(const Rso2Series& series, int B_boot, int block_len,
                                      const RngStream& rng);

}  // namespace rso2stat
