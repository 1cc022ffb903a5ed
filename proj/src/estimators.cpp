#include "rso2stat/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace rso2stat {

namespace {

void check_bootstrap_args(int B_boot) {
    if (B_boot < 50)
        throw std::invalid_argument("bootstrap SE: B_boot must be >= 50 (unstable below)");
}

bool all_equal(std::span<const double> v) {
    for (double x : v)
        if (x != v.front()) return false;
    return true;
}

/// Mean that is bit-exact when every entry is identical, so that estimates
/// on uncensored data do not depend on M even at the last ulp.
double pooled_mean(std::span<const double> v) {
    return all_equal(v) ? v.front() : mean_of(v);
}

double rubin_total(std::span<const double> within, std::span<const double> per_imputation) {
    const double w_bar = mean_of(within);
    const double between = sample_variance(per_imputation);
    const double m = static_cast<double>(per_imputation.size());
    return w_bar + (1.0 + 1.0 / m) * between;
}

/// Pre-drawn block resamples shared by every imputation, so that identical
/// completed series (the uncensored case) get identical within-variances.
std::vector<std::vector<std::uint32_t>> draw_block_plans(std::size_t n, int B_boot, int block_len,
                                                         RngStream rng) {
    std::vector<std::vector<std::uint32_t>> plans;
    plans.reserve(B_boot);
    for (int b = 0; b < B_boot; ++b) plans.push_back(moving_block_indices(n, block_len, rng));
    return plans;
}

double slope_of_fit(const SplineSolver& solver, const SplineFit& fit,
                    std::vector<double>& fitted_scratch, double* intercept_out) {
    fitted_scratch.resize(solver.n());
    solver.fitted_values(fit, fitted_scratch);
    const OlsLine line = ols_line(solver.times(), fitted_scratch);
    if (intercept_out) *intercept_out = line.intercept;
    return line.slope;
}

}  // namespace

double mean_of(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean_of: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    if (all_equal(v)) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(n - 1);
}

OlsLine ols_line(std::span<const double> times, std::span<const double> values) {
    const std::size_t n = times.size();
    if (n != values.size() || n < 2) throw std::invalid_argument("ols_line: need paired n >= 2");
    const double tbar = mean_of(times);
    const double ybar = mean_of(values);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dt = times[k] - tbar;
        sxx += dt * dt;
        sxy += dt * (values[k] - ybar);
    }
    if (sxx <= 0.0) throw std::invalid_argument("ols_line: degenerate time design");
    const double b1 = sxy / sxx;
    return OlsLine{ybar - b1 * tbar, b1};
}

std::vector<std::uint32_t> moving_block_indices(std::size_t n, int block_len, RngStream& rng) {
    std::vector<std::uint32_t> idx;
    idx.reserve(n);
    const std::size_t len = std::min<std::size_t>(std::max(block_len, 1), n);
    const std::uint64_t n_starts = n - len + 1;
    while (idx.size() < n) {
        const auto start = static_cast<std::uint32_t>(rng.below(n_starts));
        for (std::size_t j = 0; j < len && idx.size() < n; ++j)
            idx.push_back(start + static_cast<std::uint32_t>(j));
    }
    return idx;
}

MaucEstimate mauc(const Rso2Series& series, double a, double b, int M, const RngStream& rng,
                  const SmootherConfig& smoother) {
    if (M < 1) throw std::invalid_argument("mauc: M must be >= 1");
    const SplineSolver solver(series.times, smoother);
    const Eigen::VectorXd weights = solver.time_basis_integrals(a, b);
    const double width = b - a;

    MaucEstimate est;
    est.interval_a = a;
    est.interval_b = b;
    est.M = M;
    est.per_imputation.reserve(M);
    for (int m = 1; m <= M; ++m) {
        const ImputedSeries imp = impute(series, m, rng);
        const SplineFit fit = solver.fit(imp.values);
        est.per_imputation.push_back(weights.dot(fit.coefficients) / width);
    }
    est.value = pooled_mean(est.per_imputation);
    return est;
}

double mauc_se(const std::vector<double>& per_imputation, const Rso2Series& series, double a,
               double b, int M, int B_boot, int block_len, const RngStream& rng,
               const SmootherConfig& smoother) {
    if (M < 2 || static_cast<int>(per_imputation.size()) != M)
        throw std::invalid_argument("mauc_se: need per_imputation of length M >= 2");
    check_bootstrap_args(B_boot);

    const SplineSolver solver(series.times, smoother);
    const Eigen::VectorXd weights = solver.time_basis_integrals(a, b);
    const double width = b - a;
    const std::size_t n = series.size();
    const int len = effective_block_len(block_len, n);
    const auto plans = draw_block_plans(n, B_boot, len, rng.child("boot-mauc"));

    std::vector<double> within(M, 0.0);
    std::vector<double> replicate(B_boot);
    std::vector<double> resampled(n);
    for (int m = 1; m <= M; ++m) {
        const ImputedSeries imp = impute(series, m, rng);
        for (int bb = 0; bb < B_boot; ++bb) {
            const auto& plan = plans[bb];
            for (std::size_t k = 0; k < n; ++k) resampled[k] = imp.values[plan[k]];
            const SplineFit fit = solver.fit(resampled);
            replicate[bb] = weights.dot(fit.coefficients) / width;
        }
        within[m - 1] = sample_variance(replicate);
    }
    return std::sqrt(rubin_total(within, per_imputation));
}

MaucEstimate mauc_with_se(const Rso2Series& series, double a, double b, int M, int B_boot,
                          int block_len, const RngStream& rng, const SmootherConfig& smoother) {
    MaucEstimate est = mauc(series, a, b, M, rng, smoother);
    est.se = mauc_se(est.per_imputation, series, a, b, M, B_boot, block_len, rng, smoother);
    est.B_boot = B_boot;
    est.block_len = effective_block_len(block_len, series.size());
    return est;
}

SlopeEstimate slope(const Rso2Series& series, int M, const RngStream& rng,
                    const SmootherConfig& smoother) {
    if (M < 1) throw std::invalid_argument("slope: M must be >= 1");
    if (series.size() < 3)
        throw std::invalid_argument("slope: need at least 3 distinct time points");
    const SplineSolver solver(series.times, smoother);

    SlopeEstimate est;
    est.M = M;
    est.per_imputation.reserve(M);
    est.intercepts.reserve(M);
    std::vector<double> fitted;
    for (int m = 1; m <= M; ++m) {
        const ImputedSeries imp = impute(series, m, rng);
        const SplineFit fit = solver.fit(imp.values);
        double intercept = 0.0;
        est.per_imputation.push_back(slope_of_fit(solver, fit, fitted, &intercept));
        est.intercepts.push_back(intercept);
    }
    est.value = pooled_mean(est.per_imputation);
    return est;
}

double slope_se(const std::vector<double>& per_imputation, const std::vector<double>& intercepts,
                const Rso2Series& series, int M, int B_boot, int block_len, const RngStream& rng,
                const SmootherConfig& smoother) {
    if (M < 2 || static_cast<int>(per_imputation.size()) != M || intercepts.size() != per_imputation.size())
        throw std::invalid_argument("slope_se: need per-imputation slopes/intercepts, M >= 2");
    check_bootstrap_args(B_boot);

    const SplineSolver solver(series.times, smoother);
    const std::size_t n = series.size();
    const int len = effective_block_len(block_len, n);
    const auto plans = draw_block_plans(n, B_boot, len, rng.child("boot-slope"));

    std::vector<double> within(M, 0.0);
    std::vector<double> replicate(B_boot);
    std::vector<double> residuals(n), resampled(n), fitted;
    for (int m = 1; m <= M; ++m) {
        const ImputedSeries imp = impute(series, m, rng);
        const double b0 = intercepts[m - 1];
        const double b1 = per_imputation[m - 1];
        for (std::size_t k = 0; k < n; ++k)
            residuals[k] = imp.values[k] - (b0 + b1 * series.times[k]);
        for (int bb = 0; bb < B_boot; ++bb) {
            const auto& plan = plans[bb];
            for (std::size_t k = 0; k < n; ++k)
                resampled[k] = b0 + b1 * series.times[k] + residuals[plan[k]];
            const SplineFit fit = solver.fit(resampled);
            replicate[bb] = slope_of_fit(solver, fit, fitted, nullptr);
        }
        within[m - 1] = sample_variance(replicate);
    }
    return std::sqrt(rubin_total(within, per_imputation));
}

SlopeEstimate slope_with_se(const Rso2Series& series, int M, int B_boot, int block_len,
                            const RngStream& rng, const SmootherConfig& smoother) {
    SlopeEstimate est = slope(series, M, rng, smoother);
    est.se = slope_se(est.per_imputation, est.intercepts, series, M, B_boot, block_len, rng,
                      smoother);
    est.B_boot = B_boot;
    est.block_len = effective_block_len(block_len, series.size());
    return est;
}

BaselineEstimate sample_mean_baseline(const Rso2Series& series, int B_boot, int block_len,
                                      const RngStream& rng) {
    if (series.empty()) throw std::invalid_argument("sample_mean_baseline: empty series");
    check_bootstrap_args(B_boot);
    const std::size_t n = series.size();
    const int len = effective_block_len(block_len, n);
    RngStream stream = rng.child("boot-mean");

    BaselineEstimate est;
    est.value = mean_of(series.values);
    std::vector<double> replicate(B_boot);
    for (int bb = 0; bb < B_boot; ++bb) {
        const auto plan = moving_block_indices(n, len, stream);
        double s = 0.0;
        for (std::uint32_t k : plan) s += series.values[k];
        replicate[bb] = s / static_cast<double>(n);
    }
    est.se = std::sqrt(sample_variance(replicate));
    return est;
}

BaselineEstimate naive_slope_baseline(const Rso2Series& series, int B_boot, int block_len,
                                      const RngStream& rng) {
    check_bootstrap_args(B_boot);
    const std::size_t n = series.size();
    if (n < 3) throw std::invalid_argument("naive_slope_baseline: need at least 3 points");
    const int len = effective_block_len(block_len, n);
    RngStream stream = rng.child("boot-naive-slope");

    const OlsLine line = ols_line(series.times, series.values);
    std::vector<double> residuals(n);
    for (std::size_t k = 0; k < n; ++k)
        residuals[k] = series.values[k] - (line.intercept + line.slope * series.times[k]);

    BaselineEstimate est;
    est.value = line.slope;
    std::vector<double> replicate(B_boot), resampled(n);
    for (int bb = 0; bb < B_boot; ++bb) {
        const auto plan = moving_block_indices(n, len, stream);
        for (std::size_t k = 0; k < n; ++k)
            resampled[k] = line.intercept + line.slope * series.times[k] + residuals[plan[k]];
        replicate[bb] = ols_line(series.times, resampled).slope;
    }
    est.se = std::sqrt(sample_variance(replicate));
    return est;
}

}  // namespace rso2stat
