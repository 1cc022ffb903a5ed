#include "rso2stat/permtest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "rso2stat/estimators.hpp"
#include "rso2stat/imputation.hpp"
#include "rso2stat/parallel.hpp"
#include "rso2stat/spline.hpp"

namespace rso2stat {

namespace {

void check_test_args(const Session& session, int G, int M) {
    if (G < 100) throw std::invalid_argument("permutation test: G must be >= 100");
    if (M < 2) throw std::invalid_argument("permutation test: M must be >= 2");
    if (session.pre.empty() || session.post.empty())
        throw std::invalid_argument("permutation test: both segments must be non-empty");
}

bool constant_uncensored(const Rso2Series& s) {
    if (s.censored_count() != 0) return false;
    return std::all_of(s.values.begin(), s.values.end(),
                       [&](double v) { return v == s.values.front(); });
}

double strict_exceedance_p(double delta_obs, const std::vector<double>& delta_perm,
                           bool corrected) {
    std::size_t count = 0;
    for (double d : delta_perm)
        if (std::abs(d) > std::abs(delta_obs)) ++count;
    if (corrected)
        return static_cast<double>(count + 1) / static_cast<double>(delta_perm.size() + 1);
    return static_cast<double>(count) / static_cast<double>(delta_perm.size());
}

/// Shared fixtures for one nested test: per-segment solvers plus the MAUC
/// integral weights over each segment's own span.
struct SegmentMachinery {
    SplineSolver solver;
    Eigen::VectorXd integrals;
    double width;

    SegmentMachinery(const Rso2Series& s, const SmootherConfig& cfg)
        : solver(s.times, cfg),
          integrals(solver.time_basis_integrals(s.span_start(), s.span_end())),
          width(s.span_end() - s.span_start()) {}

    [[nodiscard]] double mauc_of(std::span<const double> completed) const {
        return integrals.dot(solver.fit(completed).coefficients) / width;
    }

    [[nodiscard]] double slope_of(std::span<const double> completed,
                                  std::vector<double>& fitted_scratch) const {
        const SplineFit fit = solver.fit(completed);
        fitted_scratch.resize(solver.n());
        solver.fitted_values(fit, fitted_scratch);
        return ols_line(solver.times(), fitted_scratch).slope;
    }
};

Rso2Series with_values(const Rso2Series& base, std::vector<double> values,
                       std::vector<std::uint8_t> censored) {
    Rso2Series out;
    out.times = base.times;
    out.values = std::move(values);
    out.censored = std::move(censored);
    out.detection_limit = base.detection_limit;
    return out;
}

}  // namespace

PermTestResult mauc_perm_test(const Session& session, int G, int M, const RngStream& rng,
                              const SmootherConfig& smoother, const PermTestOptions& opts) {
    check_test_args(session, G, M);
    const Rso2Series& pre = session.pre;
    const Rso2Series& post = session.post;
    const std::size_t k_pre = pre.size();
    const std::size_t k_total = k_pre + post.size();

    const SegmentMachinery mpre(pre, smoother);
    const SegmentMachinery mpost(post, smoother);

    PermTestResult result;
    result.statistic_name = "MAUC";
    result.G = G;
    result.M = M;
    result.seed = rng.key();

    {
        const RngStream obs = rng.child("observed");
        std::vector<double> deltas(M);
        for (int m = 1; m <= M; ++m) {
            const ImputedSeries imp_pre = impute(pre, m, obs.child("pre"));
            const ImputedSeries imp_post = impute(post, m, obs.child("post"));
            deltas[m - 1] = mpost.mauc_of(imp_post.values) - mpre.mauc_of(imp_pre.values);
        }
        result.delta_obs = mean_of(deltas);
    }

    std::vector<double> pooled_values(k_total);
    std::vector<std::uint8_t> pooled_flags(k_total);
    std::copy(pre.values.begin(), pre.values.end(), pooled_values.begin());
    std::copy(post.values.begin(), post.values.end(), pooled_values.begin() + k_pre);
    std::copy(pre.censored.begin(), pre.censored.end(), pooled_flags.begin());
    std::copy(post.censored.begin(), post.censored.end(), pooled_flags.begin() + k_pre);

    const bool degenerate =
        std::all_of(pooled_values.begin(), pooled_values.end(),
                    [&](double v) { return v == pooled_values.front(); }) &&
        std::none_of(pooled_flags.begin(), pooled_flags.end(), [](std::uint8_t c) { return c != 0; });

    result.delta_perm.assign(G, 0.0);
    if (degenerate) {
        // every permutation reproduces the same constant series
        result.degenerate = true;
        result.p_value = 1.0;
        return result;
    }

    parallel_for(static_cast<std::size_t>(G), opts.workers, [&](std::size_t g) {
        RngStream stream = rng.child("perm", g + 1);
        const auto perm = stream.permutation(k_total);

        std::vector<double> vals_pre(k_pre), vals_post(k_total - k_pre);
        std::vector<std::uint8_t> flags_pre(k_pre), flags_post(k_total - k_pre);
        for (std::size_t j = 0; j < k_total; ++j) {
            if (j < k_pre) {
                vals_pre[j] = pooled_values[perm[j]];
                flags_pre[j] = pooled_flags[perm[j]];
            } else {
                vals_post[j - k_pre] = pooled_values[perm[j]];
                flags_post[j - k_pre] = pooled_flags[perm[j]];
            }
        }
        const Rso2Series series_pre = with_values(pre, std::move(vals_pre), std::move(flags_pre));
        const Rso2Series series_post =
            with_values(post, std::move(vals_post), std::move(flags_post));

        double sum = 0.0;
        for (int m = 1; m <= M; ++m) {
            const ImputedSeries imp_pre = impute(series_pre, m, stream.child("pre"));
            const ImputedSeries imp_post = impute(series_post, m, stream.child("post"));
            sum += mpost.mauc_of(imp_post.values) - mpre.mauc_of(imp_pre.values);
        }
        result.delta_perm[g] = sum / M;
    });

    result.p_value = strict_exceedance_p(result.delta_obs, result.delta_perm, opts.corrected_p);
    return result;
}

PermTestResult slope_perm_test(const Session& session, int G, int M, const RngStream& rng,
                               const SmootherConfig& smoother, const PermTestOptions& opts) {
    check_test_args(session, G, M);
    const Rso2Series& pre = session.pre;
    const Rso2Series& post = session.post;

    const SegmentMachinery mpre(pre, smoother);
    const SegmentMachinery mpost(post, smoother);

    PermTestResult result;
    result.statistic_name = "slope";
    result.G = G;
    result.M = M;
    result.seed = rng.key();

    {
        const RngStream obs = rng.child("observed");
        std::vector<double> deltas(M), fitted;
        for (int m = 1; m <= M; ++m) {
            const ImputedSeries imp_pre = impute(pre, m, obs.child("pre"));
            const ImputedSeries imp_post = impute(post, m, obs.child("post"));
            deltas[m - 1] =
                mpost.slope_of(imp_post.values, fitted) - mpre.slope_of(imp_pre.values, fitted);
        }
        result.delta_obs = mean_of(deltas);
    }

    result.delta_perm.assign(G, 0.0);
    if (constant_uncensored(pre) && constant_uncensored(post)) {
        result.degenerate = true;
        result.p_value = 1.0;
        return result;
    }

    parallel_for(static_cast<std::size_t>(G), opts.workers, [&](std::size_t g) {
        RngStream stream = rng.child("perm", g + 1);
        const auto perm_pre = stream.permutation(pre.size());
        const auto perm_post = stream.permutation(post.size());

        std::vector<double> vals_pre(pre.size()), vals_post(post.size());
        std::vector<std::uint8_t> flags_pre(pre.size()), flags_post(post.size());
        for (std::size_t j = 0; j < pre.size(); ++j) {
            vals_pre[j] = pre.values[perm_pre[j]];
            flags_pre[j] = pre.censored[perm_pre[j]];
        }
        for (std::size_t j = 0; j < post.size(); ++j) {
            vals_post[j] = post.values[perm_post[j]];
            flags_post[j] = post.censored[perm_post[j]];
        }
        const Rso2Series series_pre = with_values(pre, std::move(vals_pre), std::move(flags_pre));
        const Rso2Series series_post =
            with_values(post, std::move(vals_post), std::move(flags_post));

        double sum = 0.0;
        std::vector<double> fitted;
        for (int m = 1; m <= M; ++m) {
            const ImputedSeries imp_pre = impute(series_pre, m, stream.child("pre"));
            const ImputedSeries imp_post = impute(series_post, m, stream.child("post"));
            sum += mpost.slope_of(imp_post.values, fitted) - mpre.slope_of(imp_pre.values, fitted);
        }
        result.delta_perm[g] = sum / M;
    });

    result.p_value = strict_exceedance_p(result.delta_obs, result.delta_perm, opts.corrected_p);
    return result;
}

BaselineTestResult t_test_baseline(const Session& session) {
    const auto& a = session.pre.values;
    const auto& b = session.post.values;
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("t_test_baseline: need >= 2 points per segment");

    const double n1 = static_cast<double>(a.size());
    const double n2 = static_cast<double>(b.size());
    const double v1 = sample_variance(a);
    const double v2 = sample_variance(b);

    BaselineTestResult out;
    out.delta = mean_of(b) - mean_of(a);
    const double se2 = v1 / n1 + v2 / n2;
    if (se2 <= 0.0) {
        out.p_value = out.delta == 0.0 ? 1.0 : 0.0;
        return out;
    }
    const double t = out.delta / std::sqrt(se2);
    const double df = se2 * se2 /
                      (v1 * v1 / (n1 * n1 * (n1 - 1.0)) + v2 * v2 / (n2 * n2 * (n2 - 1.0)));
    boost::math::students_t dist(df);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    return out;
}

BaselineTestResult naive_slope_test(const Session& session, int B_boot, int block_len,
                                    const RngStream& rng) {
    const BaselineEstimate pre =
        naive_slope_baseline(session.pre, B_boot, block_len, rng.child("pre"));
    const BaselineEstimate post =
        naive_slope_baseline(session.post, B_boot, block_len, rng.child("post"));

    BaselineTestResult out;
    out.delta = post.value - pre.value;
    const double se = std::hypot(pre.se, post.se);
    if (se <= 0.0) {
        out.p_value = out.delta == 0.0 ? 1.0 : 0.0;
        return out;
    }
    const double z = out.delta / se;
    out.p_value = std::erfc(std::abs(z) / std::numbers::sqrt2);
    return out;
}

}  // namespace rso2stat
