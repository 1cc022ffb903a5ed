#include "rso2stat/report.hpp"

#include <cmath>
#include <cstdio>

#include "rso2stat/imputation.hpp"
#include "rso2stat/spline.hpp"

namespace rso2stat {

namespace {

using nlohmann::json;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

json estimate_json(double value, double se) {
    return json{{"value", value}, {"se", se}};
}

}  // namespace

SessionAnalysis analyze_session(const Session& session, const AnalysisConfig& cfg,
                                const RngStream& rng) {
    SessionAnalysis out;
    out.subject_id = session.subject_id;

    const auto& pre = session.pre;
    const auto& post = session.post;
    out.censoring_pre = censoring_fraction(pre);
    out.censoring_post = censoring_fraction(post);

    out.mauc_pre = mauc_with_se(pre, pre.span_start(), pre.span_end(), cfg.M, cfg.B_boot,
                                cfg.block_len, rng.child("mauc-pre"), cfg.smoother);
    out.mauc_post = mauc_with_se(post, post.span_start(), post.span_end(), cfg.M, cfg.B_boot,
                                 cfg.block_len, rng.child("mauc-post"), cfg.smoother);
    out.delta_mauc = out.mauc_post.value - out.mauc_pre.value;

    out.slope_pre = slope_with_se(pre, cfg.M, cfg.B_boot, cfg.block_len, rng.child("slope-pre"),
                                  cfg.smoother);
    out.slope_post = slope_with_se(post, cfg.M, cfg.B_boot, cfg.block_len, rng.child("slope-post"),
                                   cfg.smoother);
    out.delta_slope = out.slope_post.value - out.slope_pre.value;

    PermTestOptions opts;
    opts.workers = cfg.workers;
    opts.corrected_p = cfg.corrected_p;
    out.mauc_test = mauc_perm_test(session, cfg.G, cfg.M_test, rng.child("test-mauc"),
                                   cfg.smoother, opts);
    out.slope_test = slope_perm_test(session, cfg.G, cfg.M_test, rng.child("test-slope"),
                                     cfg.smoother, opts);

    out.mean_pre = sample_mean_baseline(pre, cfg.B_boot, cfg.block_len, rng.child("baseline-pre"));
    out.mean_post =
        sample_mean_baseline(post, cfg.B_boot, cfg.block_len, rng.child("baseline-post"));
    out.mean_t_test = t_test_baseline(session);
    out.naive_pre = naive_slope_baseline(pre, cfg.B_boot, cfg.block_len, rng.child("baseline-pre"));
    out.naive_post =
        naive_slope_baseline(post, cfg.B_boot, cfg.block_len, rng.child("baseline-post"));
    out.naive_test = naive_slope_test(session, cfg.B_boot, cfg.block_len, rng.child("test-naive"));

    out.ok = true;
    return out;
}

json analysis_to_json(const std::vector<SessionAnalysis>& sessions, const AnalysisConfig& cfg,
                      std::uint64_t seed) {
    json list = json::array();
    for (const auto& s : sessions) {
        if (!s.ok) {
            list.push_back(json{{"subject_id", s.subject_id}, {"error", s.error}});
            continue;
        }
        json j{
            {"subject_id", s.subject_id},
            {"censoring_fraction", {{"pre", s.censoring_pre}, {"post", s.censoring_post}}},
            {"mauc",
             {{"pre", estimate_json(s.mauc_pre.value, s.mauc_pre.se)},
              {"post", estimate_json(s.mauc_post.value, s.mauc_post.se)},
              {"delta", s.delta_mauc},
              {"p_value", s.mauc_test.p_value},
              {"p_resolution", 1.0 / s.mauc_test.G},
              {"degenerate", s.mauc_test.degenerate}}},
            {"slope",
             {{"pre", estimate_json(s.slope_pre.value, s.slope_pre.se)},
              {"post", estimate_json(s.slope_post.value, s.slope_post.se)},
              {"delta", s.delta_slope},
              {"p_value", s.slope_test.p_value},
              {"p_resolution", 1.0 / s.slope_test.G},
              {"degenerate", s.slope_test.degenerate}}},
            {"baseline",
             {{"sample_mean",
               {{"pre", estimate_json(s.mean_pre.value, s.mean_pre.se)},
                {"post", estimate_json(s.mean_post.value, s.mean_post.se)},
                {"delta", s.mean_t_test.delta},
                {"p_value", s.mean_t_test.p_value}}},
              {"naive_slope",
               {{"pre", estimate_json(s.naive_pre.value, s.naive_pre.se)},
                {"post", estimate_json(s.naive_post.value, s.naive_post.se)},
                {"delta", s.naive_test.delta},
                {"p_value", s.naive_test.p_value}}}}},
        };
        list.push_back(std::move(j));
    }
    return json{{"config", config_to_json(cfg)}, {"seed", seed}, {"sessions", list}};
}

std::string analysis_to_csv(const std::vector<SessionAnalysis>& sessions) {
    std::string csv =
        "subject_id,censoring_pre,censoring_post,"
        "mauc_pre,mauc_pre_se,mauc_post,mauc_post_se,delta_mauc,p_mauc,"
        "slope_pre,slope_pre_se,slope_post,slope_post_se,delta_slope,p_slope,"
        "mean_pre,mean_pre_se,mean_post,mean_post_se,delta_mean,p_ttest,"
        "naive_slope_pre,naive_slope_pre_se,naive_slope_post,naive_slope_post_se,"
        "delta_naive_slope,p_naive_slope,error\n";
    for (const auto& s : sessions) {
        if (!s.ok) {
            csv += s.subject_id + ",,,,,,,,,,,,,,,,,,,,,,,,,,," + s.error + "\n";
            continue;
        }
        csv += s.subject_id + "," + fmt(s.censoring_pre) + "," + fmt(s.censoring_post) + "," +
               fmt(s.mauc_pre.value) + "," + fmt(s.mauc_pre.se) + "," + fmt(s.mauc_post.value) +
               "," + fmt(s.mauc_post.se) + "," + fmt(s.delta_mauc) + "," +
               fmt(s.mauc_test.p_value) + "," + fmt(s.slope_pre.value) + "," +
               fmt(s.slope_pre.se) + "," + fmt(s.slope_post.value) + "," + fmt(s.slope_post.se) +
               "," + fmt(s.delta_slope) + "," + fmt(s.slope_test.p_value) + "," +
               fmt(s.mean_pre.value) + "," + fmt(s.mean_pre.se) + "," + fmt(s.mean_post.value) +
               "," + fmt(s.mean_post.se) + "," + fmt(s.mean_t_test.delta) + "," +
               fmt(s.mean_t_test.p_value) + "," + fmt(s.naive_pre.value) + "," +
               fmt(s.naive_pre.se) + "," + fmt(s.naive_post.value) + "," + fmt(s.naive_post.se) +
               "," + fmt(s.naive_test.delta) + "," + fmt(s.naive_test.p_value) + ",\n";
    }
    return csv;
}

std::string session_curve_csv(const Session& session, const AnalysisConfig& cfg,
                              const RngStream& rng) {
    std::string csv = "segment,time_s,rso2,censored,mu_hat\n";
    // the curve reflects the same completed datasets the MAUC estimate used
    const auto add_segment = [&](const char* name, const Rso2Series& s, const RngStream& base) {
        const SplineSolver solver(s.times, cfg.smoother);
        std::vector<double> mu(s.size(), 0.0), fitted(s.size());
        for (int m = 1; m <= cfg.M; ++m) {
            const ImputedSeries imp = impute(s, m, base);
            const SplineFit fit = solver.fit(imp.values);
            solver.fitted_values(fit, fitted);
            for (std::size_t k = 0; k < s.size(); ++k) mu[k] += fitted[k];
        }
        for (std::size_t k = 0; k < s.size(); ++k) {
            csv += std::string(name) + "," + fmt(s.times[k]) + "," + fmt(s.values[k]) + "," +
                   (s.censored[k] ? "1" : "0") + "," + fmt(mu[k] / cfg.M) + "\n";
        }
    };
    add_segment("pre", session.pre, rng.child("mauc-pre"));
    add_segment("post", session.post, rng.child("mauc-post"));
    return csv;
}

}  // namespace rso2stat
