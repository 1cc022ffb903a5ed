#include "rso2stat/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "rso2stat/estimators.hpp"
#include "rso2stat/parallel.hpp"
#include "rso2stat/permtest.hpp"
#include "rso2stat/spline.hpp"

namespace rso2stat {

namespace {

using nlohmann::json;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

std::vector<double> ar1_series(std::size_t n, double phi, double marginal_sd, RngStream& rng) {
    std::vector<double> x(n);
    const double innov_sd = marginal_sd * std::sqrt(1.0 - phi * phi);
    double state = marginal_sd * rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = state;
        state = phi * state + innov_sd * rng.normal();
    }
    return x;
}

std::vector<double> load_residual_file(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(std::stod(line));
    }
    return out;
}

PeriodSpec parse_period(const json& j, const std::string& where) {
    PeriodSpec spec;
    if (!j.is_object()) throw std::invalid_argument("scenario: " + where + " must be a table");
    for (const auto& [key, value] : j.items()) {
        if (key == "mean") spec.mean = value.get<double>();
        else if (key == "slope") spec.slope = value.get<double>();
        else if (key == "sd") spec.noise_sd = value.get<double>();
        else if (key == "censor_target") spec.censor_target = value.get<double>();
        else if (key == "amplitude") spec.amplitude = value.get<double>();
        else if (key == "n_points") spec.n_points = value.get<int>();
        else if (key == "cadence_s") spec.cadence_s = value.get<double>();
        else if (key == "shape") spec.shape = value.get<std::vector<double>>();
        else throw std::invalid_argument("scenario: unknown key '" + where + "." + key + "'");
    }
    if (spec.n_points < 8) throw std::invalid_argument("scenario: " + where + ".n_points must be >= 8");
    if (spec.cadence_s <= 0) throw std::invalid_argument("scenario: " + where + ".cadence_s must be > 0");
    if (spec.noise_sd < 0) throw std::invalid_argument("scenario: " + where + ".sd must be >= 0");
    if (!spec.shape.empty() && spec.shape.size() < 4)
        throw std::invalid_argument("scenario: " + where + ".shape needs at least 4 control points");
    return spec;
}

json scenario_echo(const ScenarioDoc& doc) {
    return json{{"kind", doc.kind},     {"name", doc.name},     {"statistic", doc.statistic},
                {"n_reps", doc.n_reps}, {"M", doc.M},           {"G", doc.G},
                {"M_test", doc.M_test}, {"B_boot", doc.B_boot}, {"block_len", doc.block_len},
                {"seed", doc.seed}};
}

/// Per-replicate cells of one bias-table case.
struct BiasCells {
    std::vector<double> prop_pre, prop_post, prop_diff;
    std::vector<double> base_pre, base_post, base_diff;
    std::vector<double> censor_pre, censor_post;

    explicit BiasCells(int n)
        : prop_pre(n), prop_post(n), prop_diff(n), base_pre(n), base_post(n), base_diff(n),
          censor_pre(n), censor_post(n) {}
};

json bias_row(const std::string& case_name, const std::string& row, double truth,
              std::span<const double> prop, std::span<const double> base) {
    return json{{"case", case_name},
                {"row", row},
                {"truth", truth},
                {"proposed_bias_mean", mean_of(prop)},
                {"proposed_bias_sd", std::sqrt(sample_variance(prop))},
                {"baseline_bias_mean", mean_of(base)},
                {"baseline_bias_sd", std::sqrt(sample_variance(base))}};
}

void subtract_truth(std::vector<double>& cells, double truth) {
    for (double& x : cells) x -= truth;
}

/// Collects the three rows (pre / post / diff) of one case into CSV + JSON.
struct BiasTable {
    std::string csv;
    json rows = json::array();

    explicit BiasTable(const char* proposed_col, const char* baseline_col) {
        csv = "case,row,truth,censor_target,censor_realized,";
        csv += std::string(proposed_col) + "_bias_mean," + proposed_col + "_bias_sd," +
               baseline_col + "_bias_mean," + baseline_col + "_bias_sd\n";
    }

    void add_case(const ScenarioCase& c, double truth_pre, double truth_post, BiasCells& cells) {
        subtract_truth(cells.prop_pre, truth_pre);
        subtract_truth(cells.base_pre, truth_pre);
        subtract_truth(cells.prop_post, truth_post);
        subtract_truth(cells.base_post, truth_post);
        subtract_truth(cells.prop_diff, truth_post - truth_pre);
        subtract_truth(cells.base_diff, truth_post - truth_pre);

        json row = bias_row(c.name, "pre", truth_pre, cells.prop_pre, cells.base_pre);
        row["censor_target"] = c.pre.censor_target;
        row["censor_realized"] = mean_of(cells.censor_pre);
        append(row, true);
        row = bias_row(c.name, "post", truth_post, cells.prop_post, cells.base_post);
        row["censor_target"] = c.post.censor_target;
        row["censor_realized"] = mean_of(cells.censor_post);
        append(row, true);
        row = bias_row(c.name, "diff", truth_post - truth_pre, cells.prop_diff, cells.base_diff);
        append(row, false);
    }

private:
    void append(const json& row, bool with_censoring) {
        rows.push_back(row);
        csv += row["case"].get<std::string>() + "," + row["row"].get<std::string>() + "," +
               fmt(row["truth"].get<double>()) + ",";
        if (with_censoring)
            csv += fmt(row["censor_target"].get<double>()) + "," +
                   fmt(row["censor_realized"].get<double>());
        else
            csv += ",";
        csv += "," + fmt(row["proposed_bias_mean"].get<double>()) + "," +
               fmt(row["proposed_bias_sd"].get<double>()) + "," +
               fmt(row["baseline_bias_mean"].get<double>()) + "," +
               fmt(row["baseline_bias_sd"].get<double>()) + "\n";
    }
};

}  // namespace

ScenarioDoc parse_scenario(const json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("scenario: expected a table at top level");
    ScenarioDoc out;
    json defaults = json::object();

    for (const auto& [key, value] : doc.items()) {
        if (key == "kind") out.kind = value.get<std::string>();
        else if (key == "name") out.name = value.get<std::string>();
        else if (key == "statistic") out.statistic = value.get<std::string>();
        else if (key == "n_reps") out.n_reps = value.get<int>();
        else if (key == "M") out.M = value.get<int>();
        else if (key == "G") out.G = value.get<int>();
        else if (key == "M_test") out.M_test = value.get<int>();
        else if (key == "B_boot") out.B_boot = value.get<int>();
        else if (key == "block_len") out.block_len = value.get<int>();
        else if (key == "detection_limit") out.detection_limit = value.get<double>();
        else if (key == "gap_s") out.gap_s = value.get<double>();
        else if (key == "seed") out.seed = value.get<std::uint64_t>();
        else if (key == "alphas") out.alphas = value.get<std::vector<double>>();
        else if (key == "defaults") defaults = value;
        else if (key == "residual") {
            for (const auto& [rk, rv] : value.items()) {
                if (rk == "phi") out.residual.phi = rv.get<double>();
                else if (rk == "band") out.residual.band = rv.get<int>();
                else if (rk == "source_length") out.residual.source_length = rv.get<int>();
                else if (rk == "source_file") out.residual.source_file = rv.get<std::string>();
                else throw std::invalid_argument("scenario: unknown key 'residual." + rk + "'");
            }
        } else if (key == "smoother") {
            json wrapper = {{"smoother", value}};
            AnalysisConfig tmp = parse_analysis_config(wrapper);
            out.smoother = tmp.smoother;
        } else if (key == "cases") {
            if (!value.is_array())
                throw std::invalid_argument("scenario: 'cases' must be an array of tables");
        } else {
            throw std::invalid_argument("scenario: unknown key '" + key + "'");
        }
    }

    if (out.kind != "table1" && out.kind != "table2" && out.kind != "table3" &&
        out.kind != "figures")
        throw std::invalid_argument("scenario: kind must be table1|table2|table3|figures");
    if (out.name.empty()) out.name = out.kind;
    if (out.statistic != "mauc" && out.statistic != "slope")
        throw std::invalid_argument("scenario: statistic must be mauc|slope");
    if (out.n_reps < 1) throw std::invalid_argument("scenario: n_reps must be >= 1");
    if (out.alphas.empty()) out.alphas = {0.01, 0.02, 0.03, 0.04, 0.05, 0.075, 0.10, 0.15, 0.20};
    for (double a : out.alphas)
        if (a <= 0.0 || a > 1.0) throw std::invalid_argument("scenario: alphas must lie in (0, 1]");

    if (!doc.contains("cases") || !doc["cases"].is_array() || doc["cases"].empty())
        throw std::invalid_argument("scenario: needs at least one [[cases]] entry");

    auto merged_period = [&](const json& case_json, const char* period,
                             const std::string& where) -> PeriodSpec {
        json j = defaults;
        if (case_json.contains(period))
            for (const auto& [k, v] : case_json.at(period).items()) j[k] = v;
        return parse_period(j, where);
    };

    for (const auto& case_json : doc["cases"]) {
        ScenarioCase c;
        c.name = case_json.value("name", "case" + std::to_string(out.cases.size() + 1));
        c.role = case_json.value("role", "");
        c.pre = merged_period(case_json, "pre", c.name + ".pre");
        c.post = merged_period(case_json, "post", c.name + ".post");
        for (const auto& [k, v] : case_json.items()) {
            (void)v;
            if (k != "name" && k != "role" && k != "pre" && k != "post")
                throw std::invalid_argument("scenario: unknown key '" + c.name + "." + k + "'");
        }
        out.cases.push_back(std::move(c));
    }
    if (out.kind == "figures")
        for (const auto& c : out.cases)
            if (c.role != "null" && c.role != "alt")
                throw std::invalid_argument("scenario: figures case '" + c.name +
                                            "' needs role = null|alt");
    return out;
}

const std::vector<double>& default_shape_profile() {
    // plateau with a sustained trough; shifted to the table regimes, the
    // trough floor sits near limit/2 so sub-limit values spread over the
    // whole (0, limit) range instead of hugging the limit
    static const std::vector<double> profile = {4.6, 5.0, 2.8, -9.6, -10.4, -9.2, 3.4, 5.0};
    return profile;
}

std::vector<double> shape_curve(std::span<const double> control, std::span<const double> x) {
    const std::size_t m = control.size();
    if (m < 4) throw std::invalid_argument("shape_curve: need at least 4 control points");
    const double h = 1.0 / static_cast<double>(m - 1);

    // natural cubic spline: tridiagonal solve for knot second derivatives
    std::vector<double> second(m, 0.0), diag(m, 0.0), rhs(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        diag[i] = 4.0 * h;
        rhs[i] = 6.0 * ((control[i + 1] - 2.0 * control[i] + control[i - 1]) / h);
    }
    for (std::size_t i = 2; i + 1 < m; ++i) {
        const double w = h / diag[i - 1];
        diag[i] -= w * h;
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = m - 2; i >= 1; --i) {
        second[i] = (rhs[i] - h * second[i + 1]) / diag[i];
        if (i == 1) break;
    }

    std::vector<double> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double xi = std::clamp(x[k], 0.0, 1.0);
        const auto seg = std::min<std::size_t>(static_cast<std::size_t>(xi / h), m - 2);
        const double x0 = static_cast<double>(seg) * h;
        const double a = (x0 + h - xi) / h;
        const double b = (xi - x0) / h;
        out[k] = a * control[seg] + b * control[seg + 1] +
                 ((a * a * a - a) * second[seg] + (b * b * b - b) * second[seg + 1]) * h * h / 6.0;
    }
    return out;
}

std::vector<double> period_template(const PeriodSpec& spec, std::span<const double> times) {
    const std::size_t n = times.size();
    std::vector<double> x(n);
    const double t0 = times.front();
    const double span = times.back() - times.front();
    for (std::size_t k = 0; k < n; ++k) x[k] = (times[k] - t0) / span;

    const std::vector<double>& control = spec.shape.empty() ? default_shape_profile() : spec.shape;
    const std::vector<double> curve = shape_curve(control, x);

    // exact grid detrend, then exact targets
    const OlsLine line = ols_line(times, curve);
    const double tbar = mean_of(times);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double detrended = curve[k] - (line.intercept + line.slope * times[k]);
        out[k] = spec.mean + spec.slope * (times[k] - tbar) + spec.amplitude * detrended;
    }
    return out;
}

SimContext::SimContext(const ScenarioCase& scenario_case, const ResidualSpec& residual,
                       double detection_limit, double gap_s, const RngStream& scenario_rng)
    : case_(scenario_case), detection_limit_(detection_limit) {
    const PeriodSpec& pre = case_.pre;
    const PeriodSpec& post = case_.post;

    times_pre_.resize(pre.n_points);
    for (int k = 0; k < pre.n_points; ++k) times_pre_[k] = k * pre.cadence_s;
    const double pre_end = times_pre_.back();
    const double post_start = pre_end + gap_s;
    times_post_.resize(post.n_points);
    for (int k = 0; k < post.n_points; ++k) times_post_[k] = post_start + k * post.cadence_s;
    window_ = {pre_end + 0.5 * pre.cadence_s, post_start - 0.5 * post.cadence_s};

    template_pre_ = period_template(pre, times_pre_);
    template_post_ = period_template(post, times_post_);

    std::vector<double> source;
    if (!residual.source_file.empty()) {
        source = load_residual_file(residual.source_file);
    } else {
        RngStream src_rng = scenario_rng.child("lpb-source");
        source = ar1_series(residual.source_length, residual.phi, 1.0, src_rng);
    }
    model_ = fit_lpb(source, residual.band);
    factor_pre_ = lpb_factor(model_, times_pre_.size());
    factor_post_ = lpb_factor(model_, times_post_.size());
}

std::pair<Session, LatentTruth> SimContext::generate(std::uint64_t replicate_id,
                                                     const RngStream& rng) const {
    const RngStream base = rng.child("replicate", replicate_id);
    RngStream rng_pre = base.child("pre-noise");
    RngStream rng_post = base.child("post-noise");

    LatentTruth truth;
    truth.template_pre = template_pre_;
    truth.template_post = template_post_;

    const std::vector<double> noise_pre = lpb_resample(model_, factor_pre_, rng_pre);
    const std::vector<double> noise_post = lpb_resample(model_, factor_post_, rng_post);
    truth.latent_pre.resize(times_pre_.size());
    truth.latent_post.resize(times_post_.size());
    for (std::size_t k = 0; k < times_pre_.size(); ++k)
        truth.latent_pre[k] = template_pre_[k] + case_.pre.noise_sd * noise_pre[k];
    for (std::size_t k = 0; k < times_post_.size(); ++k)
        truth.latent_post[k] = template_post_[k] + case_.post.noise_sd * noise_post[k];

    Session session;
    session.subject_id = case_.name + "-r" + std::to_string(replicate_id);
    session.window = window_;
    session.pre = make_series(times_pre_, truth.latent_pre, detection_limit_);
    session.post = make_series(times_post_, truth.latent_post, detection_limit_);
    return {std::move(session), std::move(truth)};
}

std::pair<Session, LatentTruth> generate_session(const ScenarioCase& scenario_case,
                                                 const ResidualSpec& residual,
                                                 double detection_limit, double gap_s,
                                                 std::uint64_t replicate_id,
                                                 const RngStream& rng) {
    const SimContext ctx(scenario_case, residual, detection_limit, gap_s, rng);
    return ctx.generate(replicate_id, rng);
}

SimulationOutput run_table1(const ScenarioDoc& doc, int workers) {
    const RngStream scenario_rng(doc.seed);
    BiasTable table("mauc", "sample_mean");

    for (const ScenarioCase& c : doc.cases) {
        const RngStream case_rng = scenario_rng.child(c.name);
        const SimContext ctx(c, doc.residual, doc.detection_limit, doc.gap_s, case_rng);
        BiasCells cells(doc.n_reps);

        parallel_for(static_cast<std::size_t>(doc.n_reps), workers, [&](std::size_t r) {
            auto [session, truth] = ctx.generate(r + 1, case_rng.child("gen"));
            const RngStream rng = case_rng.child("est", r + 1);
            const auto& pre = session.pre;
            const auto& post = session.post;
            cells.prop_pre[r] =
                mauc(pre, pre.span_start(), pre.span_end(), doc.M, rng.child("pre"), doc.smoother)
                    .value;
            cells.prop_post[r] = mauc(post, post.span_start(), post.span_end(), doc.M,
                                      rng.child("post"), doc.smoother)
                                     .value;
            cells.base_pre[r] = mean_of(pre.values);
            cells.base_post[r] = mean_of(post.values);
            cells.prop_diff[r] = cells.prop_post[r] - cells.prop_pre[r];
            cells.base_diff[r] = cells.base_post[r] - cells.base_pre[r];
            cells.censor_pre[r] = censoring_fraction(pre);
            cells.censor_post[r] = censoring_fraction(post);
        });

        table.add_case(c, c.pre.mean, c.post.mean, cells);
    }

    SimulationOutput out;
    out.kind = doc.kind;
    out.files.emplace_back(doc.name + ".csv", table.csv);
    out.summary = json{{"scenario", scenario_echo(doc)}, {"rows", table.rows}};
    return out;
}

SimulationOutput run_table2(const ScenarioDoc& doc, int workers) {
    const RngStream scenario_rng(doc.seed);
    BiasTable table("slope", "naive_slope");

    for (const ScenarioCase& c : doc.cases) {
        const RngStream case_rng = scenario_rng.child(c.name);
        const SimContext ctx(c, doc.residual, doc.detection_limit, doc.gap_s, case_rng);
        BiasCells cells(doc.n_reps);

        parallel_for(static_cast<std::size_t>(doc.n_reps), workers, [&](std::size_t r) {
            auto [session, truth] = ctx.generate(r + 1, case_rng.child("gen"));
            const RngStream rng = case_rng.child("est", r + 1);
            const auto& pre = session.pre;
            const auto& post = session.post;
            cells.prop_pre[r] = slope(pre, doc.M, rng.child("pre"), doc.smoother).value;
            cells.prop_post[r] = slope(post, doc.M, rng.child("post"), doc.smoother).value;
            cells.base_pre[r] = ols_line(pre.times, pre.values).slope;
            cells.base_post[r] = ols_line(post.times, post.values).slope;
            cells.prop_diff[r] = cells.prop_post[r] - cells.prop_pre[r];
            cells.base_diff[r] = cells.base_post[r] - cells.base_pre[r];
            cells.censor_pre[r] = censoring_fraction(pre);
            cells.censor_post[r] = censoring_fraction(post);
        });

        table.add_case(c, c.pre.slope, c.post.slope, cells);
    }

    SimulationOutput out;
    out.kind = doc.kind;
    out.files.emplace_back(doc.name + ".csv", table.csv);
    out.summary = json{{"scenario", scenario_echo(doc)}, {"rows", table.rows}};
    return out;
}

SimulationOutput run_table3(const ScenarioDoc& doc, int workers) {
    const RngStream scenario_rng(doc.seed);
    std::string csv = "case,statistic,truth,mc_sd,se_mean,se_sd,se_over_sd,censor_realized\n";
    json rows = json::array();

    for (const ScenarioCase& c : doc.cases) {
        const RngStream case_rng = scenario_rng.child(c.name);
        const SimContext ctx(c, doc.residual, doc.detection_limit, doc.gap_s, case_rng);

        std::vector<double> mauc_est(doc.n_reps), mauc_se_est(doc.n_reps);
        std::vector<double> slope_est(doc.n_reps), slope_se_est(doc.n_reps);
        std::vector<double> censor(doc.n_reps);

        parallel_for(static_cast<std::size_t>(doc.n_reps), workers, [&](std::size_t r) {
            auto [session, truth] = ctx.generate(r + 1, case_rng.child("gen"));
            const RngStream rng = case_rng.child("est", r + 1);
            // single-period calibration: the pre segment carries the spec
            const auto& s = session.pre;
            const MaucEstimate me = mauc_with_se(s, s.span_start(), s.span_end(), doc.M,
                                                 doc.B_boot, doc.block_len, rng.child("mauc"),
                                                 doc.smoother);
            const SlopeEstimate se = slope_with_se(s, doc.M, doc.B_boot, doc.block_len,
                                                   rng.child("slope"), doc.smoother);
            mauc_est[r] = me.value;
            mauc_se_est[r] = me.se;
            slope_est[r] = se.value;
            slope_se_est[r] = se.se;
            censor[r] = censoring_fraction(s);
        });

        const double censor_mean = mean_of(censor);
        auto add_row = [&](const std::string& stat, double truth, std::span<const double> est,
                           std::span<const double> ses) {
            const double mc_sd = std::sqrt(sample_variance(est));
            const double se_mean = mean_of(ses);
            const double se_sd = std::sqrt(sample_variance(ses));
            const double ratio = mc_sd > 0.0 ? se_mean / mc_sd : 0.0;
            rows.push_back(json{{"case", c.name},
                                {"statistic", stat},
                                {"truth", truth},
                                {"mc_sd", mc_sd},
                                {"se_mean", se_mean},
                                {"se_sd", se_sd},
                                {"se_over_sd", ratio},
                                {"censor_realized", censor_mean}});
            csv += c.name + "," + stat + "," + fmt(truth) + "," + fmt(mc_sd) + "," + fmt(se_mean) +
                   "," + fmt(se_sd) + "," + fmt(ratio) + "," + fmt(censor_mean) + "\n";
        };
        add_row("mauc", c.pre.mean, mauc_est, mauc_se_est);
        add_row("slope", c.pre.slope, slope_est, slope_se_est);
    }

    SimulationOutput out;
    out.kind = doc.kind;
    out.files.emplace_back(doc.name + ".csv", csv);
    out.summary = json{{"scenario", scenario_echo(doc)}, {"rows", rows}};
    return out;
}

SimulationOutput run_figures(const ScenarioDoc& doc, int workers) {
    const RngStream scenario_rng(doc.seed);
    const bool mauc_stat = doc.statistic == "mauc";
    const std::string proposed_name = mauc_stat ? "mauc_perm" : "slope_perm";
    const std::string baseline_name = mauc_stat ? "t_test" : "naive_slope_test";

    SimulationOutput out;
    out.kind = doc.kind;
    json cases_summary = json::array();

    for (const ScenarioCase& c : doc.cases) {
        const RngStream case_rng = scenario_rng.child(c.name);
        const SimContext ctx(c, doc.residual, doc.detection_limit, doc.gap_s, case_rng);

        std::vector<double> p_prop(doc.n_reps), p_base(doc.n_reps);
        parallel_for(static_cast<std::size_t>(doc.n_reps), workers, [&](std::size_t r) {
            auto [session, truth] = ctx.generate(r + 1, case_rng.child("gen"));
            const RngStream rng = case_rng.child("test", r + 1);
            PermTestOptions opts;
            opts.workers = 1;  // replicates already fan out
            if (mauc_stat) {
                p_prop[r] =
                    mauc_perm_test(session, doc.G, doc.M_test, rng.child("proposed"), doc.smoother, opts)
                        .p_value;
                p_base[r] = t_test_baseline(session).p_value;
            } else {
                p_prop[r] =
                    slope_perm_test(session, doc.G, doc.M_test, rng.child("proposed"), doc.smoother, opts)
                        .p_value;
                p_base[r] =
                    naive_slope_test(session, doc.B_boot, doc.block_len, rng.child("baseline"))
                        .p_value;
            }
        });

        auto rejection_rate = [&](std::span<const double> ps, double alpha) {
            std::size_t count = 0;
            for (double p : ps)
                if (p < alpha) ++count;
            return static_cast<double>(count) / static_cast<double>(ps.size());
        };

        std::string csv = "alpha,rejection_rate,method\n";
        json curve = json::array();
        for (double alpha : doc.alphas) {
            const double rp = rejection_rate(p_prop, alpha);
            const double rb = rejection_rate(p_base, alpha);
            csv += fmt(alpha) + "," + fmt(rp) + "," + proposed_name + "\n";
            csv += fmt(alpha) + "," + fmt(rb) + "," + baseline_name + "\n";
            curve.push_back(json{{"alpha", alpha},
                                 {"proposed", rp},
                                 {"baseline", rb}});
        }
        out.files.emplace_back(doc.name + "_" + c.name + ".csv", csv);
        cases_summary.push_back(json{{"case", c.name},
                                     {"role", c.role},
                                     {"proposed_method", proposed_name},
                                     {"baseline_method", baseline_name},
                                     {"curve", curve}});
    }

    out.summary = json{{"scenario", scenario_echo(doc)}, {"cases", cases_summary}};
    return out;
}

SimulationOutput run_simulation(const ScenarioDoc& doc, int workers) {
    if (doc.kind == "table1") return run_table1(doc, workers);
    if (doc.kind == "table2") return run_table2(doc, workers);
    if (doc.kind == "table3") return run_table3(doc, workers);
    return run_figures(doc, workers);
}

}  // namespace rso2stat
