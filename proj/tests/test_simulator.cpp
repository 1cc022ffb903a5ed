#include <doctest.h>

#include <cmath>

#include "rso2stat/estimators.hpp"
#include "rso2stat/simulator.hpp"

using namespace rso2stat;
using nlohmann::json;

namespace {

PeriodSpec period(double mean, double slope, double sd, int n = 120, double cadence = 30.0) {
    PeriodSpec p;
    p.mean = mean;
    p.slope = slope;
    p.noise_sd = sd;
    p.n_points = n;
    p.cadence_s = cadence;
    return p;
}

ScenarioCase simple_case(const std::string& name, PeriodSpec pre, PeriodSpec post) {
    ScenarioCase c;
    c.name = name;
    c.pre = std::move(pre);
    c.post = std::move(post);
    return c;
}

ResidualSpec quick_residual() {
    ResidualSpec r;
    r.phi = 0.5;
    r.band = 10;
    r.source_length = 400;
    return r;
}

}  // namespace

TEST_CASE("period templates hit the mean and slope targets exactly") {
    std::vector<double> times(240);
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = 30.0 * static_cast<double>(k);

    PeriodSpec spec = period(17.709, -0.005, 3.0);
    spec.amplitude = 1.3;
    const auto values = period_template(spec, times);
    CHECK(std::abs(mean_of(values) - 17.709) < 1e-6);
    const OlsLine line = ols_line(times, values);
    CHECK(std::abs(line.slope - (-0.005)) < 1e-9);

    // the template is not just the line: the shape contributes
    double max_dev = 0.0;
    const double tbar = mean_of(times);
    for (std::size_t k = 0; k < times.size(); ++k)
        max_dev = std::max(max_dev,
                           std::abs(values[k] - (17.709 - 0.005 * (times[k] - tbar))));
    CHECK(max_dev > 1.0);
}

TEST_CASE("zero-noise sessions equal the template wherever it clears the limit") {
    const ScenarioCase c = simple_case("zero", period(22.0, 0.0, 0.0), period(24.0, 0.0, 0.0));
    auto [session, truth] = generate_session(c, quick_residual(), 15.0, 1800.0, 1, RngStream(4));
    for (std::size_t k = 0; k < session.pre.size(); ++k) {
        if (truth.template_pre[k] >= 15.0)
            CHECK(session.pre.values[k] == doctest::Approx(truth.template_pre[k]).epsilon(1e-12));
        else
            CHECK(session.pre.values[k] == 15.0);
    }
}

TEST_CASE("latent truth bookkeeping: clamping only raises the sample mean") {
    const ScenarioCase c = simple_case("clamp", period(17.0, 0.0, 3.0), period(21.0, 0.0, 3.0));
    const SimContext ctx(c, quick_residual(), 15.0, 1800.0, RngStream(99));
    for (std::uint64_t r = 1; r <= 10; ++r) {
        auto [session, truth] = ctx.generate(r, RngStream(99).child("gen"));
        const double observed = mean_of(session.pre.values);
        const double latent = mean_of(truth.latent_pre);
        CHECK(observed >= latent - 1e-12);
        const bool any_censored = session.pre.censored_count() > 0;
        if (any_censored)
            CHECK(observed > latent);
        else
            CHECK(observed == doctest::Approx(latent).epsilon(1e-12));
    }
}

TEST_CASE("generated sessions validate and reuse the ingest invariants") {
    const ScenarioCase c = simple_case("inv", period(16.0, 0.0, 4.0), period(20.0, 0.0, 4.0));
    auto [session, truth] = generate_session(c, quick_residual(), 15.0, 1800.0, 7, RngStream(1));
    CHECK_NOTHROW(session.pre.validate());
    CHECK_NOTHROW(session.post.validate());
    CHECK(session.pre.span_end() < session.window.start_s);
    CHECK(session.post.span_start() > session.window.end_s);
    CHECK(censoring_fraction(session.pre) > censoring_fraction(session.post));
}

TEST_CASE("scenario parsing validates structure") {
    json doc = {{"kind", "table1"},
                {"n_reps", 10},
                {"cases", json::array({json{{"name", "c1"},
                                            {"pre", {{"mean", 17.709}}},
                                            {"post", {{"mean", 17.709}}}}})}};
    const ScenarioDoc parsed = parse_scenario(doc);
    CHECK(parsed.cases.size() == 1);
    CHECK(parsed.cases[0].pre.mean == 17.709);

    json bad = doc;
    bad["kind"] = "table9";
    CHECK_THROWS_AS(parse_scenario(bad), std::invalid_argument);

    json empty = doc;
    empty["cases"] = json::array();
    CHECK_THROWS_AS(parse_scenario(empty), std::invalid_argument);

    json unknown = doc;
    unknown["cases"][0]["pre"]["bogus"] = 1;
    CHECK_THROWS_WITH_AS(parse_scenario(unknown), doctest::Contains("bogus"),
                         std::invalid_argument);

    json fig = doc;
    fig["kind"] = "figures";
    CHECK_THROWS_AS(parse_scenario(fig), std::invalid_argument);  // missing roles
}

TEST_CASE("defaults table merges into every period") {
    json doc = {{"kind", "table1"},
                {"n_reps", 3},
                {"defaults", {{"n_points", 64}, {"cadence_s", 30}, {"sd", 2.5}}},
                {"cases", json::array({json{{"name", "c1"},
                                            {"pre", {{"mean", 20.0}}},
                                            {"post", {{"mean", 22.0}, {"sd", 1.0}}}}})}};
    const ScenarioDoc parsed = parse_scenario(doc);
    CHECK(parsed.cases[0].pre.n_points == 64);
    CHECK(parsed.cases[0].pre.noise_sd == 2.5);
    CHECK(parsed.cases[0].post.noise_sd == 1.0);
}

TEST_CASE("zero-censoring control: both estimators nearly coincide") {
    ScenarioDoc doc;
    doc.kind = "table1";
    doc.name = "control";
    doc.n_reps = 40;
    doc.M = 4;
    doc.seed = 314;
    doc.residual = quick_residual();
    doc.cases = {simple_case("control", period(35.0, 0.0, 2.0, 100), period(35.0, 0.0, 2.0, 100))};

    const SimulationOutput out = run_table1(doc, 1);
    REQUIRE(out.summary["rows"].size() == 3);
    for (const auto& row : out.summary["rows"]) {
        const double prop = row["proposed_bias_mean"].get<double>();
        const double base = row["baseline_bias_mean"].get<double>();
        CHECK(std::abs(prop) < 0.2);
        CHECK(std::abs(base) < 0.2);
        CHECK(std::abs(prop - base) < 0.1);
        if (row["row"] == "pre") CHECK(row["censor_realized"].get<double>() == 0.0);
    }
}

TEST_CASE("table outputs are deterministic and worker-count independent") {
    ScenarioDoc doc;
    doc.kind = "table2";
    doc.name = "det";
    doc.n_reps = 6;
    doc.M = 3;
    doc.seed = 2718;
    doc.residual = quick_residual();
    doc.cases = {simple_case("c", period(20.0, 0.001, 2.0, 80), period(20.0, 0.001, 2.0, 80))};

    const SimulationOutput a = run_table2(doc, 1);
    const SimulationOutput b = run_table2(doc, 4);
    CHECK(a.summary.dump() == b.summary.dump());
    CHECK(a.files == b.files);
}

TEST_CASE("run_figures: alpha = 1 rejects everything, output shape is right") {
    ScenarioDoc doc;
    doc.kind = "figures";
    doc.name = "figtest";
    doc.statistic = "mauc";
    doc.n_reps = 4;
    doc.G = 100;
    doc.M_test = 2;
    doc.seed = 5;
    doc.alphas = {0.05, 1.0};
    doc.residual = quick_residual();
    ScenarioCase null_case = simple_case("null", period(24.0, 0.0, 2.0, 60), period(24.0, 0.0, 2.0, 60));
    null_case.role = "null";
    doc.cases = {null_case};

    const SimulationOutput out = run_figures(doc, 1);
    REQUIRE(out.files.size() == 1);
    const auto& curve = out.summary["cases"][0]["curve"];
    REQUIRE(curve.size() == 2);
    CHECK(curve[1]["alpha"] == 1.0);
    CHECK(curve[1]["proposed"] == 1.0);
    CHECK(curve[1]["baseline"] == 1.0);
}

TEST_CASE("run_table3 reports SE calibration columns") {
    ScenarioDoc doc;
    doc.kind = "table3";
    doc.name = "t3";
    doc.n_reps = 8;
    doc.M = 3;
    doc.B_boot = 60;
    doc.seed = 11;
    doc.residual = quick_residual();
    doc.cases = {simple_case("c", period(25.0, 0.0, 1.5, 80), period(25.0, 0.0, 1.5, 80))};

    const SimulationOutput out = run_table3(doc, 1);
    REQUIRE(out.summary["rows"].size() == 2);
    for (const auto& row : out.summary["rows"]) {
        CHECK(row["mc_sd"].get<double>() > 0.0);
        CHECK(row["se_mean"].get<double>() > 0.0);
    }
}
