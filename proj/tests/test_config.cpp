#include <doctest.h>

#include "rso2stat/config.hpp"
#include "rso2stat/tomlmini.hpp"

using namespace rso2stat;
using nlohmann::json;

TEST_CASE("toml subset: scalars, tables, arrays") {
    const auto doc = parse_toml(R"(
# comment
M = 20
detection_limit = 15.0
corrected_p = false
name = "table one"

[smoother]
max_interior_knots = 40
lambda_log10_range = [-6, 8]

[residual]
phi = 0.6
)");
    CHECK(doc["M"] == 20);
    CHECK(doc["detection_limit"] == 15.0);
    CHECK(doc["corrected_p"] == false);
    CHECK(doc["name"] == "table one");
    CHECK(doc["smoother"]["max_interior_knots"] == 40);
    CHECK(doc["smoother"]["lambda_log10_range"][0] == -6);
    CHECK(doc["residual"]["phi"] == 0.6);
}

TEST_CASE("toml subset: arrays of tables with nested tables") {
    const auto doc = parse_toml(R"(
kind = "table1"
[[cases]]
name = "case1"
[cases.pre]
mean = 17.709
[cases.post]
mean = 17.709
[[cases]]
name = "case2"
[cases.pre]
mean = 17.709
shape = [1.0, 2.0, -3.5, 0.25]
)");
    REQUIRE(doc["cases"].size() == 2);
    CHECK(doc["cases"][0]["name"] == "case1");
    CHECK(doc["cases"][0]["pre"]["mean"] == 17.709);
    CHECK(doc["cases"][1]["pre"]["shape"][2] == -3.5);
}

TEST_CASE("toml subset: dotted keys and multiline arrays") {
    const auto doc = parse_toml("smoother.degree = 3\nalphas = [\n  0.01,\n  0.05, # note\n]\n");
    CHECK(doc["smoother"]["degree"] == 3);
    CHECK(doc["alphas"].size() == 2);
}

TEST_CASE("toml errors name the line and key") {
    CHECK_THROWS_WITH_AS(parse_toml("a = \n"), doctest::Contains("line 1"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_toml("a = 1\na = 2\n"), doctest::Contains("duplicate key 'a'"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_toml("a = [1, 2\n\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_toml("x = zzz\n"), std::invalid_argument);
}

TEST_CASE("analysis config: defaults validate, bad keys are named") {
    const AnalysisConfig defaults;
    CHECK_NOTHROW(validate_config(defaults));

    CHECK_THROWS_WITH_AS(parse_analysis_config(json{{"bogus", 1}}),
                         doctest::Contains("'bogus'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_analysis_config(json{{"M", 1}}), doctest::Contains("'M'"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_analysis_config(json{{"smoother", {{"degree", 2}}}}),
                         doctest::Contains("smoother.degree"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_analysis_config(json{{"B_boot", 10}}),
                         doctest::Contains("'B_boot'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_analysis_config(json{{"detection_limit", -3.0}}),
                         doctest::Contains("detection_limit"), std::invalid_argument);

    const AnalysisConfig cfg = parse_analysis_config(
        json{{"M", 10}, {"G", 200}, {"smoother", {{"max_interior_knots", 20}}}});
    CHECK(cfg.M == 10);
    CHECK(cfg.G == 200);
    CHECK(cfg.smoother.max_interior_knots == 20);
    CHECK(cfg.smoother.degree == 3);
}

TEST_CASE("config echo round-trips through JSON") {
    AnalysisConfig cfg;
    cfg.M = 7;
    cfg.block_len = 12;
    const AnalysisConfig back = parse_analysis_config(config_to_json(cfg));
    CHECK(back.M == 7);
    CHECK(back.block_len == 12);
    CHECK(back.smoother.grid_points == cfg.smoother.grid_points);
}

TEST_CASE("effective block length") {
    CHECK(effective_block_len(0, 1000) == 10);
    CHECK(effective_block_len(0, 27) == 3);
    CHECK(effective_block_len(5, 1000) == 5);
    CHECK(effective_block_len(50, 20) == 20);  // clamped to n
}
