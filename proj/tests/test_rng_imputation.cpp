#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "rso2stat/estimators.hpp"
#include "rso2stat/imputation.hpp"
#include "rso2stat/rng.hpp"
#include "rso2stat/series.hpp"

using namespace rso2stat;

namespace {

Rso2Series constant_series(std::size_t n, double value, double limit = 15.0) {
    std::vector<double> t(n), v(n, value);
    for (std::size_t k = 0; k < n; ++k) t[k] = 30.0 * static_cast<double>(k);
    return make_series(std::move(t), std::move(v), limit);
}

}  // namespace

TEST_CASE("RngStream determinism and path independence") {
    RngStream a(42);
    RngStream b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c1 = RngStream(42).child("perm", 3).child("impute", 5);
    RngStream c2 = RngStream(42).child("perm", 3).child("impute", 5);
    RngStream c3 = RngStream(42).child("perm", 3).child("impute", 6);
    RngStream c4 = RngStream(42).child("boot", 3).child("impute", 5);
    CHECK(c1.key() == c2.key());
    CHECK(c1.key() != c3.key());
    CHECK(c1.key() != c4.key());
    for (int i = 0; i < 20; ++i) CHECK(c1.next_u64() == c2.next_u64());

    // consuming draws does not perturb child derivation
    RngStream d1(7);
    RngStream d2(7);
    d2.next_u64();
    d2.next_u64();
    CHECK(d1.child("x", 1).key() == d2.child("x", 1).key());
}

TEST_CASE("RngStream draw ranges") {
    RngStream rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);

    auto perm = rng.permutation(30);
    std::set<std::uint32_t> seen(perm.begin(), perm.end());
    CHECK(seen.size() == 30);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 29);

    // normal draws have roughly the right first two moments
    std::vector<double> z(20000);
    for (auto& v : z) v = rng.normal();
    CHECK(std::abs(mean_of(z)) < 0.03);
    CHECK(sample_variance(z) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("impute leaves uncensored data untouched") {
    const Rso2Series s = constant_series(50, 30.0);
    for (int m : {1, 2, 7}) {
        const ImputedSeries imp = impute(s, m, RngStream(9));
        CHECK(imp.values == s.values);
    }
}

TEST_CASE("impute is bit-identical for the same (seed, path, m)") {
    Rso2Series s = constant_series(40, 15.0);  // fully censored
    const RngStream rng = RngStream(123).child("perm", 4);
    const ImputedSeries a = impute(s, 3, rng);
    const ImputedSeries b = impute(s, 3, RngStream(123).child("perm", 4));
    CHECK(a.values == b.values);
    const ImputedSeries c = impute(s, 4, rng);
    CHECK(a.values != c.values);
}

TEST_CASE("imputed values lie strictly inside (0, limit)") {
    Rso2Series s = constant_series(500, 15.0);
    const ImputedSeries imp = impute(s, 1, RngStream(5));
    for (double v : imp.values) {
        CHECK(v > 0.0);
        CHECK(v < 15.0);
    }
}

TEST_CASE("fully censored imputation obeys the law of large numbers") {
    Rso2Series s = constant_series(10000, 15.0);
    const ImputedSeries imp = impute(s, 1, RngStream(2024));
    CHECK(mean_of(imp.values) == doctest::Approx(7.5).epsilon(0.2 / 7.5));
}

TEST_CASE("impute_set basics") {
    SUBCASE("identical copies when nothing is censored") {
        const Rso2Series s = constant_series(60, 42.0);
        const auto set = impute_set(s, 5, RngStream(1));
        REQUIRE(set.size() == 5);
        for (const auto& imp : set) CHECK(imp.values == s.values);
    }
    SUBCASE("M < 2 is rejected") {
        const Rso2Series s = constant_series(60, 42.0);
        CHECK_THROWS_AS(impute_set(s, 1, RngStream(1)), std::invalid_argument);
    }
    SUBCASE("between-copy variance matches U(0, 15)") {
        // 30% censored: indices 0,3,6,... replaced after clamping
        std::vector<double> t(300), v(300);
        for (std::size_t k = 0; k < 300; ++k) {
            t[k] = 30.0 * static_cast<double>(k);
            v[k] = (k % 10 < 3) ? 10.0 : 30.0;
        }
        const Rso2Series s = make_series(std::move(t), std::move(v), 15.0);
        const int M = 50;
        const auto set = impute_set(s, M, RngStream(77));
        double var_sum = 0.0;
        std::size_t censored_slots = 0;
        std::vector<double> slot(M);
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!s.censored[k]) continue;
            for (int m = 0; m < M; ++m) slot[m] = set[m].values[k];
            var_sum += sample_variance(slot);
            ++censored_slots;
        }
        const double mean_var = var_sum / static_cast<double>(censored_slots);
        CHECK(mean_var == doctest::Approx(15.0 * 15.0 / 12.0).epsilon(0.15));
    }
    SUBCASE("distinct imputations differ") {
        Rso2Series s = constant_series(80, 15.0);
        const auto set = impute_set(s, 6, RngStream(3));
        for (std::size_t i = 0; i < set.size(); ++i)
            for (std::size_t j = i + 1; j < set.size(); ++j)
                CHECK(set[i].values != set[j].values);
    }
}
