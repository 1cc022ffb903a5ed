#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "oracles.hpp"
#include "rso2stat/estimators.hpp"
#include "rso2stat/permtest.hpp"
#include "rso2stat/rng.hpp"

using namespace rso2stat;

namespace {

const SmootherConfig kSm{};

Session session_of(std::vector<double> pre_vals, std::vector<double> post_vals,
                   double limit = 15.0) {
    Session s;
    s.subject_id = "T";
    std::vector<double> tp(pre_vals.size()), tq(post_vals.size());
    for (std::size_t k = 0; k < tp.size(); ++k) tp[k] = 30.0 * static_cast<double>(k);
    const double post0 = tp.back() + 1800.0;
    for (std::size_t k = 0; k < tq.size(); ++k) tq[k] = post0 + 30.0 * static_cast<double>(k);
    s.window = {tp.back() + 15.0, post0 - 15.0};
    s.pre = make_series(std::move(tp), std::move(pre_vals), limit);
    s.post = make_series(std::move(tq), std::move(post_vals), limit);
    return s;
}

Session noisy_null_session(std::size_t n, std::uint64_t seed, double mean = 24.0) {
    RngStream rng(seed);
    std::vector<double> pre(n), post(n);
    for (auto& v : pre) v = mean + 2.0 * rng.normal();
    for (auto& v : post) v = mean + 2.0 * rng.normal();
    return session_of(std::move(pre), std::move(post));
}

}  // namespace

TEST_CASE("identical pre/post values give a null-looking MAUC test") {
    RngStream rng(5);
    std::vector<double> vals(60);
    for (auto& v : vals) v = 25.0 + 2.0 * rng.normal();
    const Session s = session_of(vals, vals);

    const PermTestResult res = mauc_perm_test(s, 200, 4, RngStream(11), kSm);
    CHECK(std::abs(res.delta_obs) < 0.5);
    CHECK(res.p_value >= 0.9);
    CHECK(res.delta_perm.size() == 200);
    CHECK_FALSE(res.degenerate);
}

TEST_CASE("degenerate constant sessions report p = 1 with the flag") {
    const Session s = session_of(std::vector<double>(40, 30.0), std::vector<double>(40, 30.0));
    const PermTestResult m = mauc_perm_test(s, 150, 3, RngStream(1), kSm);
    CHECK(m.degenerate);
    CHECK(m.p_value == 1.0);
    for (double d : m.delta_perm) CHECK(d == m.delta_perm.front());

    const PermTestResult sl = slope_perm_test(s, 150, 3, RngStream(1), kSm);
    CHECK(sl.degenerate);
    CHECK(sl.p_value == 1.0);
    CHECK(std::abs(sl.delta_obs) < 1e-8);
}

TEST_CASE("MAUC p-value is invariant to a location shift of all values") {
    const Session s = noisy_null_session(50, 77);
    Session shifted = s;
    for (auto& v : shifted.pre.values) v += 12.5;
    for (auto& v : shifted.post.values) v += 12.5;

    const PermTestResult a = mauc_perm_test(s, 200, 3, RngStream(4), kSm);
    const PermTestResult b = mauc_perm_test(shifted, 200, 3, RngStream(4), kSm);
    CHECK(a.p_value == b.p_value);
}

TEST_CASE("permutation tests are deterministic across worker counts") {
    const Session s = noisy_null_session(40, 3);
    PermTestOptions serial, pooled;
    serial.workers = 1;
    pooled.workers = 3;
    const PermTestResult a = mauc_perm_test(s, 120, 3, RngStream(9), kSm, serial);
    const PermTestResult b = mauc_perm_test(s, 120, 3, RngStream(9), kSm, pooled);
    CHECK(a.p_value == b.p_value);
    CHECK(a.delta_perm == b.delta_perm);

    const PermTestResult c = slope_perm_test(s, 120, 3, RngStream(9), kSm, serial);
    const PermTestResult d = slope_perm_test(s, 120, 3, RngStream(9), kSm, pooled);
    CHECK(c.p_value == d.p_value);
    CHECK(c.delta_perm == d.delta_perm);
}

TEST_CASE("slope permutation deltas are centered under exchangeability") {
    const Session s = noisy_null_session(45, 13);
    const int G = 400;
    const PermTestResult res = slope_perm_test(s, G, 3, RngStream(2), kSm);
    const double sd = std::sqrt(sample_variance(res.delta_perm));
    CHECK(std::abs(mean_of(res.delta_perm)) < 3.0 * sd / std::sqrt(static_cast<double>(G)));
}

TEST_CASE("a real shift is detected by the MAUC test") {
    RngStream rng(31);
    std::vector<double> pre(60), post(60);
    for (auto& v : pre) v = 22.0 + 1.5 * rng.normal();
    for (auto& v : post) v = 30.0 + 1.5 * rng.normal();
    const Session s = session_of(std::move(pre), std::move(post));
    const PermTestResult res = mauc_perm_test(s, 300, 3, RngStream(8), kSm);
    CHECK(res.delta_obs > 5.0);
    CHECK(res.p_value < 0.05);
}

TEST_CASE("argument validation") {
    const Session s = noisy_null_session(30, 1);
    CHECK_THROWS_AS(mauc_perm_test(s, 99, 3, RngStream(1), kSm), std::invalid_argument);
    CHECK_THROWS_AS(mauc_perm_test(s, 100, 1, RngStream(1), kSm), std::invalid_argument);
}

TEST_CASE("corrected p-value uses the (count+1)/(G+1) form") {
    const Session s = noisy_null_session(30, 22);
    PermTestOptions plain, corrected;
    corrected.corrected_p = true;
    const PermTestResult a = mauc_perm_test(s, 100, 3, RngStream(6), kSm, plain);
    const PermTestResult b = mauc_perm_test(s, 100, 3, RngStream(6), kSm, corrected);
    CHECK(a.delta_perm == b.delta_perm);
    const double count = a.p_value * a.G;
    CHECK(b.p_value == doctest::Approx((count + 1.0) / (a.G + 1.0)).epsilon(1e-12));
    CHECK(b.p_value > 0.0);
}

TEST_CASE("Welch t-test baseline") {
    SUBCASE("identical segments") {
        const Session s = session_of(std::vector<double>{20, 21, 22, 23, 24, 25, 26, 27},
                                     std::vector<double>{20, 21, 22, 23, 24, 25, 26, 27});
        const BaselineTestResult r = t_test_baseline(s);
        CHECK(r.delta == 0.0);
        CHECK(r.p_value > 0.99);
    }
    SUBCASE("disjoint ranges") {
        RngStream rng(3);
        std::vector<double> a(30), b(30);
        for (auto& v : a) v = 20.0 + 0.01 * rng.normal();
        for (auto& v : b) v = 40.0 + 0.01 * rng.normal();
        const BaselineTestResult r = t_test_baseline(session_of(std::move(a), std::move(b)));
        CHECK(r.p_value < 1e-6);
    }
    SUBCASE("matches the textbook formula on a 6-point example") {
        const std::vector<double> a{20.0, 22.0, 25.0};
        const std::vector<double> b{26.0, 29.0, 31.0};
        const Session s = session_of(a, b);
        const BaselineTestResult r = t_test_baseline(s);
        const oracles::WelchT w = oracles::welch_t(a, b);
        boost::math::students_t dist(w.df);
        const double expected = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(w.t)));
        CHECK(r.p_value == doctest::Approx(expected).epsilon(1e-12));
        CHECK(r.delta == doctest::Approx(mean_of(b) - mean_of(a)).epsilon(1e-12));
    }
}

TEST_CASE("naive slope test") {
    SUBCASE("identical segments under noise") {
        RngStream rng(71);
        std::vector<double> vals(40);
        for (auto& v : vals) v = 25.0 + rng.normal();
        const Session s = session_of(vals, vals);
        const BaselineTestResult r = naive_slope_test(s, 100, 0, RngStream(2));
        CHECK(r.p_value > 0.5);
    }
    SUBCASE("strong opposite trends, p agrees with the normal-tail oracle") {
        RngStream rng(72);
        std::vector<double> pre(50), post(50);
        for (std::size_t k = 0; k < 50; ++k) {
            pre[k] = 40.0 - 0.01 * 30.0 * k + 0.5 * rng.normal();
            post[k] = 25.0 + 0.01 * 30.0 * k + 0.5 * rng.normal();
        }
        const Session s = session_of(std::move(pre), std::move(post));
        const BaselineTestResult r = naive_slope_test(s, 200, 0, RngStream(2));
        CHECK(r.p_value < 0.01);
        CHECK(r.delta > 0.0);

        const BaselineEstimate bp = naive_slope_baseline(s.pre, 200, 0, RngStream(2).child("pre"));
        const BaselineEstimate bq = naive_slope_baseline(s.post, 200, 0, RngStream(2).child("post"));
        const double z = (bq.value - bp.value) / std::hypot(bp.se, bq.se);
        CHECK(r.p_value == doctest::Approx(std::erfc(std::abs(z) / std::sqrt(2.0))).epsilon(1e-12));
    }
    SUBCASE("delta sign always matches the slope difference") {
        for (std::uint64_t seed : {1ull, 5ull, 9ull}) {
            const Session s = noisy_null_session(35, seed);
            const BaselineTestResult r = naive_slope_test(s, 100, 0, RngStream(seed));
            const double sp = ols_line(s.pre.times, s.pre.values).slope;
            const double sq = ols_line(s.post.times, s.post.values).slope;
            if (r.delta != 0.0) CHECK(std::signbit(r.delta) == std::signbit(sq - sp));
        }
    }
}
