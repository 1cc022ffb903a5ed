#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "rso2stat/estimators.hpp"
#include "rso2stat/lpb.hpp"
#include "rso2stat/rng.hpp"

using namespace rso2stat;

namespace {

std::vector<double> ar1(std::size_t n, double phi, double sd, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> x(n);
    const double innov = sd * std::sqrt(1.0 - phi * phi);
    double state = sd * rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = state;
        state = phi * state + innov * rng.normal();
    }
    return x;
}

}  // namespace

TEST_CASE("iid input: unit variance survives the whiten/recolor loop") {
    RngStream rng(10);
    std::vector<double> noise(1500);
    for (auto& v : noise) v = rng.normal();
    const LpbModel model = fit_lpb(noise, 8);
    CHECK(model.gamma[0] == doctest::Approx(1.0).epsilon(0.1));

    RngStream draw(3);
    std::vector<double> acc;
    for (int b = 0; b < 200; ++b) {
        const auto x = lpb_resample(model, 400, draw);
        for (double v : x) acc.push_back(v);
    }
    CHECK(sample_variance(acc) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("AR(1) resamples keep lag-0 and lag-1 autocovariance") {
    const double phi = 0.7;
    const auto source = ar1(2000, phi, 1.0, 2024);
    const LpbModel model = fit_lpb(source, 20);
    const LpbFactor factor = lpb_factor(model, 1000);

    RngStream rng(8);
    double lag0 = 0.0, lag1 = 0.0;
    const int reps = 200;
    for (int b = 0; b < reps; ++b) {
        const auto x = lpb_resample(model, factor, rng);
        lag0 += oracles::sample_autocov(x, 0);
        lag1 += oracles::sample_autocov(x, 1);
    }
    lag0 /= reps;
    lag1 /= reps;
    CHECK(lag0 == doctest::Approx(oracles::ar1_autocov(phi, 1.0, 0)).epsilon(0.15));
    CHECK(lag1 == doctest::Approx(oracles::ar1_autocov(phi, 1.0, 1)).epsilon(0.15));
}

TEST_CASE("resample autocovariances track the tapered band at lags 0..2") {
    const auto source = ar1(2000, 0.6, 1.2, 314);
    const LpbModel model = fit_lpb(source, 16);
    const LpbFactor factor = lpb_factor(model, 800);
    RngStream rng(21);
    double acc[3] = {0.0, 0.0, 0.0};
    const int reps = 200;
    for (int b = 0; b < reps; ++b) {
        const auto x = lpb_resample(model, factor, rng);
        for (int lag = 0; lag < 3; ++lag) acc[lag] += oracles::sample_autocov(x, lag);
    }
    for (int lag = 0; lag < 3; ++lag)
        CHECK(acc[lag] / reps == doctest::Approx(model.gamma[lag]).epsilon(0.15));
}

TEST_CASE("whiten then recolor reproduces the source") {
    const auto source = ar1(600, 0.5, 2.0, 77);
    const LpbModel model = fit_lpb(source, 15);
    std::vector<double> centered(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) centered[i] = source[i] - model.source_mean;

    const auto e = lpb_whiten(model.source_factor, centered);
    const auto back = lpb_recolor(model.source_factor, e);
    for (std::size_t i = 0; i < centered.size(); ++i)
        CHECK(back[i] == doctest::Approx(centered[i]).epsilon(1e-8));
}

TEST_CASE("covariance stays positive definite with the enforced floor") {
    // a nearly unit-root AR(1) with a wide band pushes the raw tapered
    // estimate toward indefiniteness
    const auto source = ar1(800, 0.95, 1.0, 5);
    const LpbModel model = fit_lpb(source, 60);

    const std::size_t n = 150;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t lag = i > j ? i - j : j - i;
            if (lag <= static_cast<std::size_t>(model.band)) cov(i, j) = model.gamma[lag];
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    CHECK(eig.eigenvalues().minCoeff() >= model.floor_value - 1e-9);

    // and the factorization works at longer output sizes too
    CHECK_NOTHROW(lpb_factor(model, 2500));
}

TEST_CASE("resample mean is centered") {
    const auto source = ar1(1000, 0.6, 1.5, 9);
    const LpbModel model = fit_lpb(source, 12);
    const LpbFactor factor = lpb_factor(model, 500);
    RngStream rng(4);
    std::vector<double> means(500);
    for (auto& m : means) m = mean_of(lpb_resample(model, factor, rng));
    const double sd = std::sqrt(sample_variance(means));
    CHECK(std::abs(mean_of(means)) < 3.0 * sd / std::sqrt(500.0));
}

TEST_CASE("resampling is deterministic under a fixed stream") {
    const auto source = ar1(500, 0.4, 1.0, 3);
    const LpbModel model = fit_lpb(source, 10);
    RngStream a(42), b(42);
    CHECK(lpb_resample(model, 300, a) == lpb_resample(model, 300, b));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(fit_lpb(std::vector<double>(50, 1.0), 5), std::invalid_argument);
    const auto source = ar1(200, 0.5, 1.0, 1);
    CHECK_THROWS_AS(fit_lpb(source, 100), std::invalid_argument);
    CHECK_THROWS_AS(fit_lpb(source, 1), std::invalid_argument);
    CHECK_THROWS_AS(fit_lpb(std::vector<double>(200, 3.14), 10), std::invalid_argument);
}
