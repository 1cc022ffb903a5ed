#include "rso2stat/lpb.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rso2stat/estimators.hpp"

namespace rso2stat {

namespace {

double taper_weight(int lag, int band) {
    const double half = 0.5 * band;
    const double k = static_cast<double>(lag);
    if (k <= half) return 1.0;
    if (k >= band) return 0.0;
    return (band - k) / (band - half);
}

double toeplitz_entry(const LpbModel& model, std::size_t lag) {
    return lag <= static_cast<std::size_t>(model.band) ? model.gamma[lag] : 0.0;
}

}  // namespace

LpbModel fit_lpb(std::span<const double> residuals, int band, double eigen_floor_eps) {
    const std::size_t n = residuals.size();
    if (n < 100) throw std::invalid_argument("fit_lpb: need at least 100 residuals");
    if (band < 2) throw std::invalid_argument("fit_lpb: band must be >= 2");
    if (static_cast<std::size_t>(band) >= n / 2)
        throw std::invalid_argument("fit_lpb: band must be < n / 2");

    LpbModel model;
    model.band = band;
    model.source_length = n;
    model.source_mean = mean_of(residuals);

    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = residuals[i] - model.source_mean;

    model.gamma.resize(band + 1);
    for (int lag = 0; lag <= band; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += centered[i] * centered[i + lag];
        model.gamma[lag] = taper_weight(lag, band) * s / static_cast<double>(n);
    }
    const double gamma0_raw = model.gamma[0];
    if (gamma0_raw <= 1e-14 * (1.0 + model.source_mean * model.source_mean))
        throw std::invalid_argument("fit_lpb: residuals have zero variance");

    // Spectral density of the tapered band; its minimum bounds every
    // eigenvalue of the Toeplitz covariance from below, at any length.
    double f_min = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 4096;
    for (int j = 0; j <= kGrid; ++j) {
        const double omega = std::numbers::pi * j / kGrid;
        double f = model.gamma[0];
        for (int lag = 1; lag <= band; ++lag)
            f += 2.0 * model.gamma[lag] * std::cos(lag * omega);
        f_min = std::min(f_min, f);
    }
    model.floor_value = eigen_floor_eps * gamma0_raw;
    if (f_min < model.floor_value) {
        model.diagonal_load = model.floor_value - f_min;
        model.gamma[0] += model.diagonal_load;
    }

    model.source_factor = lpb_factor(model, n);
    std::vector<double> raw = lpb_whiten(model.source_factor, centered);
    const double inno_mean = mean_of(raw);
    const double inno_sd = std::sqrt(sample_variance(raw));
    if (inno_sd <= 0.0) throw std::invalid_argument("fit_lpb: degenerate innovations");
    model.innovations.resize(n);
    for (std::size_t i = 0; i < n; ++i) model.innovations[i] = (raw[i] - inno_mean) / inno_sd;
    return model;
}

LpbFactor lpb_factor(const LpbModel& model, std::size_t n) {
    if (n == 0) throw std::invalid_argument("lpb_factor: empty output");
    const int band = model.band;
    LpbFactor factor;
    factor.bandwidth = band;
    factor.band = Eigen::MatrixXd::Zero(band + 1, static_cast<Eigen::Index>(n));

    // banded Cholesky of the symmetric Toeplitz matrix T(|i-j|)
    auto lower = [&](std::size_t i, std::size_t j) -> double& {
        return factor.band(static_cast<Eigen::Index>(i - j), static_cast<Eigen::Index>(j));
    };
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t i_hi = std::min(n - 1, j + static_cast<std::size_t>(band));
        for (std::size_t i = j; i <= i_hi; ++i) {
            double sum = toeplitz_entry(model, i - j);
            const std::size_t k_lo = (i > static_cast<std::size_t>(band)) ? i - band : 0;
            for (std::size_t k = k_lo; k < j; ++k) sum -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (sum <= 0.0)
                    throw std::runtime_error("lpb_factor: covariance not positive definite");
                lower(j, j) = std::sqrt(sum);
            } else {
                lower(i, j) = sum / lower(j, j);
            }
        }
    }
    return factor;
}

std::vector<double> lpb_whiten(const LpbFactor& factor, std::span<const double> series) {
    const std::size_t n = factor.size();
    if (series.size() != n) throw std::invalid_argument("lpb_whiten: length mismatch");
    const int band = factor.bandwidth;
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = series[i];
        const std::size_t d_hi = std::min<std::size_t>(band, i);
        for (std::size_t d = 1; d <= d_hi; ++d)
            sum -= factor.band(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i - d)) * e[i - d];
        e[i] = sum / factor.band(0, static_cast<Eigen::Index>(i));
    }
    return e;
}

std::vector<double> lpb_recolor(const LpbFactor& factor, std::span<const double> innovations) {
    const std::size_t n = factor.size();
    if (innovations.size() != n) throw std::invalid_argument("lpb_recolor: length mismatch");
    const int band = factor.bandwidth;
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        const std::size_t d_hi = std::min<std::size_t>(band, i);
        for (std::size_t d = 0; d <= d_hi; ++d)
            sum += factor.band(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(i - d)) *
                   innovations[i - d];
        x[i] = sum;
    }
    return x;
}

std::vector<double> lpb_resample(const LpbModel& model, const LpbFactor& factor, RngStream& rng) {
    const std::size_t n = factor.size();
    const std::size_t pool = model.innovations.size();
    std::vector<double> draws(n);
    for (std::size_t i = 0; i < n; ++i) draws[i] = model.innovations[rng.below(pool)];
    return lpb_recolor(factor, draws);
}

std::vector<double> lpb_resample(const LpbModel& model, std::size_t n_out, RngStream& rng) {
    const LpbFactor factor = lpb_factor(model, n_out);
    return lpb_resample(model, factor, rng);
}

}  // namespace rso2stat
