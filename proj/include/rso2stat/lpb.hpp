#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rso2stat/rng.hpp"

namespace rso2stat {

/// Banded lower Cholesky factor of the model covariance at some length.
/// band(d, j) holds L(j+d, j) for d = 0..bandwidth.
struct LpbFactor {
    Eigen::MatrixXd band;
    int bandwidth = 0;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(band.cols()); }
};

/// Linear-process-bootstrap model: banded, trapezoid-tapered autocovariance
/// of a centered source series, its Cholesky factor, and the whitened,
/// standardized source innovations that resampling draws from.
struct LpbModel {
    std::vector<double> gamma;   // tapered autocovariance, lags 0..band (after any flooring)
    int band = 0;
    double floor_value = 0.0;    // lower bound enforced on covariance eigenvalues
    double diagonal_load = 0.0;  // amount added to gamma[0] to enforce it, if any
    double source_mean = 0.0;
    std::size_t source_length = 0;
    LpbFactor source_factor;
    std::vector<double> innovations;  // standardized (mean 0, sd 1)
};

/// Estimate the model. Requires length >= 100 and 2 <= band < length / 2.
/// Taper weight is 1 up to band/2 and decays linearly to 0 at band. If the
/// tapered band's spectral density dips below eps * gamma_hat(0), the lag-0
/// term is loaded so the covariance minimum eigenvalue stays >= that floor.
LpbModel fit_lpb(std::span<const double> residuals, int band, double eigen_floor_eps = 1e-6);

/// Cholesky factor of the model covariance at an arbitrary output length.
LpbFactor lpb_factor(const LpbModel& model, std::size_t n);

/// e = L^-1 x (forward substitution). x must match the factor length.
std::vector<double> lpb_whiten(const LpbFactor& factor, std::span<const double> series);

/// x = L e.
std::vector<double> lpb_recolor(const LpbFactor& factor, std::span<const double> innovations);

/// Draw n_out innovations iid (with replacement) from the standardized pool
/// and recolor them with the supplied factor (factor.size() == n_out).
std::vector<double> lpb_resample(const LpbModel& model, const LpbFactor& factor, RngStream& rng);

/// Convenience: build the factor for n_out and resample.
std::vector<double> lpb_resample(const LpbModel& model, std::size_t n_out, RngStream& rng);

}  // namespace rso2stat
