#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rso2stat/config.hpp"

namespace rso2stat {

/// Cubic B-spline basis on a normalized axis x in [0, 1]. Interior knots sit
/// at empirical quantiles of the data times; boundary knots are repeated
/// degree+1 times. Immutable and shared between fits on the same grid.
class SplineBasis {
public:
    SplineBasis(std::span<const double> times, const SmootherConfig& config);

    [[nodiscard]] int n_basis() const { return n_basis_; }
    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] double t_min() const { return t_min_; }
    [[nodiscard]] double t_max() const { return t_max_; }
    [[nodiscard]] double to_x(double t) const { return (t - t_min_) / (t_max_ - t_min_); }

    /// Knot averages; the abscissa at which coefficient j "lives".
    [[nodiscard]] double greville(int j) const;

    /// Interior knots mapped back to time units.
    [[nodiscard]] std::vector<double> interior_knots_time() const;

    /// Nonzero basis values at x: writes degree+1 entries into out and
    /// returns the index of the first nonzero basis function.
    int eval_nonzero(double x, double* out) const;

    /// Integral of each basis function over [xa, xb] (normalized axis),
    /// exact for the piecewise-cubic basis (Gauss-Legendre per interval).
    [[nodiscard]] Eigen::VectorXd basis_integrals(double xa, double xb) const;

    [[nodiscard]] const std::vector<double>& knots() const { return knots_; }

private:
    [[nodiscard]] int find_span(double x) const;

    std::vector<double> knots_;  // full vector, normalized
    int degree_;
    int n_basis_;
    double t_min_, t_max_;
};

/// A fitted penalized-spline smooth.
struct SplineFit {
    std::shared_ptr<const SplineBasis> basis;
    Eigen::VectorXd coefficients;
    double lambda = 0.0;
    double edf = 0.0;

    [[nodiscard]] double t_min() const { return basis->t_min(); }
    [[nodiscard]] double t_max() const { return basis->t_max(); }

    /// Value of the smooth at t. Throws std::domain_error outside
    /// [t_min, t_max]; the fit never extrapolates.
    [[nodiscard]] double evaluate(double t) const;

    /// Exact integral of the piecewise-cubic fit over [a, b] (time units).
    [[nodiscard]] double integrate(double a, double b) const;

    [[nodiscard]] std::vector<double> interior_knots() const { return basis->interior_knots_time(); }
};

/// Per-time-grid fitting machine. Construction factors everything that does
/// not depend on the response (basis rows, penalty, eigenstructure), so a
/// GCV-searched fit on new values for the same grid is cheap -- the shape of
/// the work in imputation loops, permutation tests and bootstrap resampling,
/// which all refit on a fixed grid.
///
/// Penalized criterion: sum (y_k - mu(t_k))^2 + lambda * |D c|^2 with D the
/// second divided difference of coefficients across Greville sites, so the
/// null space of the penalty is exactly the affine functions of t.
class SplineSolver {
public:
    SplineSolver(std::span<const double> times, const SmootherConfig& config);

    [[nodiscard]] int n() const { return static_cast<int>(times_.size()); }
    [[nodiscard]] int n_basis() const { return basis_->n_basis(); }
    [[nodiscard]] const SplineBasis& basis() const { return *basis_; }
    [[nodiscard]] const std::vector<double>& times() const { return times_; }

    /// Full fit: GCV grid search plus golden-section refinement.
    [[nodiscard]] SplineFit fit(std::span<const double> values) const;

    /// Fit at a fixed smoothing parameter.
    [[nodiscard]] SplineFit fit_at_lambda(std::span<const double> values, double lambda) const;

    /// GCV(lambda) = n RSS / (n - tr H)^2 for this grid and response.
    [[nodiscard]] double gcv(double lambda, std::span<const double> values) const;

    /// Trace of the hat matrix at lambda (response-independent).
    [[nodiscard]] double edf(double lambda) const;

    /// Fitted values at the grid's own times.
    void fitted_values(const SplineFit& fit, std::span<double> out) const;

    /// Basis integrals over a time interval; dot with fit.coefficients gives
    /// the integral of the smooth in percent-seconds.
    [[nodiscard]] Eigen::VectorXd time_basis_integrals(double a, double b) const;

private:
    struct Projection {
        Eigen::VectorXd z;  // response rotated into the orthonormal fit basis
        double yty = 0.0;
    };

    [[nodiscard]] Projection project(std::span<const double> values) const;
    [[nodiscard]] double gcv_of(const Projection& p, double lambda) const;
    [[nodiscard]] double choose_lambda(const Projection& p) const;
    [[nodiscard]] SplineFit finalize(const Projection& p, double lambda) const;

    std::vector<double> times_;
    SmootherConfig config_;
    std::shared_ptr<const SplineBasis> basis_;

    Eigen::MatrixXd row_values_;       // n x (degree+1) nonzero basis values
    std::vector<int> row_offset_;      // first basis index per data row
    Eigen::MatrixXd chol_lower_;       // L with B^T B = L L^T
    Eigen::MatrixXd eigvecs_;          // U from L^-1 Omega L^-T = U S U^T
    Eigen::VectorXd eigvals_;          // S, clamped at 0
    Eigen::MatrixXd coef_transform_;   // L^-T U: maps rotated solution to coefficients
};

/// One-shot conveniences (build a solver, fit, discard).
SplineFit fit_spline(std::span<const double> times, std::span<const double> values,
                     const SmootherConfig& config);
double gcv_score(double lambda, std::span<const double> times, std::span<const double> values,
                 const SmootherConfig& config);

}  // namespace rso2stat
