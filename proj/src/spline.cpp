#include "rso2stat/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rso2stat {

namespace {

// 3-point Gauss-Legendre on [-1, 1]; exact through degree 5.
constexpr double kGlNode = 0.7745966692414834;  // sqrt(3/5)
constexpr double kGlW0 = 8.0 / 9.0;
constexpr double kGlW1 = 5.0 / 9.0;

double quantile_type7(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

SplineBasis::SplineBasis(std::span<const double> times, const SmootherConfig& config)
    : degree_(config.degree) {
    const std::size_t n = times.size();
    if (n < 8) throw std::invalid_argument("fit_spline: need at least 8 observations");
    if (degree_ != 3) throw std::invalid_argument("SplineBasis: only cubic splines supported");
    for (std::size_t k = 1; k < n; ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("fit_spline: times must be strictly increasing");

    t_min_ = times.front();
    t_max_ = times.back();

    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = to_x(times[k]);

    const int interior =
        std::min(config.max_interior_knots, static_cast<int>(n) / 4);
    knots_.reserve(static_cast<std::size_t>(interior) + 2 * (degree_ + 1));
    for (int i = 0; i <= degree_; ++i) knots_.push_back(0.0);
    for (int j = 1; j <= interior; ++j) {
        const double p = static_cast<double>(j) / static_cast<double>(interior + 1);
        knots_.push_back(quantile_type7(x, p));
    }
    for (int i = 0; i <= degree_; ++i) knots_.push_back(1.0);
    n_basis_ = static_cast<int>(knots_.size()) - degree_ - 1;
}

double SplineBasis::greville(int j) const {
    double sum = 0.0;
    for (int i = 1; i <= degree_; ++i) sum += knots_[static_cast<std::size_t>(j) + i];
    return sum / degree_;
}

std::vector<double> SplineBasis::interior_knots_time() const {
    std::vector<double> out;
    const std::size_t hi = knots_.size() - degree_ - 1;
    for (std::size_t i = degree_ + 1; i < hi; ++i)
        out.push_back(t_min_ + knots_[i] * (t_max_ - t_min_));
    return out;
}

int SplineBasis::find_span(double x) const {
    const int lo = degree_;
    const int hi = static_cast<int>(knots_.size()) - degree_ - 2;  // last valid span
    if (x >= knots_[static_cast<std::size_t>(hi) + 1]) return hi;
    if (x <= knots_[lo]) return lo;
    int a = lo, b = hi;
    while (a < b) {
        const int mid = (a + b + 1) / 2;
        if (knots_[mid] <= x)
            a = mid;
        else
            b = mid - 1;
    }
    return a;
}

int SplineBasis::eval_nonzero(double x, double* out) const {
    const int span = find_span(x);
    double left[8], right[8];
    out[0] = 1.0;
    for (int j = 1; j <= degree_; ++j) {
        left[j] = x - knots_[static_cast<std::size_t>(span) + 1 - j];
        right[j] = knots_[static_cast<std::size_t>(span) + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
    return span - degree_;
}

Eigen::VectorXd SplineBasis::basis_integrals(double xa, double xb) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_basis_);
    // breakpoints: xa, interior knots inside (xa, xb), xb
    std::vector<double> breaks{xa};
    const std::size_t hi = knots_.size() - degree_ - 1;
    for (std::size_t i = degree_ + 1; i < hi; ++i)
        if (knots_[i] > xa && knots_[i] < xb) breaks.push_back(knots_[i]);
    breaks.push_back(xb);

    double vals[8];
    for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
        const double mid = 0.5 * (breaks[seg] + breaks[seg + 1]);
        const double half = 0.5 * (breaks[seg + 1] - breaks[seg]);
        if (half <= 0.0) continue;
        const double nodes[3] = {mid - half * kGlNode, mid, mid + half * kGlNode};
        const double weights[3] = {half * kGlW1, half * kGlW0, half * kGlW1};
        for (int q = 0; q < 3; ++q) {
            const int first = eval_nonzero(nodes[q], vals);
            for (int j = 0; j <= degree_; ++j) out[first + j] += weights[q] * vals[j];
        }
    }
    return out;
}

double SplineFit::evaluate(double t) const {
    if (t < basis->t_min() || t > basis->t_max())
        throw std::domain_error("SplineFit::evaluate: t outside the fitted domain");
    double vals[8];
    const int first = basis->eval_nonzero(basis->to_x(t), vals);
    double out = 0.0;
    for (int j = 0; j <= basis->degree(); ++j) out += vals[j] * coefficients[first + j];
    return out;
}

double SplineFit::integrate(double a, double b) const {
    if (!(a < b)) throw std::invalid_argument("SplineFit::integrate: need a < b");
    if (a < basis->t_min() || b > basis->t_max())
        throw std::domain_error("SplineFit::integrate: interval outside the fitted domain");
    const double span = basis->t_max() - basis->t_min();
    const Eigen::VectorXd w = basis->basis_integrals(basis->to_x(a), basis->to_x(b));
    return span * w.dot(coefficients);
}

SplineSolver::SplineSolver(std::span<const double> times, const SmootherConfig& config)
    : times_(times.begin(), times.end()),
      config_(config),
      basis_(std::make_shared<SplineBasis>(times, config)) {
    const int n = static_cast<int>(times_.size());
    const int nb = basis_->n_basis();
    const int k = basis_->degree() + 1;

    row_values_.resize(n, k);
    row_offset_.resize(n);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nb, nb);
    double vals[8];
    for (int i = 0; i < n; ++i) {
        const int first = basis_->eval_nonzero(basis_->to_x(times_[i]), vals);
        row_offset_[i] = first;
        for (int a = 0; a < k; ++a) {
            row_values_(i, a) = vals[a];
            for (int b = 0; b <= a; ++b)
                gram(first + a, first + b) += vals[a] * vals[b];
        }
    }
    gram = gram.selfadjointView<Eigen::Lower>();

    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("fit_spline: rank-deficient basis (data cannot support the knots)");
    chol_lower_ = llt.matrixL();

    // second divided differences over Greville sites, weighted so |Dc|^2
    // approximates the integrated squared second derivative
    Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(nb, nb);
    for (int j = 0; j + 2 < nb; ++j) {
        const double g0 = basis_->greville(j);
        const double g1 = basis_->greville(j + 1);
        const double g2 = basis_->greville(j + 2);
        const double d1 = g1 - g0;
        const double d2 = g2 - g1;
        const double scale = std::sqrt(0.5 * (d1 + d2));
        const double row[3] = {scale * 2.0 / (d1 * (d1 + d2)), scale * -2.0 / (d1 * d2),
                               scale * 2.0 / (d2 * (d1 + d2))};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) penalty(j + a, j + b) += row[a] * row[b];
    }

    // K = L^-1 Omega L^-T, symmetric PSD; lambda only rescales its spectrum
    Eigen::MatrixXd half = chol_lower_.triangularView<Eigen::Lower>().solve(penalty);
    Eigen::MatrixXd kmat =
        chol_lower_.triangularView<Eigen::Lower>().solve(half.transpose()).transpose();
    kmat = 0.5 * (kmat + kmat.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kmat);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("fit_spline: penalty eigendecomposition failed");
    eigvals_ = eig.eigenvalues().cwiseMax(0.0);
    eigvecs_ = eig.eigenvectors();
    // the affine null space must stay exactly unpenalized at any lambda:
    // zero out eigenvalues that are numerical noise around 0
    const double eig_tol = 1e-12 * eigvals_.maxCoeff();
    for (int i = 0; i < eigvals_.size(); ++i)
        if (eigvals_[i] < eig_tol) eigvals_[i] = 0.0;

    coef_transform_ =
        chol_lower_.transpose().triangularView<Eigen::Upper>().solve(eigvecs_);
}

SplineSolver::Projection SplineSolver::project(std::span<const double> values) const {
    const int n = this->n();
    const int k = basis_->degree() + 1;
    if (static_cast<int>(values.size()) != n)
        throw std::invalid_argument("SplineSolver: values length does not match the grid");

    Projection p;
    Eigen::VectorXd bty = Eigen::VectorXd::Zero(n_basis());
    double yty = 0.0;
    for (int i = 0; i < n; ++i) {
        const double y = values[i];
        yty += y * y;
        const int first = row_offset_[i];
        for (int a = 0; a < k; ++a) bty[first + a] += row_values_(i, a) * y;
    }
    chol_lower_.triangularView<Eigen::Lower>().solveInPlace(bty);
    p.z = eigvecs_.transpose() * bty;
    p.yty = yty;
    return p;
}

double SplineSolver::gcv_of(const Projection& p, double lambda) const {
    const int n = this->n();
    double rss = p.yty;
    double trace = 0.0;
    for (int i = 0; i < n_basis(); ++i) {
        const double shrink = 1.0 / (1.0 + lambda * eigvals_[i]);
        const double d = p.z[i] * shrink;
        rss += d * d - 2.0 * p.z[i] * d;
        trace += shrink;
    }
    rss = std::max(rss, 0.0);
    const double denom = static_cast<double>(n) - trace;
    if (denom <= 0.0)
        throw std::runtime_error("gcv_score: tr(H) >= n, criterion undefined");
    return static_cast<double>(n) * rss / (denom * denom);
}

double SplineSolver::choose_lambda(const Projection& p) const {
    const int grid_n = config_.grid_points;
    const double lo = config_.lambda_log10_min;
    const double hi = config_.lambda_log10_max;
    const double step = (hi - lo) / (grid_n - 1);

    int best_i = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i) {
        const double score = gcv_of(p, std::pow(10.0, lo + i * step));
        if (score <= best_score) {  // ties resolve toward larger lambda
            best_score = score;
            best_i = i;
        }
    }

    double a = lo + std::max(best_i - 1, 0) * step;
    double b = lo + std::min(best_i + 1, grid_n - 1) * step;
    double best_log = lo + best_i * step;

    // golden-section refinement on log10(lambda)
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = gcv_of(p, std::pow(10.0, x1));
    double f2 = gcv_of(p, std::pow(10.0, x2));
    for (int iter = 0; iter < 40 && (b - a) > 1e-4; ++iter) {
        if (f1 > f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = gcv_of(p, std::pow(10.0, x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = gcv_of(p, std::pow(10.0, x1));
        }
    }
    for (double cand : {x2, x1}) {  // larger candidate first: ties keep more smoothing
        const double score = gcv_of(p, std::pow(10.0, cand));
        if (score <= best_score) {
            best_score = score;
            best_log = cand;
        }
    }
    return std::pow(10.0, best_log);
}

SplineFit SplineSolver::finalize(const Projection& p, double lambda) const {
    Eigen::VectorXd shrunk(n_basis());
    double trace = 0.0;
    for (int i = 0; i < n_basis(); ++i) {
        const double shrink = 1.0 / (1.0 + lambda * eigvals_[i]);
        shrunk[i] = p.z[i] * shrink;
        trace += shrink;
    }
    SplineFit fit;
    fit.basis = basis_;
    fit.coefficients = coef_transform_ * shrunk;
    fit.lambda = lambda;
    fit.edf = trace;
    return fit;
}

SplineFit SplineSolver::fit(std::span<const double> values) const {
    const Projection p = project(values);
    return finalize(p, choose_lambda(p));
}

SplineFit SplineSolver::fit_at_lambda(std::span<const double> values, double lambda) const {
    if (lambda < 0.0) throw std::invalid_argument("fit_at_lambda: lambda must be >= 0");
    return finalize(project(values), lambda);
}

double SplineSolver::gcv(double lambda, std::span<const double> values) const {
    if (lambda < 0.0) throw std::invalid_argument("gcv_score: lambda must be >= 0");
    return gcv_of(project(values), lambda);
}

double SplineSolver::edf(double lambda) const {
    double trace = 0.0;
    for (int i = 0; i < n_basis(); ++i) trace += 1.0 / (1.0 + lambda * eigvals_[i]);
    return trace;
}

void SplineSolver::fitted_values(const SplineFit& fit, std::span<double> out) const {
    const int n = this->n();
    const int k = basis_->degree() + 1;
    if (static_cast<int>(out.size()) != n)
        throw std::invalid_argument("fitted_values: output length does not match the grid");
    for (int i = 0; i < n; ++i) {
        const int first = row_offset_[i];
        double v = 0.0;
        for (int a = 0; a < k; ++a) v += row_values_(i, a) * fit.coefficients[first + a];
        out[i] = v;
    }
}

Eigen::VectorXd SplineSolver::time_basis_integrals(double a, double b) const {
    if (!(a < b)) throw std::invalid_argument("integrate: need a < b");
    if (a < basis_->t_min() || b > basis_->t_max())
        throw std::domain_error("integrate: interval outside the data domain");
    const double span = basis_->t_max() - basis_->t_min();
    return span * basis_->basis_integrals(basis_->to_x(a), basis_->to_x(b));
}

SplineFit fit_spline(std::span<const double> times, std::span<const double> values,
                     const SmootherConfig& config) {
    return SplineSolver(times, config).fit(values);
}

double gcv_score(double lambda, std::span<const double> times, std::span<const double> values,
                 const SmootherConfig& config) {
    return SplineSolver(times, config).gcv(lambda, values);
}

}  // namespace rso2stat
