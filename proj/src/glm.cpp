#include "svyr2/glm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "svyr2/kernels.hpp"

namespace svyr2 {

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Design matrix with the intercept column prepended, optionally scaled by
// sqrt(w) rows (for WLS and the rank check of weighted fits).
Eigen::MatrixXd design_with_intercept(const Dataset& d, bool sqrt_weighted) {
  Eigen::MatrixXd X(d.n, d.p + 1);
  for (std::size_t i = 0; i < d.n; ++i) {
    const double s = sqrt_weighted ? std::sqrt(d.weight(i)) : 1.0;
    X(i, 0) = s;
    for (std::size_t j = 0; j < d.p; ++j) X(i, j + 1) = s * d.x(i, j);
  }
  return X;
}

// Pivoted-QR rank and condition check; returns the decomposition for reuse.
Eigen::ColPivHouseholderQR<Eigen::MatrixXd> check_rank(const Eigen::MatrixXd& X,
                                                       double cond_threshold) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const auto q = static_cast<Eigen::Index>(X.cols());
  const auto diag = qr.matrixR().diagonal().head(q).cwiseAbs();
  const double dmax = diag.maxCoeff();
  const double dmin = diag.minCoeff();
  if (!(dmin > 0.0) || dmax / dmin > cond_threshold)
    throw SingularSystemError("design matrix is rank-deficient or ill-conditioned");
  return qr;
}

void check_logistic_classes(const Dataset& d) {
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < d.n; ++i) {
    if (d.y[i] == 1.0)
      has1 = true;
    else
      has0 = true;
    if (has0 && has1) return;
  }
  throw DegenerateResponseError("response is degenerate: needs both classes with positive weight");
}

// Loglik decreases smaller than evaluation rounding are not decreases; without
// slack the line search can pin the iterate at a noise fixed point short of
// the score tolerance.
constexpr double kLineSearchSlack = 1e-13;

// At a boundary fit the score vanishes because every residual does; an
// interior optimum has O(1) residuals that cancel. Convergence acceptance
// must distinguish the two, otherwise a separated fit stops just inside the
// detection bound and passes as converged.
bool all_residuals_vanish(const Dataset& d, const std::vector<double>& coef, double tol) {
  for (std::size_t i = 0; i < d.n; ++i) {
    double eta = coef[0];
    for (std::size_t j = 0; j < d.p; ++j) eta += coef[1 + j] * d.x(i, j);
    const double mu = 1.0 / (1.0 + std::exp(-std::clamp(eta, -30.0, 30.0)));
    if (std::abs(d.y[i] - mu) >= tol) return false;
  }
  return true;
}

void check_separation_at_events(const Dataset& d, const std::vector<double>& coef,
                                double eta_bound) {
  bool any_event = false;
  for (std::size_t i = 0; i < d.n; ++i) {
    if (d.y[i] != 1.0) continue;
    any_event = true;
    double eta = coef[0];
    for (std::size_t j = 0; j < d.p; ++j) eta += coef[1 + j] * d.x(i, j);
    if (std::abs(eta) <= eta_bound) return;
  }
  if (any_event)
    throw SeparationError("complete separation: |eta| exceeds bound at every event");
}

double relative_change(double a, double b) { return std::abs(a - b) / (std::abs(a) + 1.0); }

}  // namespace

double logistic_loglik(const Dataset& data, const std::vector<double>& coef) {
  data.validate(Family::logistic);
  if (coef.size() != data.p + 1)
    throw InvalidArgumentError("logistic_loglik: coef length must be p+1");
  return kernels::logistic_loglik(data, coef.data());
}

std::vector<double> logistic_score(const Dataset& data, const std::vector<double>& coef) {
  data.validate(Family::logistic);
  if (coef.size() != data.p + 1)
    throw InvalidArgumentError("logistic_score: coef length must be p+1");
  std::vector<double> g(data.p + 1);
  kernels::logistic_score(data, coef.data(), g.data());
  return g;
}

FitResult fit_null(const Dataset& data, Family family) {
  data.validate(family);
  FitResult fr;
  fr.family = family;
  fr.n = data.n;
  fr.converged = true;
  fr.iterations = 0;
  fr.max_score_norm = 0.0;
  double sum_w = 0.0, sum_wy = 0.0;
  kernels::weighted_sums(data, &sum_w, &sum_wy);
  fr.weight_sum = sum_w;
  if (family == Family::logistic) {
    const double pbar = sum_wy / sum_w;
    if (!(pbar > 0.0) || !(pbar < 1.0))
      throw DegenerateResponseError("null fit: response is all 0 or all 1");
    fr.coef = {std::log(pbar / (1.0 - pbar))};
    const double n1 = sum_wy;
    const double n0 = sum_w - sum_wy;
    fr.loglik = n1 * std::log(pbar) + n0 * std::log(1.0 - pbar);
  } else {
    const double ybar = sum_wy / sum_w;
    fr.coef = {ybar};
    // The null coef has length 1, not p+1, so the model kernels must not be
    // used here; the intercept-only RSS and loglik have closed forms.
    double rss0 = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      const double r = data.y[i] - ybar;
      rss0 += data.weight(i) * r * r;
    }
    const double s2 = rss0 / sum_w;
    if (!(s2 > 0.0))
      throw DegenerateResponseError("null fit: response variance is zero");
    fr.sigma2 = s2;
    fr.null_sigma2 = s2;
    fr.loglik = -0.5 * sum_w * (std::log(2.0 * std::numbers::pi * s2) + 1.0);
  }
  fr.null_loglik = fr.loglik;
  return fr;
}

FitResult fit_logistic(const Dataset& data, const SolverOptions& opts) {
  data.validate(Family::logistic);
  check_logistic_classes(data);
  check_rank(design_with_intercept(data, !data.unit_weights()), opts.condition_threshold);

  const std::size_t q = data.p + 1;
  const std::size_t hsize = q * (q + 1) / 2;
  std::vector<double> coef(q, 0.0), g(q), hp(hsize);
  double ll = 0.0, ll_prev = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iter = 0;

  for (; iter < opts.max_iterations; ++iter) {
    kernels::logistic_full(data, coef.data(), &ll, g.data(), hp.data());
    const double gnorm = inf_norm(g);
    if (gnorm < opts.tol &&
        (iter == 0 || relative_change(ll, ll_prev) < opts.tol) &&
        !all_residuals_vanish(data, coef, opts.tol)) {
      converged = true;
      break;
    }
    ll_prev = ll;

    Eigen::MatrixXd H(q, q);
    std::size_t idx = 0;
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = a; b < q; ++b) {
        H(a, b) = hp[idx];
        H(b, a) = hp[idx];
        ++idx;
      }
    Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(q));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success)
      throw SingularSystemError("Newton step: information matrix is singular");
    Eigen::VectorXd step = ldlt.solve(gv);
    if (!step.allFinite())
      throw SingularSystemError("Newton step: solve produced non-finite values");

    // Step halving: accept the first step that does not decrease loglik.
    double lambda = 1.0;
    std::vector<double> cand(q);
    double ll_cand = -std::numeric_limits<double>::infinity();
    bool improved = false;
    for (int half = 0; half < 30; ++half) {
      for (std::size_t j = 0; j < q; ++j) cand[j] = coef[j] + lambda * step[j];
      ll_cand = kernels::logistic_loglik(data, cand.data());
      if (ll_cand >= ll - kLineSearchSlack * (std::abs(ll) + 1.0)) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;  // numerically stalled; verdict decided below
    coef = cand;

    double slope_norm = 0.0;
    for (std::size_t j = 1; j < q; ++j) slope_norm = std::max(slope_norm, std::abs(coef[j]));
    if (slope_norm > opts.separation_coef_bound)
      throw SeparationError("complete separation: coefficient norm diverged");
  }

  if (!converged) {
    // Iteration cap or stalled line search: re-evaluate the criterion at the
    // final coefficients.
    kernels::logistic_full(data, coef.data(), &ll, g.data(), hp.data());
    converged = inf_norm(g) < opts.tol && !std::isnan(ll_prev) &&
                relative_change(ll, ll_prev) < opts.tol &&
                !all_residuals_vanish(data, coef, opts.tol);
  }

  check_separation_at_events(data, coef, opts.separation_eta_bound);

  FitResult fr;
  fr.family = Family::logistic;
  fr.coef = coef;
  fr.loglik = ll;
  fr.n = data.n;
  double sum_w = 0.0, sum_wy = 0.0;
  kernels::weighted_sums(data, &sum_w, &sum_wy);
  fr.weight_sum = sum_w;
  fr.converged = converged;
  fr.iterations = iter;
  fr.max_score_norm = inf_norm(g);
  fr.null_loglik = fit_null(data, Family::logistic).loglik;
  if (fr.loglik < fr.null_loglik - 1e-8)
    throw FitError("internal: fitted loglik fell below the null loglik");
  return fr;
}

FitResult fit_gaussian_mle(const Dataset& data, const SolverOptions& opts) {
  data.validate(Family::gaussian_mle);
  if (data.n <= data.p + 1)
    throw InvalidArgumentError("gaussian fit needs n > p+1 (variance MLE degenerates)");

  Eigen::MatrixXd Xw = design_with_intercept(data, true);
  auto qr = check_rank(Xw, opts.condition_threshold);
  Eigen::VectorXd yw(data.n);
  for (std::size_t i = 0; i < data.n; ++i) yw(i) = std::sqrt(data.weight(i)) * data.y[i];
  Eigen::VectorXd beta = qr.solve(yw);

  FitResult fr;
  fr.family = Family::gaussian_mle;
  fr.coef.assign(beta.data(), beta.data() + beta.size());
  fr.n = data.n;
  double sum_w = 0.0, sum_wy = 0.0;
  kernels::weighted_sums(data, &sum_w, &sum_wy);
  fr.weight_sum = sum_w;

  const FitResult null_fit = fit_null(data, Family::gaussian_mle);
  const double rss = kernels::weighted_rss(data, fr.coef.data());
  const double tss = null_fit.sigma2 * sum_w;
  const double s2 = rss / sum_w;
  // Perfect fit: the MLE variance collapses and the loglikelihood diverges.
  if (!(s2 > tss / sum_w * 1e-12 + 1e-300))
    throw SingularSystemError("gaussian fit: residual variance is numerically zero");
  fr.sigma2 = s2;
  fr.null_sigma2 = null_fit.sigma2;
  fr.loglik = kernels::gaussian_loglik(data, fr.coef.data(), s2);
  fr.null_loglik = null_fit.loglik;
  fr.converged = true;
  fr.iterations = 1;
  fr.max_score_norm = 0.0;
  if (fr.loglik < fr.null_loglik - 1e-8)
    throw FitError("internal: fitted loglik fell below the null loglik");
  return fr;
}

SplineBasis spline_basis(const std::vector<double>& x, const SplineSpec& spec) {
  spec.validate();
  SplineBasis b;
  b.n = x.size();
  b.cols = 1 + spec.knots.size();
  b.X.resize(b.n * b.cols);
  for (std::size_t i = 0; i < b.n; ++i) {
    b.X[i * b.cols] = x[i];
    for (std::size_t k = 0; k < spec.knots.size(); ++k)
      b.X[i * b.cols + 1 + k] = std::max(0.0, x[i] - spec.knots[k]);
  }
  return b;
}

}  // namespace svyr2
