#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "svyr2/errors.hpp"

namespace svyr2 {

enum class Family { logistic, gaussian_mle };

inline const char* family_name(Family f) {
  return f == Family::logistic ? "logistic" : "gaussian_mle";
}

// Modeling data: response, n x p design matrix (row-major, no intercept
// column; fitters prepend the intercept), optional positive weights.
// Empty weights mean unit weights throughout.
struct Dataset {
  std::vector<double> y;
  std::vector<double> X;  // row-major, size n*p
  std::vector<double> weights;
  std::size_t n = 0;
  std::size_t p = 0;

  double x(std::size_t i, std::size_t j) const { return X[i * p + j]; }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
  bool unit_weights() const { return weights.empty(); }

  void validate(Family family) const {
    if (n < 1) throw InvalidArgumentError("dataset: n must be >= 1");
    if (y.size() != n) throw InvalidArgumentError("dataset: y length != n");
    if (X.size() != n * p) throw InvalidArgumentError("dataset: X size != n*p");
    if (!weights.empty() && weights.size() != n)
      throw InvalidArgumentError("dataset: weight vector length != n");
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w))
        throw InvalidArgumentError("dataset: weights must be strictly positive and finite");
    for (double v : X)
      if (!std::isfinite(v)) throw InvalidArgumentError("dataset: X has non-finite entries");
    for (double v : y) {
      if (!std::isfinite(v)) throw InvalidArgumentError("dataset: y has non-finite entries");
      if (family == Family::logistic && v != 0.0 && v != 1.0)
        throw InvalidArgumentError("dataset: logistic response must be 0 or 1");
    }
  }
};

// Result of a maximum weighted-pseudolikelihood fit. coef is length p+1,
// intercept first. loglik/null_loglik are weighted; weight_sum is N-hat.
struct FitResult {
  Family family = Family::logistic;
  std::vector<double> coef;
  double loglik = 0.0;
  double null_loglik = 0.0;
  std::size_t n = 0;
  double weight_sum = 0.0;
  bool converged = false;
  int iterations = 0;
  double max_score_norm = std::numeric_limits<double>::quiet_NaN();
  // Gaussian MLE variance of the fitted / null model; NaN for logistic.
  double sigma2 = std::numeric_limits<double>::quiet_NaN();
  double null_sigma2 = std::numeric_limits<double>::quiet_NaN();
};

// Interior knots of a linear spline basis; strictly increasing.
struct SplineSpec {
  std::vector<double> knots;

  void validate() const {
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!std::isfinite(knots[i]))
        throw InvalidArgumentError("spline: knots must be finite");
      if (i > 0 && !(knots[i - 1] < knots[i]))
        throw InvalidArgumentError("spline: knots must be strictly increasing");
    }
  }
};

// Classical and design-based pseudo-R^2 values for one fit.
struct RsqSummary {
  double cox_snell = 0.0;
  double nagelkerke = 0.0;
  double design_cox_snell = 0.0;
  double design_nagelkerke = 0.0;
  double loglik_ratio = 0.0;
  std::size_t n = 0;
  double weight_sum = 0.0;
};

}  // namespace svyr2
