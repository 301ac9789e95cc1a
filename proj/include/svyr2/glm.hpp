#pragma once

#include <cstddef>
#include <vector>

#include "svyr2/dataset.hpp"

namespace svyr2 {

struct SolverOptions {
  // Convergence: infinity-norm of the weighted score below tol AND relative
  // loglikelihood change below tol.
  double tol = 1e-10;
  int max_iterations = 50;
  // |eta| beyond this at every event row, or any slope coefficient beyond
  // separation_coef_bound mid-iteration, is declared complete separation.
  double separation_eta_bound = 25.0;
  double separation_coef_bound = 1e4;
  // Pivoted-QR condition threshold for the design matrix.
  double condition_threshold = 1e10;
};

// Weighted logistic loglikelihood / score at coef (length p+1). Thin
// wrappers over the kernels with dimension checks.
double logistic_loglik(const Dataset& data, const std::vector<double>& coef);
std::vector<double> logistic_score(const Dataset& data, const std::vector<double>& coef);

// Newton-Raphson/IRLS with step halving on the weighted loglikelihood.
// Throws SingularSystemError, SeparationError, DegenerateResponseError.
// Hitting the iteration cap returns converged=false, never a silent success.
FitResult fit_logistic(const Dataset& data, const SolverOptions& opts = {});

// Intercept-only model in closed form; same weights as data.
FitResult fit_null(const Dataset& data, Family family = Family::logistic);

// Weighted least squares with the Gaussian MLE variance (divisor N-hat) and
// exact Gaussian loglikelihood. Requires n > p+1; throws SingularSystemError
// on rank deficiency or a zero variance (perfect fit).
FitResult fit_gaussian_mle(const Dataset& data, const SolverOptions& opts = {});

// Linear spline basis: columns [x, (x-k1)+, (x-k2)+, ...], row-major.
// cols = 1 + number of knots.
struct SplineBasis {
  std::vector<double> X;
  std::size_t n = 0;
  std::size_t cols = 0;
};
SplineBasis spline_basis(const std::vector<double>& x, const SplineSpec& spec);

}  // namespace svyr2
