#pragma once

// Row-reduction kernels behind the fitters. Production kernels accumulate
// per-chunk partials over fixed 2048-row chunks and combine them serially in
// chunk order, so results are bitwise identical for any OpenMP thread count
// (including 1). The ref:: variants are naive single-loop serial
// implementations kept for testing and benchmarking; they can differ from
// the chunked results only by floating-point summation order.

#include <cstddef>

#include "svyr2/dataset.hpp"

namespace svyr2::kernels {

inline constexpr std::size_t kChunkRows = 2048;
// Below this row count the chunked loop runs without OpenMP; the arithmetic
// is the same either way.
inline constexpr std::size_t kParallelThreshold = 8192;

// Weighted logistic loglikelihood at coef (length p+1, intercept first).
// Linear predictor clamped to [-30, 30].
double logistic_loglik(const Dataset& data, const double* coef);

// Weighted score (exact gradient of logistic_loglik); g has length p+1.
void logistic_score(const Dataset& data, const double* coef, double* g);

// One fused pass: loglikelihood, score, and the packed upper triangle of
// X~' W X~ (observed information), q = p+1, packed size q*(q+1)/2 with
// index(a,b) = a*q - a*(a-1)/2 + (b-a) for a <= b.
void logistic_full(const Dataset& data, const double* coef, double* loglik, double* g,
                   double* hess_packed);

// sum_w = sum of weights, sum_wy = weighted sum of the response.
void weighted_sums(const Dataset& data, double* sum_w, double* sum_wy);

// Weighted residual sum of squares at a linear predictor coef (length p+1).
double weighted_rss(const Dataset& data, const double* coef);

// Exact Gaussian loglikelihood -1/2 sum w [log(2 pi s2) + (y - mu)^2 / s2].
double gaussian_loglik(const Dataset& data, const double* coef, double sigma2);

namespace ref {
double logistic_loglik(const Dataset& data, const double* coef);
void logistic_score(const Dataset& data, const double* coef, double* g);
void logistic_full(const Dataset& data, const double* coef, double* loglik, double* g,
                   double* hess_packed);
void weighted_sums(const Dataset& data, double* sum_w, double* sum_wy);
double weighted_rss(const Dataset& data, const double* coef);
double gaussian_loglik(const Dataset& data, const double* coef, double sigma2);
}  // namespace ref

}  // namespace svyr2::kernels
