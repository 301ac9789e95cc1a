#include "svyr2/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace svyr2::kernels {

namespace {

constexpr double kEtaClamp = 30.0;

inline double clamp_eta(double eta) {
  return std::min(kEtaClamp, std::max(-kEtaClamp, eta));
}

inline double loglik_term(double y, double eta) {
  // y*log(mu) + (1-y)*log(1-mu) in the overflow-safe split form.
  if (eta <= 0.0) return y * eta - std::log1p(std::exp(eta));
  return (y - 1.0) * eta - std::log1p(std::exp(-eta));
}

inline double expit(double eta) {
  if (eta <= 0.0) {
    const double e = std::exp(eta);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(-eta));
}

inline double dot_row(const Dataset& d, std::size_t i, const double* coef) {
  double eta = coef[0];
  const double* row = d.X.data() + i * d.p;
  for (std::size_t j = 0; j < d.p; ++j) eta += coef[1 + j] * row[j];
  return eta;
}

bool use_parallel(std::size_t n) {
#ifdef _OPENMP
  return n >= kParallelThreshold && omp_get_max_threads() > 1 && !omp_in_parallel();
#else
  (void)n;
  return false;
#endif
}

// Runs per_chunk(lo, hi, partial) over fixed chunks and combines partials in
// chunk order. partial has `width` doubles, zeroed by the callee's caller.
template <class F>
void chunked_reduce(std::size_t n, std::size_t width, double* out, F&& per_chunk) {
  const std::size_t nchunks = (n + kChunkRows - 1) / kChunkRows;
  std::fill(out, out + width, 0.0);
  if (use_parallel(n)) {
    std::vector<double> partials(nchunks * width, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
      const std::size_t lo = static_cast<std::size_t>(c) * kChunkRows;
      const std::size_t hi = std::min(n, lo + kChunkRows);
      per_chunk(lo, hi, partials.data() + static_cast<std::size_t>(c) * width);
    }
    for (std::size_t c = 0; c < nchunks; ++c)
      for (std::size_t j = 0; j < width; ++j) out[j] += partials[c * width + j];
  } else {
    std::vector<double> partial(width);
    for (std::size_t c = 0; c < nchunks; ++c) {
      const std::size_t lo = c * kChunkRows;
      const std::size_t hi = std::min(n, lo + kChunkRows);
      std::fill(partial.begin(), partial.end(), 0.0);
      per_chunk(lo, hi, partial.data());
      for (std::size_t j = 0; j < width; ++j) out[j] += partial[j];
    }
  }
}

}  // namespace

double logistic_loglik(const Dataset& data, const double* coef) {
  double out = 0.0;
  chunked_reduce(data.n, 1, &out, [&](std::size_t lo, std::size_t hi, double* partial) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double eta = clamp_eta(dot_row(data, i, coef));
      s += data.weight(i) * loglik_term(data.y[i], eta);
    }
    partial[0] = s;
  });
  return out;
}

void logistic_score(const Dataset& data, const double* coef, double* g) {
  const std::size_t q = data.p + 1;
  chunked_reduce(data.n, q, g, [&](std::size_t lo, std::size_t hi, double* partial) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double eta = clamp_eta(dot_row(data, i, coef));
      const double r = data.weight(i) * (data.y[i] - expit(eta));
      partial[0] += r;
      const double* row = data.X.data() + i * data.p;
      for (std::size_t j = 0; j < data.p; ++j) partial[1 + j] += r * row[j];
    }
  });
}

void logistic_full(const Dataset& data, const double* coef, double* loglik, double* g,
                   double* hess_packed) {
  const std::size_t q = data.p + 1;
  const std::size_t hsize = q * (q + 1) / 2;
  const std::size_t width = 1 + q + hsize;
  std::vector<double> out(width);
  chunked_reduce(data.n, width, out.data(),
                 [&](std::size_t lo, std::size_t hi, double* partial) {
                   double* pll = partial;
                   double* pg = partial + 1;
                   double* ph = partial + 1 + q;
                   for (std::size_t i = lo; i < hi; ++i) {
                     const double w = data.weight(i);
                     const double eta = clamp_eta(dot_row(data, i, coef));
                     const double mu = expit(eta);
                     *pll += w * loglik_term(data.y[i], eta);
                     const double r = w * (data.y[i] - mu);
                     const double s = w * mu * (1.0 - mu);
                     const double* row = data.X.data() + i * data.p;
                     pg[0] += r;
                     for (std::size_t j = 0; j < data.p; ++j) pg[1 + j] += r * row[j];
                     std::size_t idx = 0;
                     for (std::size_t a = 0; a < q; ++a) {
                       const double xa = (a == 0) ? 1.0 : row[a - 1];
                       const double sxa = s * xa;
                       for (std::size_t b = a; b < q; ++b) {
                         const double xb = (b == 0) ? 1.0 : row[b - 1];
                         ph[idx++] += sxa * xb;
                       }
                     }
                   }
                 });
  *loglik = out[0];
  std::copy(out.begin() + 1, out.begin() + 1 + q, g);
  std::copy(out.begin() + 1 + q, out.end(), hess_packed);
}

void weighted_sums(const Dataset& data, double* sum_w, double* sum_wy) {
  double out[2];
  chunked_reduce(data.n, 2, out, [&](std::size_t lo, std::size_t hi, double* partial) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double w = data.weight(i);
      partial[0] += w;
      partial[1] += w * data.y[i];
    }
  });
  *sum_w = out[0];
  *sum_wy = out[1];
}

double weighted_rss(const Dataset& data, const double* coef) {
  double out = 0.0;
  chunked_reduce(data.n, 1, &out, [&](std::size_t lo, std::size_t hi, double* partial) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = data.y[i] - dot_row(data, i, coef);
      s += data.weight(i) * r * r;
    }
    partial[0] = s;
  });
  return out;
}

double gaussian_loglik(const Dataset& data, const double* coef, double sigma2) {
  const double log_norm = std::log(2.0 * std::numbers::pi * sigma2);
  double out = 0.0;
  chunked_reduce(data.n, 1, &out, [&](std::size_t lo, std::size_t hi, double* partial) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = data.y[i] - dot_row(data, i, coef);
      s += data.weight(i) * (log_norm + r * r / sigma2);
    }
    partial[0] = s;
  });
  return -0.5 * out;
}

namespace ref {

double logistic_loglik(const Dataset& data, const double* coef) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const double eta = clamp_eta(dot_row(data, i, coef));
    s += data.weight(i) * loglik_term(data.y[i], eta);
  }
  return s;
}

void logistic_score(const Dataset& data, const double* coef, double* g) {
  const std::size_t q = data.p + 1;
  std::fill(g, g + q, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    const double eta = clamp_eta(dot_row(data, i, coef));
    const double r = data.weight(i) * (data.y[i] - expit(eta));
    g[0] += r;
    for (std::size_t j = 0; j < data.p; ++j) g[1 + j] += r * data.x(i, j);
  }
}

void logistic_full(const Dataset& data, const double* coef, double* loglik, double* g,
                   double* hess_packed) {
  const std::size_t q = data.p + 1;
  const std::size_t hsize = q * (q + 1) / 2;
  *loglik = 0.0;
  std::fill(g, g + q, 0.0);
  std::fill(hess_packed, hess_packed + hsize, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    const double w = data.weight(i);
    const double eta = clamp_eta(dot_row(data, i, coef));
    const double mu = expit(eta);
    *loglik += w * loglik_term(data.y[i], eta);
    const double r = w * (data.y[i] - mu);
    const double s = w * mu * (1.0 - mu);
    g[0] += r;
    for (std::size_t j = 0; j < data.p; ++j) g[1 + j] += r * data.x(i, j);
    std::size_t idx = 0;
    for (std::size_t a = 0; a < q; ++a) {
      const double xa = (a == 0) ? 1.0 : data.x(i, a - 1);
      for (std::size_t b = a; b < q; ++b) {
        const double xb = (b == 0) ? 1.0 : data.x(i, b - 1);
        hess_packed[idx++] += s * xa * xb;
      }
    }
  }
}

void weighted_sums(const Dataset& data, double* sum_w, double* sum_wy) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const double w = data.weight(i);
    a += w;
    b += w * data.y[i];
  }
  *sum_w = a;
  *sum_wy = b;
}

double weighted_rss(const Dataset& data, const double* coef) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const double r = data.y[i] - dot_row(data, i, coef);
    s += data.weight(i) * r * r;
  }
  return s;
}

double gaussian_loglik(const Dataset& data, const double* coef, double sigma2) {
  const double log_norm = std::log(2.0 * std::numbers::pi * sigma2);
  double s = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const double r = data.y[i] - dot_row(data, i, coef);
    s += data.weight(i) * (log_norm + r * r / sigma2);
  }
  return -0.5 * s;
}

}  // namespace ref

}  // namespace svyr2::kernels
