// Times the chunked (OpenMP) kernels against the serial reference loops on
// one large synthetic dataset and reports the largest result difference.
// Usage: svyr2_bench [rows] [cols]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "svyr2/kernels.hpp"
#include "svyr2/rng.hpp"

using namespace svyr2;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = now_ms();
    f();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 0) : 2000000;
  const std::size_t p = argc > 2 ? std::strtoull(argv[2], nullptr, 0) : 4;

  Dataset data;
  data.n = n;
  data.p = p;
  data.y.resize(n);
  data.X.resize(n * p);
  data.weights.resize(n);
  rng::Stream stream(42);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) data.X[i * p + j] = stream.next_normal();
    data.y[i] = stream.next_uniform() < 0.3 ? 1.0 : 0.0;
    data.weights[i] = 1.0 + 9.0 * stream.next_uniform();
  }
  std::vector<double> coef(p + 1, 0.1);
  const std::size_t q = p + 1;
  const std::size_t packed = q * (q + 1) / 2;

  std::printf("rows=%zu cols=%zu (times are best of 5, ms)\n", n, p);

  volatile double sink = 0.0;
  double r_chunked = 0.0, r_ref = 0.0;

  const double t1 = best_of(5, [&] { sink = r_chunked = kernels::logistic_loglik(data, coef.data()); });
  const double t2 = best_of(5, [&] { sink = r_ref = kernels::ref::logistic_loglik(data, coef.data()); });
  std::printf("logistic_loglik   chunked %8.2f   ref %8.2f   |diff| %.3e\n", t1, t2,
              std::fabs(r_chunked - r_ref));

  std::vector<double> g1(q), g2(q);
  const double t3 = best_of(5, [&] { kernels::logistic_score(data, coef.data(), g1.data()); });
  const double t4 = best_of(5, [&] { kernels::ref::logistic_score(data, coef.data(), g2.data()); });
  std::printf("logistic_score    chunked %8.2f   ref %8.2f   |diff| %.3e\n", t3, t4,
              max_abs_diff(g1, g2));

  std::vector<double> h1(packed), h2(packed);
  double ll1 = 0.0, ll2 = 0.0;
  const double t5 =
      best_of(5, [&] { kernels::logistic_full(data, coef.data(), &ll1, g1.data(), h1.data()); });
  const double t6 = best_of(
      5, [&] { kernels::ref::logistic_full(data, coef.data(), &ll2, g2.data(), h2.data()); });
  std::printf("logistic_full     chunked %8.2f   ref %8.2f   |diff| %.3e\n", t5, t6,
              std::max({std::fabs(ll1 - ll2), max_abs_diff(g1, g2), max_abs_diff(h1, h2)}));

  const double t7 = best_of(5, [&] { sink = r_chunked = kernels::weighted_rss(data, coef.data()); });
  const double t8 = best_of(5, [&] { sink = r_ref = kernels::ref::weighted_rss(data, coef.data()); });
  std::printf("weighted_rss      chunked %8.2f   ref %8.2f   |diff| %.3e\n", t7, t8,
              std::fabs(r_chunked - r_ref));

  const double t9 =
      best_of(5, [&] { sink = r_chunked = kernels::gaussian_loglik(data, coef.data(), 2.5); });
  const double t10 =
      best_of(5, [&] { sink = r_ref = kernels::ref::gaussian_loglik(data, coef.data(), 2.5); });
  std::printf("gaussian_loglik   chunked %8.2f   ref %8.2f   |diff| %.3e\n", t9, t10,
              std::fabs(r_chunked - r_ref));

  (void)sink;
  return 0;
}
