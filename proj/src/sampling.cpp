#include "svyr2/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "svyr2/rng.hpp"

namespace svyr2 {

namespace {

double expit_clamped(double eta) {
  eta = std::min(30.0, std::max(-30.0, eta));
  if (eta <= 0.0) {
    const double e = std::exp(eta);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(-eta));
}

// Gathers the sampled rows (ascending original index) into a Dataset with
// weights w = 1.0/pi.
void gather_rows(const Population& pop, const std::vector<std::uint32_t>& rows,
                 const std::vector<double>& pi, DesignSample* out) {
  const std::size_t n = rows.size();
  out->data.n = n;
  out->data.p = pop.p;
  out->data.y.resize(n);
  out->data.X.resize(n * pop.p);
  out->data.weights.resize(n);
  out->inclusion_prob = pi;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = rows[k];
    out->data.y[k] = pop.y[i];
    for (std::size_t j = 0; j < pop.p; ++j) out->data.X[k * pop.p + j] = pop.x[i * pop.p + j];
    out->data.weights[k] = 1.0 / pi[k];
  }
  out->rows = rows;
}

}  // namespace

Population generate_population(std::size_t N, const std::vector<double>& coef,
                               std::uint64_t seed) {
  if (N < 2) throw InvalidArgumentError("generate_population: N must be >= 2");
  if (coef.empty()) throw InvalidArgumentError("generate_population: coef must be nonempty");
  Population pop;
  pop.p = coef.size() - 1;
  pop.N = N;
  pop.seed = seed;
  pop.gen_coef = coef;
  pop.x.resize(N * pop.p);
  pop.y.resize(N);
  rng::Stream stream(seed);
  for (std::size_t i = 0; i < N; ++i) {
    double eta = coef[0];
    for (std::size_t j = 0; j < pop.p; ++j) {
      const double xij = stream.next_normal();
      pop.x[i * pop.p + j] = xij;
      eta += coef[1 + j] * xij;
    }
    const std::uint8_t yi = stream.next_uniform() < expit_clamped(eta) ? 1 : 0;
    pop.y[i] = yi;
    pop.case_count += yi;
  }
  return pop;
}

DesignSample draw_srs(const Population& pop, std::size_t n, std::uint64_t seed) {
  if (n < 1 || n > pop.N) throw InvalidArgumentError("draw_srs: n out of range");
  rng::Stream stream(seed);
  const auto rows = rng::sample_without_replacement(
      stream, static_cast<std::uint32_t>(pop.N), static_cast<std::uint32_t>(n));
  const double pi = static_cast<double>(n) / static_cast<double>(pop.N);
  DesignSample s;
  s.design = DesignKind::srs;
  s.seed = seed;
  s.meta.sampling_fraction = pi;
  gather_rows(pop, rows, std::vector<double>(n, pi), &s);
  return s;
}

DesignSample draw_case_control(const Population& pop, std::size_t m, std::uint64_t seed) {
  if (pop.degenerate())
    throw InvalidArgumentError("draw_case_control: population is degenerate");
  if (m < 1) throw InvalidArgumentError("draw_case_control: m must be >= 1");
  const std::size_t n_controls_pop = pop.N - pop.case_count;
  const std::size_t k = m * pop.case_count;
  if (k > n_controls_pop)
    throw InvalidArgumentError("draw_case_control: m*case_count (" + std::to_string(k) +
                               ") exceeds the control stratum (" +
                               std::to_string(n_controls_pop) + ")");

  std::vector<std::uint32_t> control_index;
  control_index.reserve(n_controls_pop);
  for (std::size_t i = 0; i < pop.N; ++i)
    if (pop.y[i] == 0) control_index.push_back(static_cast<std::uint32_t>(i));

  rng::Stream stream(seed);
  const auto picks = rng::sample_without_replacement(
      stream, static_cast<std::uint32_t>(n_controls_pop), static_cast<std::uint32_t>(k));

  std::vector<std::uint32_t> rows;
  rows.reserve(pop.case_count + k);
  for (std::size_t i = 0; i < pop.N; ++i)
    if (pop.y[i] == 1) rows.push_back(static_cast<std::uint32_t>(i));
  for (auto idx : picks) rows.push_back(control_index[idx]);
  std::sort(rows.begin(), rows.end());

  const double pi_control =
      static_cast<double>(k) / static_cast<double>(n_controls_pop);
  std::vector<double> pi(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    pi[r] = pop.y[rows[r]] == 1 ? 1.0 : pi_control;

  DesignSample s;
  s.design = DesignKind::case_control;
  s.seed = seed;
  s.meta.ratio_m = m;
  s.meta.sampling_fraction = pi_control;
  gather_rows(pop, rows, pi, &s);
  return s;
}

DesignSample draw_two_phase_balanced(const Population& pop,
                                     const std::function<int(std::size_t)>& stratifier,
                                     std::size_t per_cell, std::uint64_t seed) {
  if (per_cell < 1) throw InvalidArgumentError("draw_two_phase_balanced: per_cell must be >= 1");
  std::vector<std::vector<std::uint32_t>> cells(4);
  for (std::size_t i = 0; i < pop.N; ++i) {
    const int c = stratifier(i);
    if (c < 0 || c > 3)
      throw InvalidArgumentError("draw_two_phase_balanced: stratifier must map to 0..3");
    cells[c].push_back(static_cast<std::uint32_t>(i));
  }
  for (int c = 0; c < 4; ++c)
    if (cells[c].size() < per_cell)
      throw InvalidArgumentError("draw_two_phase_balanced: cell " + std::to_string(c) +
                                 " has " + std::to_string(cells[c].size()) +
                                 " members, fewer than per_cell " + std::to_string(per_cell));

  rng::Stream stream(seed);
  std::vector<std::uint32_t> rows;
  rows.reserve(4 * per_cell);
  for (int c = 0; c < 4; ++c) {
    const auto picks = rng::sample_without_replacement(
        stream, static_cast<std::uint32_t>(cells[c].size()),
        static_cast<std::uint32_t>(per_cell));
    for (auto idx : picks) rows.push_back(cells[c][idx]);
  }
  std::sort(rows.begin(), rows.end());

  std::vector<double> pi(rows.size());
  std::vector<std::uint32_t> row_cell(rows.size());
  std::array<double, 4> cell_pi;
  for (int c = 0; c < 4; ++c)
    cell_pi[c] = static_cast<double>(per_cell) / static_cast<double>(cells[c].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int c = stratifier(rows[r]);
    row_cell[r] = static_cast<std::uint32_t>(c);
    pi[r] = cell_pi[c];
  }

  DesignSample s;
  s.design = DesignKind::two_phase;
  s.seed = seed;
  s.meta.per_cell = per_cell;
  for (int c = 0; c < 4; ++c) s.meta.cell_sizes.push_back(cells[c].size());
  s.meta.sampling_fraction =
      static_cast<double>(4 * per_cell) / static_cast<double>(pop.N);
  gather_rows(pop, rows, pi, &s);
  s.cell = std::move(row_cell);
  return s;
}

Dataset population_dataset(const Population& pop) {
  Dataset d;
  d.n = pop.N;
  d.p = pop.p;
  d.X = pop.x;
  d.y.resize(pop.N);
  for (std::size_t i = 0; i < pop.N; ++i) d.y[i] = pop.y[i];
  return d;
}

ColumnTable population_table(const Population& pop) {
  ColumnTable t;
  std::vector<double> y(pop.N);
  for (std::size_t i = 0; i < pop.N; ++i) y[i] = pop.y[i];
  t.add("y", std::move(y));
  for (std::size_t j = 0; j < pop.p; ++j) {
    std::vector<double> col(pop.N);
    for (std::size_t i = 0; i < pop.N; ++i) col[i] = pop.x[i * pop.p + j];
    t.add("x" + std::to_string(j + 1), std::move(col));
  }
  return t;
}

ColumnTable sample_table(const DesignSample& s) {
  ColumnTable t;
  t.add("y", s.data.y);
  for (std::size_t j = 0; j < s.data.p; ++j) {
    std::vector<double> col(s.data.n);
    for (std::size_t i = 0; i < s.data.n; ++i) col[i] = s.data.x(i, j);
    t.add("x" + std::to_string(j + 1), std::move(col));
  }
  t.add("weight", s.data.weights);
  if (s.design == DesignKind::two_phase) {
    std::vector<double> cell(s.data.n);
    for (std::size_t i = 0; i < s.data.n; ++i) cell[i] = s.cell[i];
    t.add("cell", std::move(cell));
  }
  return t;
}

}  // namespace svyr2
