#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "svyr2/dataset.hpp"
#include "svyr2/table.hpp"

namespace svyr2 {

// Finite population drawn iid from a superpopulation model; the sampling
// frame and census oracle for the design experiments.
struct Population {
  std::vector<double> x;  // row-major N*p
  std::size_t p = 0;
  std::vector<std::uint8_t> y;
  std::vector<double> gen_coef;  // generating (alpha, beta...) over the x columns
  std::size_t N = 0;
  std::size_t case_count = 0;
  std::uint64_t seed = 0;

  bool degenerate() const { return case_count == 0 || case_count == N; }
};

enum class DesignKind { srs, case_control, two_phase };

inline const char* design_name(DesignKind k) {
  switch (k) {
    case DesignKind::srs: return "srs";
    case DesignKind::case_control: return "case_control";
    default: return "two_phase";
  }
}

struct SampleMeta {
  std::size_t ratio_m = 0;          // case-control matching ratio
  double sampling_fraction = 1.0;   // control stratum fraction (cc) or n/N
  std::size_t per_cell = 0;         // two-phase
  std::vector<std::size_t> cell_sizes;  // population cell sizes (two-phase)
};

// A probability sample with per-row inclusion probabilities. Weights are
// exactly 1/inclusion_prob elementwise (bitwise: w = 1.0/pi as doubles).
struct DesignSample {
  Dataset data;
  DesignKind design = DesignKind::srs;
  std::vector<double> inclusion_prob;
  std::vector<std::uint32_t> rows;  // original population indices, ascending
  std::vector<std::uint32_t> cell;  // two-phase cell per sampled row
  SampleMeta meta;
  std::uint64_t seed = 0;
};

// x_j ~ N(0,1) iid, y ~ Bernoulli(expit(alpha + x'beta)) with the linear
// predictor clamped to [-30, 30]. Per row: p normal draws then one uniform.
Population generate_population(std::size_t N, const std::vector<double>& coef,
                               std::uint64_t seed);

// Simple random sample without replacement; pi = n/N for every row.
DesignSample draw_srs(const Population& pop, std::size_t n, std::uint64_t seed);

// All cases (pi = 1), plus m*case_count controls by SRS from the y=0
// stratum. Throws InvalidArgumentError when m*case_count exceeds the
// control stratum or the population is degenerate.
DesignSample draw_case_control(const Population& pop, std::size_t m, std::uint64_t seed);

// SRS of per_cell rows within each of 4 cells given by stratifier(row)
// in {0,1,2,3}; pi = per_cell / cell_size. Cells are drawn in cell order
// from one stream. Throws when a cell has fewer than per_cell members.
DesignSample draw_two_phase_balanced(const Population& pop,
                                     const std::function<int(std::size_t)>& stratifier,
                                     std::size_t per_cell, std::uint64_t seed);

// Whole population as a unit-weight Dataset (columns in x order).
Dataset population_dataset(const Population& pop);

// Whole population as a ColumnTable with columns y, x1..xp.
ColumnTable population_table(const Population& pop);

// Sample serialized as a ColumnTable: y, x1..xp, weight, and cell for
// two-phase samples.
ColumnTable sample_table(const DesignSample& s);

}  // namespace svyr2
