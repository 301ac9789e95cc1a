#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "svyr2/config.hpp"
#include "svyr2/dataset.hpp"
#include "svyr2/sampling.hpp"

namespace svyr2 {

struct ExperimentConfig {
  std::size_t pop_size = 100000;
  std::vector<double> gen_coef = {-6.0, 1.0};
  std::vector<std::size_t> ratios = {1, 2, 5, 10, 20};
  std::size_t replicates = 200;
  std::uint64_t base_seed = kDefaultBaseSeed;
  std::string formula;       // empty: y ~ x1 + ... + xp on the raw columns
  bool single_draw = false;  // one sample per ratio; SEs undefined

  void validate() const;  // throws InvalidArgumentError
};

// One table row: replicate means of the four statistics with Monte-Carlo
// standard errors (sd over successful replicates / sqrt(count)). Single-draw
// and census rows leave the SEs NaN; undefined cells are NaN.
struct ComparisonRow {
  std::string design;
  double sampling_fraction = std::numeric_limits<double>::quiet_NaN();
  double naive_cs = std::numeric_limits<double>::quiet_NaN();
  double design_cs = std::numeric_limits<double>::quiet_NaN();
  double naive_nag = std::numeric_limits<double>::quiet_NaN();
  double design_nag = std::numeric_limits<double>::quiet_NaN();
  double mc_se_naive_cs = std::numeric_limits<double>::quiet_NaN();
  double mc_se_design_cs = std::numeric_limits<double>::quiet_NaN();
  double mc_se_naive_nag = std::numeric_limits<double>::quiet_NaN();
  double mc_se_design_nag = std::numeric_limits<double>::quiet_NaN();
  std::size_t failures = 0;
};

// Case-control bias experiment: one population, replicated case-control
// samples per ratio. Each replicate fits the model unweighted (naive columns)
// and weighted (design columns). A fit failure inside a replicate is counted
// in the failures column and excluded from the means; the census row comes
// last with design = "population". Replicates run in parallel; output is
// byte-identical for any thread count.
std::vector<ComparisonRow> replicate_table2(const ExperimentConfig& cfg);

// Shrinkage heuristic: under case-control subsampling of a rare outcome the
// naive statistic inflates roughly so that log(1 - naive_cs) scales by N/n.
struct HeuristicResult {
  double lhs = 0;  // log(1 - naive sample cs) / log(1 - census cs)
  double rhs = 0;  // N / n
  double naive_cs = 0;
  double census_cs = 0;
  std::size_t n = 0;
  std::size_t N = 0;

  double ratio() const { return lhs / rhs; }
};

// Unweighted fits on the full population and on the sample rows. Throws
// UndefinedRatioError when either likelihood ratio falls below the
// chi-squared guard (no detectable signal, the ratio is noise over noise).
HeuristicResult heuristic_check(const Population& pop, const DesignSample& sample);

// Esophageal case-control analysis: main-effects and interaction models on
// the bundled grouped data expanded to individual records; cases weight 1,
// controls control_weight. Rows "esoph_main" and "esoph_interaction"; naive
// columns from the unweighted fit, design columns from the weighted one.
std::vector<ComparisonRow> replicate_esoph(double control_weight = 440.0);

struct TwoPhaseConfig {
  std::size_t cohort_size = 4000;
  std::size_t replicates = 200;
  std::uint64_t base_seed = kDefaultBaseSeed;
  bool single_draw = false;
  bool cohort_only = false;  // emit just the full-cohort census row

  void validate() const;
};

// Synthetic cohort for the two-phase comparison: x1 = binary exposure,
// x2 ~ N(0,1), x3 = surrogate for x1 misclassified with probability 0.15,
// y ~ Bernoulli(expit(-2.8 + x1 + 0.5 x2)), event rate near 10%. The model
// of interest is y ~ x1 + x2; x3 is only a stratifier.
Population make_two_phase_cohort(std::size_t N, std::uint64_t seed);

// Three rows: "case_control" (all cases + equal controls; design and naive
// columns), "two_phase" (balanced on outcome x surrogate, design columns
// only), and "full_cohort" last (census values, no SEs). One cohort,
// replicated samples.
std::vector<ComparisonRow> replicate_two_phase(const TwoPhaseConfig& cfg);

}  // namespace svyr2
