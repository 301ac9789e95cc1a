#include "svyr2/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <utility>

#include "svyr2/errors.hpp"
#include "svyr2/esoph.hpp"
#include "svyr2/formula.hpp"
#include "svyr2/glm.hpp"
#include "svyr2/rng.hpp"
#include "svyr2/rsq.hpp"

namespace svyr2 {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double expit_clamped(double eta) {
  eta = std::min(30.0, std::max(-30.0, eta));
  if (eta <= 0.0) {
    const double e = std::exp(eta);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(-eta));
}

struct RepResult {
  double ncs = kNan, dcs = kNan, nng = kNan, dng = kNan;
  bool ok = false;
};

// Design columns from the weighted fit, naive columns from an unweighted
// refit of the same rows. Empty formula uses the raw x columns.
RepResult fit_both(const DesignSample& s, const std::string& formula) {
  RsqSummary design, naive;
  if (formula.empty()) {
    design = rsq_summary(fit_logistic(s.data));
    Dataset unweighted = s.data;
    unweighted.weights.clear();
    naive = rsq_summary(fit_logistic(unweighted));
  } else {
    const ColumnTable table = sample_table(s);
    const ModelSpec spec = parse_formula(formula);
    design = rsq_summary(fit_logistic(build_dataset(table, spec, "weight").data));
    naive = rsq_summary(fit_logistic(build_dataset(table, spec, "").data));
  }
  RepResult out;
  out.ncs = naive.cox_snell;
  out.dcs = design.design_cox_snell;
  out.nng = naive.nagelkerke;
  out.dng = design.design_nagelkerke;
  out.ok = true;
  return out;
}

// Means and SEs over successful replicates, accumulated in replicate order
// so the result is identical for any thread count. SEs stay NaN below two
// successes.
ComparisonRow finish_row(std::string label, double fraction,
                         const std::vector<RepResult>& slots) {
  ComparisonRow row;
  row.design = std::move(label);
  row.sampling_fraction = fraction;
  std::size_t ok = 0;
  for (const auto& r : slots) ok += r.ok ? 1u : 0u;
  row.failures = slots.size() - ok;
  if (ok == 0) return row;

  const auto put = [&](double RepResult::* field, double* mean, double* se) {
    double sum = 0.0;
    for (const auto& r : slots)
      if (r.ok) sum += r.*field;
    const double m = sum / static_cast<double>(ok);
    *mean = m;
    if (ok < 2) return;
    double ss = 0.0;
    for (const auto& r : slots)
      if (r.ok) ss += (r.*field - m) * (r.*field - m);
    *se = std::sqrt(ss / static_cast<double>(ok - 1)) / std::sqrt(static_cast<double>(ok));
  };
  put(&RepResult::ncs, &row.naive_cs, &row.mc_se_naive_cs);
  put(&RepResult::dcs, &row.design_cs, &row.mc_se_design_cs);
  put(&RepResult::nng, &row.naive_nag, &row.mc_se_naive_nag);
  put(&RepResult::dng, &row.design_nag, &row.mc_se_design_nag);
  return row;
}

ComparisonRow census_row(std::string label, const RsqSummary& census) {
  ComparisonRow row;
  row.design = std::move(label);
  row.sampling_fraction = 1.0;
  row.naive_cs = census.cox_snell;
  row.design_cs = census.design_cox_snell;
  row.naive_nag = census.nagelkerke;
  row.design_nag = census.design_nagelkerke;
  return row;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (pop_size < 2) throw InvalidArgumentError("pop_size must be >= 2");
  if (gen_coef.size() < 2)
    throw InvalidArgumentError("gen_coef needs an intercept and at least one slope");
  for (double c : gen_coef)
    if (!std::isfinite(c)) throw InvalidArgumentError("gen_coef must be finite");
  if (ratios.empty()) throw InvalidArgumentError("ratios must be nonempty");
  for (std::size_t m : ratios)
    if (m < 1) throw InvalidArgumentError("ratios must be positive");
  if (replicates < 1) throw InvalidArgumentError("replicates must be >= 1");
}

void TwoPhaseConfig::validate() const {
  if (cohort_size < 8) throw InvalidArgumentError("cohort_size must be >= 8");
  if (replicates < 1) throw InvalidArgumentError("replicates must be >= 1");
}

std::vector<ComparisonRow> replicate_table2(const ExperimentConfig& cfg) {
  cfg.validate();
  const Population pop = generate_population(
      cfg.pop_size, cfg.gen_coef, rng::substream(cfg.base_seed, rng::kTagPopulation, 0));
  if (pop.degenerate())
    throw InvalidArgumentError("replicate_table2: generated population has a single class");
  const RsqSummary census = census_rsq(pop, cfg.formula);

  const std::size_t R = cfg.single_draw ? 1 : cfg.replicates;
  const std::size_t K = cfg.ratios.size();
  std::vector<RepResult> slots(K * R);
  std::exception_ptr first_error = nullptr;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(K * R); ++t) {
    const std::size_t ri = static_cast<std::size_t>(t) / R;
    const std::size_t rep = static_cast<std::size_t>(t) % R;
    try {
      const std::uint64_t seed = rng::substream(
          cfg.base_seed, rng::kTagTable2, (static_cast<std::uint64_t>(ri) << 32) | rep);
      slots[t] = fit_both(draw_case_control(pop, cfg.ratios[ri], seed), cfg.formula);
    } catch (const FitError&) {
      slots[t].ok = false;
    } catch (...) {
#pragma omp critical(svyr2_harness_first_error)
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<ComparisonRow> rows;
  for (std::size_t ri = 0; ri < K; ++ri) {
    const std::vector<RepResult> mine(slots.begin() + static_cast<std::ptrdiff_t>(ri * R),
                                      slots.begin() + static_cast<std::ptrdiff_t>((ri + 1) * R));
    const double fraction = static_cast<double>(cfg.ratios[ri] * pop.case_count) /
                            static_cast<double>(pop.N - pop.case_count);
    rows.push_back(
        finish_row("case_control_m" + std::to_string(cfg.ratios[ri]), fraction, mine));
  }
  rows.push_back(census_row("population", census));
  return rows;
}

HeuristicResult heuristic_check(const Population& pop, const DesignSample& sample) {
  if (sample.data.n < 2)
    throw InvalidArgumentError("heuristic_check: sample too small");
  const FitResult census_fit = fit_logistic(population_dataset(pop));
  const double census_lr = 2.0 * (census_fit.loglik - census_fit.null_loglik);
  if (census_lr < kHeuristicChi2Guard)
    throw UndefinedRatioError(
        "heuristic_check: population likelihood ratio is below the chi-squared(1) "
        "0.95 guard; without signal the shrinkage ratio is undefined");
  Dataset unweighted = sample.data;
  unweighted.weights.clear();
  const FitResult naive_fit = fit_logistic(unweighted);
  const double naive_lr = 2.0 * (naive_fit.loglik - naive_fit.null_loglik);
  if (naive_lr < kHeuristicChi2Guard)
    throw UndefinedRatioError(
        "heuristic_check: sample likelihood ratio is below the chi-squared(1) "
        "0.95 guard; without signal the shrinkage ratio is undefined");

  HeuristicResult r;
  // log(1 - cs) = -2*lr/n exactly, so the ratio of logs is formed from the
  // likelihood ratios directly; n = N with identical rows gives lhs = 1.
  r.lhs = (naive_lr / static_cast<double>(sample.data.n)) /
          (census_lr / static_cast<double>(pop.N));
  r.rhs = static_cast<double>(pop.N) / static_cast<double>(sample.data.n);
  r.naive_cs = cox_snell(naive_fit);
  r.census_cs = cox_snell(census_fit);
  r.n = sample.data.n;
  r.N = pop.N;
  return r;
}

std::vector<ComparisonRow> replicate_esoph(double control_weight) {
  const ColumnTable individual = expand_esoph(load_esoph_grouped(), control_weight);
  const std::array<std::pair<const char*, const char*>, 2> models = {{
      {"esoph_main", "y ~ C(agegp) + C(alcgp) + C(tobgp)"},
      {"esoph_interaction", "y ~ C(agegp) + C(alcgp) + C(tobgp) + alcgp:tobgp"},
  }};
  std::vector<ComparisonRow> rows;
  for (const auto& [label, formula] : models) {
    const ModelSpec spec = parse_formula(formula);
    const RsqSummary design = rsq_summary(fit_logistic(build_dataset(individual, spec, "w").data));
    const RsqSummary naive = rsq_summary(fit_logistic(build_dataset(individual, spec, "").data));
    ComparisonRow row;
    row.design = label;
    row.sampling_fraction = static_cast<double>(design.n) / design.weight_sum;
    row.naive_cs = naive.cox_snell;
    row.design_cs = design.design_cox_snell;
    row.naive_nag = naive.nagelkerke;
    row.design_nag = design.design_nagelkerke;
    rows.push_back(std::move(row));
  }
  return rows;
}

Population make_two_phase_cohort(std::size_t N, std::uint64_t seed) {
  if (N < 8) throw InvalidArgumentError("make_two_phase_cohort: N must be >= 8");
  Population pop;
  pop.p = 3;
  pop.N = N;
  pop.seed = seed;
  pop.gen_coef = {-2.8, 1.0, 0.5, 0.0};
  pop.x.resize(N * 3);
  pop.y.resize(N);
  rng::Stream stream(seed);
  // Per-row draw order: uniform (x1), normal (x2), uniform (surrogate flip),
  // uniform (y).
  for (std::size_t i = 0; i < N; ++i) {
    const double x1 = stream.next_uniform() < 0.5 ? 1.0 : 0.0;
    const double x2 = stream.next_normal();
    const double x3 = stream.next_uniform() < 0.15 ? 1.0 - x1 : x1;
    pop.x[i * 3 + 0] = x1;
    pop.x[i * 3 + 1] = x2;
    pop.x[i * 3 + 2] = x3;
    const double eta = pop.gen_coef[0] + pop.gen_coef[1] * x1 + pop.gen_coef[2] * x2;
    const std::uint8_t yi = stream.next_uniform() < expit_clamped(eta) ? 1 : 0;
    pop.y[i] = yi;
    pop.case_count += yi;
  }
  return pop;
}

std::vector<ComparisonRow> replicate_two_phase(const TwoPhaseConfig& cfg) {
  cfg.validate();
  static const char* kModel = "y ~ x1 + x2";
  const Population cohort = make_two_phase_cohort(
      cfg.cohort_size, rng::substream(cfg.base_seed, rng::kTagTwoPhaseCohort, 0));
  const RsqSummary census = census_rsq(cohort, kModel);
  if (cfg.cohort_only) return {census_row("full_cohort", census)};
  if (cohort.degenerate())
    throw InvalidArgumentError("replicate_two_phase: cohort has a single class");

  // Phase-two strata: outcome x surrogate exposure.
  const auto strat = [&cohort](std::size_t i) {
    return static_cast<int>(2 * cohort.y[i] + (cohort.x[i * 3 + 2] > 0.5 ? 1 : 0));
  };
  std::array<std::size_t, 4> cell_sizes{};
  for (std::size_t i = 0; i < cohort.N; ++i) ++cell_sizes[static_cast<std::size_t>(strat(i))];
  const std::size_t min_cell = *std::min_element(cell_sizes.begin(), cell_sizes.end());
  // Budget matched to the case-control sample, capped by the smallest cell.
  const std::size_t per_cell = std::min(2 * cohort.case_count / 4, min_cell);
  if (per_cell < 1)
    throw InvalidArgumentError("replicate_two_phase: a stratification cell is empty");

  const std::size_t R = cfg.single_draw ? 1 : cfg.replicates;
  std::vector<RepResult> slots_cc(R), slots_tp(R);
  std::exception_ptr first_error = nullptr;
  const ModelSpec spec = parse_formula(kModel);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t rep = 0; rep < static_cast<std::int64_t>(R); ++rep) {
    try {
      const DesignSample cc = draw_case_control(
          cohort, 1, rng::substream(cfg.base_seed, rng::kTagTwoPhaseCc,
                                    static_cast<std::uint64_t>(rep)));
      slots_cc[rep] = fit_both(cc, kModel);
    } catch (const FitError&) {
      slots_cc[rep].ok = false;
    } catch (...) {
#pragma omp critical(svyr2_harness_first_error)
      if (!first_error) first_error = std::current_exception();
    }
    try {
      const DesignSample tp = draw_two_phase_balanced(
          cohort, strat, per_cell,
          rng::substream(cfg.base_seed, rng::kTagTwoPhaseBal,
                         static_cast<std::uint64_t>(rep)));
      const RsqSummary design =
          rsq_summary(fit_logistic(build_dataset(sample_table(tp), spec, "weight").data));
      slots_tp[rep].dcs = design.design_cox_snell;
      slots_tp[rep].dng = design.design_nagelkerke;
      slots_tp[rep].ok = true;
    } catch (const FitError&) {
      slots_tp[rep].ok = false;
    } catch (...) {
#pragma omp critical(svyr2_harness_first_error)
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<ComparisonRow> rows;
  const double cc_fraction = static_cast<double>(cohort.case_count) /
                             static_cast<double>(cohort.N - cohort.case_count);
  rows.push_back(finish_row("case_control", cc_fraction, slots_cc));
  rows.push_back(finish_row("two_phase",
                            static_cast<double>(4 * per_cell) / static_cast<double>(cohort.N),
                            slots_tp));
  rows.push_back(census_row("full_cohort", census));
  return rows;
}

}  // namespace svyr2
