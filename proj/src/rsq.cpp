#include "svyr2/rsq.hpp"

#include <cmath>
#include <limits>

#include "svyr2/formula.hpp"
#include "svyr2/glm.hpp"
#include "svyr2/sampling.hpp"

namespace svyr2 {

namespace {

// loglik - null_loglik with the negative-rounding guard: nesting holds
// analytically, so tiny negative differences are floating-point noise.
double loglik_ratio_checked(const FitResult& fit) {
  if (!fit.converged)
    throw NotConvergedError("R^2 requested from an unconverged fit");
  const double lr = fit.loglik - fit.null_loglik;
  if (lr < -1e-8) throw FitError("internal: loglik ratio below the nesting bound");
  return std::max(lr, 0.0);
}

}  // namespace

double cox_snell(const FitResult& fit) {
  const double lr = loglik_ratio_checked(fit);
  return 1.0 - std::exp(-2.0 * lr / static_cast<double>(fit.n));
}

double nagelkerke(const FitResult& fit) {
  if (fit.family != Family::logistic)
    throw FamilyError("nagelkerke: defined for the logistic family only");
  const double denom = 1.0 - std::exp(2.0 * fit.null_loglik / static_cast<double>(fit.n));
  return cox_snell(fit) / denom;
}

double design_cox_snell(const FitResult& fit) {
  const double lr = loglik_ratio_checked(fit);
  if (!(fit.weight_sum > 0.0))
    throw InvalidArgumentError("design_cox_snell: weight_sum must be positive");
  return 1.0 - std::exp(-2.0 * lr / fit.weight_sum);
}

double design_nagelkerke(const FitResult& fit) {
  if (fit.family != Family::logistic)
    throw FamilyError("design_nagelkerke: defined for the logistic family only");
  const double denom = 1.0 - std::exp(2.0 * fit.null_loglik / fit.weight_sum);
  return design_cox_snell(fit) / denom;
}

RsqSummary rsq_summary(const FitResult& fit) {
  RsqSummary s;
  s.cox_snell = cox_snell(fit);
  s.design_cox_snell = design_cox_snell(fit);
  if (fit.family == Family::logistic) {
    s.nagelkerke = nagelkerke(fit);
    s.design_nagelkerke = design_nagelkerke(fit);
  } else {
    s.nagelkerke = std::numeric_limits<double>::quiet_NaN();
    s.design_nagelkerke = std::numeric_limits<double>::quiet_NaN();
  }
  s.loglik_ratio = fit.loglik - fit.null_loglik;
  s.n = fit.n;
  s.weight_sum = fit.weight_sum;
  return s;
}

RsqSummary census_rsq(const Population& pop, const std::string& formula) {
  if (pop.degenerate())
    throw DegenerateResponseError("census fit: population has a single outcome class");
  Dataset data;
  if (formula.empty()) {
    data = population_dataset(pop);
  } else {
    const ColumnTable table = population_table(pop);
    const ModelSpec spec = parse_formula(formula);
    data = build_dataset(table, spec, "").data;
  }
  return rsq_summary(fit_logistic(data));
}

}  // namespace svyr2
