#pragma once

#include <string>

#include "svyr2/dataset.hpp"

namespace svyr2 {

struct Population;  // sampling.hpp

// Classical Cox-Snell: 1 - exp(2*(null_loglik - loglik)/n), loglikelihoods
// as stored in the fit (weighted if the fit was weighted), divisor n. On a
// weighted fit this is the naive statistic an analyst gets by ignoring the
// design. Throws NotConvergedError on unconverged fits.
double cox_snell(const FitResult& fit);

// Classical Nagelkerke: cox_snell / (1 - exp(2*null_loglik/n)).
// Logistic family only; throws FamilyError for Gaussian fits.
double nagelkerke(const FitResult& fit);

// Design-based Cox-Snell: 1 - exp(2*(null_loglik - loglik)/weight_sum).
double design_cox_snell(const FitResult& fit);

// Design-based Nagelkerke: design_cox_snell / (1 - exp(2*null_loglik/weight_sum)).
// The divisor uses N-hat = sum of weights; this is the only choice invariant
// to weight rescaling that collapses to the classical value at unit weights.
double design_nagelkerke(const FitResult& fit);

// All four statistics. For Gaussian fits the Nagelkerke fields are NaN
// (the per-observation likelihood is unbounded, so the rescaling is
// undefined); the direct calls above throw instead.
RsqSummary rsq_summary(const FitResult& fit);

// Census parameters: fits the model to the whole population with unit
// weights. Empty formula means y ~ x1 + ... + xp on the raw columns.
RsqSummary census_rsq(const Population& pop, const std::string& formula = "");

}  // namespace svyr2
