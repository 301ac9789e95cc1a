#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svyr2/config.hpp"
#include "svyr2/errors.hpp"
#include "svyr2/formula.hpp"
#include "svyr2/glm.hpp"
#include "svyr2/harness.hpp"
#include "svyr2/rng.hpp"
#include "svyr2/rsq.hpp"
#include "svyr2/sampling.hpp"
#include "svyr2/table.hpp"
#include "svyr2/table_io.hpp"

namespace {

using namespace svyr2;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const char* condition_label(const std::exception& e) {
  if (dynamic_cast<const SeparationError*>(&e)) return "separation";
  if (dynamic_cast<const SingularSystemError*>(&e)) return "singular system";
  if (dynamic_cast<const DegenerateResponseError*>(&e)) return "degenerate response";
  if (dynamic_cast<const NotConvergedError*>(&e)) return "not converged";
  if (dynamic_cast<const UndefinedRatioError*>(&e)) return "undefined ratio";
  if (dynamic_cast<const FamilyError*>(&e)) return "family";
  if (dynamic_cast<const FitError*>(&e)) return "fit failure";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const InvalidArgumentError*>(&e)) return "invalid argument";
  return "error";
}

int exit_code_for(const std::exception& e) {
  return dynamic_cast<const FitError*>(&e) ? 3 : 2;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw IoError("cannot open output file " + out_path);
  f << text;
  if (!f) throw IoError("cannot write output file " + out_path);
}

std::uint64_t seed_from_env() {
  const char* env = std::getenv(kSeedEnvVar);
  if (!env) return kDefaultBaseSeed;
  const std::string text(env);
  if (text.empty() || text[0] == '-')
    throw InvalidArgumentError(std::string(kSeedEnvVar) + ": cannot parse seed '" + text + "'");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 0);
  if (errno != 0 || end != text.c_str() + text.size())
    throw InvalidArgumentError(std::string(kSeedEnvVar) + ": cannot parse seed '" + text + "'");
  return v;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string data, formula, weights, family = "logistic", out;
  bool json = false;
};

RsqSummary nan_summary(const FitResult& fit) {
  RsqSummary s;
  s.cox_snell = s.nagelkerke = s.design_cox_snell = s.design_nagelkerke = kNan;
  s.loglik_ratio = kNan;
  s.n = fit.n;
  s.weight_sum = fit.weight_sum;
  return s;
}

std::string human_fit_report(const FitResult& fit, const RsqSummary& rsq,
                             const std::vector<std::string>& names) {
  std::string out;
  out += std::string("family: ") + family_name(fit.family) + "\n";
  out += "n: " + std::to_string(fit.n) + "\n";
  out += "weight_sum: " + format_double(fit.weight_sum) + "\n";
  out += std::string("converged: ") + (fit.converged ? "yes" : "no") + " (" +
         std::to_string(fit.iterations) + " iterations)\n";
  out += "loglik: " + format_double(fit.loglik) + "\n";
  out += "null_loglik: " + format_double(fit.null_loglik) + "\n";
  if (fit.family == Family::gaussian_mle) {
    out += "sigma2: " + format_double(fit.sigma2) + "\n";
    out += "null_sigma2: " + format_double(fit.null_sigma2) + "\n";
  }
  std::size_t width = 0;
  for (const auto& n : names) width = std::max(width, n.size());
  out += "coefficients:\n";
  for (std::size_t j = 0; j < names.size(); ++j)
    out += "  " + pad(names[j], width + 2) + format_double(fit.coef[j]) + "\n";
  out += "r2:\n";
  out += "  " + pad("cox_snell", 20) + format_double(rsq.cox_snell) + "\n";
  out += "  " + pad("nagelkerke", 20) + format_double(rsq.nagelkerke) + "\n";
  out += "  " + pad("design_cox_snell", 20) + format_double(rsq.design_cox_snell) + "\n";
  out += "  " + pad("design_nagelkerke", 20) + format_double(rsq.design_nagelkerke) + "\n";
  return out;
}

std::string json_fit_report(const FitResult& fit, const RsqSummary& rsq,
                            const std::vector<std::string>& names) {
  std::string out = "{";
  out += "\"family\": \"" + std::string(family_name(fit.family)) + "\"";
  out += ", \"n\": " + std::to_string(fit.n);
  out += ", \"weight_sum\": " + json_number(fit.weight_sum);
  out += std::string(", \"converged\": ") + (fit.converged ? "true" : "false");
  out += ", \"iterations\": " + std::to_string(fit.iterations);
  out += ", \"loglik\": " + json_number(fit.loglik);
  out += ", \"null_loglik\": " + json_number(fit.null_loglik);
  if (fit.family == Family::gaussian_mle) {
    out += ", \"sigma2\": " + json_number(fit.sigma2);
    out += ", \"null_sigma2\": " + json_number(fit.null_sigma2);
  }
  out += ", \"coefficients\": [";
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out += ", ";
    out += "{\"name\": \"" + json_escape(names[j]) + "\", \"value\": " +
           json_number(fit.coef[j]) + "}";
  }
  out += "], \"r2\": {";
  out += "\"cox_snell\": " + json_number(rsq.cox_snell);
  out += ", \"nagelkerke\": " + json_number(rsq.nagelkerke);
  out += ", \"design_cox_snell\": " + json_number(rsq.design_cox_snell);
  out += ", \"design_nagelkerke\": " + json_number(rsq.design_nagelkerke);
  out += "}}\n";
  return out;
}

int cmd_fit(const FitArgs& a) {
  const ColumnTable table = read_csv(a.data);
  const ModelSpec spec = parse_formula(a.formula);
  const BoundModel bound = build_dataset(table, spec, a.weights);
  const FitResult fit =
      a.family == "logistic" ? fit_logistic(bound.data) : fit_gaussian_mle(bound.data);
  RsqSummary rsq;
  try {
    rsq = rsq_summary(fit);
  } catch (const NotConvergedError& e) {
    std::fprintf(stderr, "warning (not converged): %s; r2 statistics undefined\n", e.what());
    rsq = nan_summary(fit);
  }
  std::vector<std::string> names = {"(intercept)"};
  names.insert(names.end(), bound.colnames.begin(), bound.colnames.end());
  emit(a.json ? json_fit_report(fit, rsq, names) : human_fit_report(fit, rsq, names), a.out);
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string design = "cc", out;
  std::size_t pop_size = 0;  // 0: design-specific default
  std::vector<double> coef = {-6.0, 1.0};
  std::vector<std::size_t> ratios = {1, 2, 5, 10, 20};
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  bool seed_set = false, single_draw = false, json = false;
  bool coef_set = false, ratios_set = false;
};

std::vector<ComparisonRow> run_simulate(const SimulateArgs& a) {
  const std::uint64_t seed = a.seed_set ? a.seed : seed_from_env();
  if (a.design == "cc") {
    ExperimentConfig cfg;
    cfg.pop_size = a.pop_size ? a.pop_size : 100000;
    cfg.gen_coef = a.coef;
    cfg.ratios = a.ratios;
    cfg.replicates = a.replicates;
    cfg.base_seed = seed;
    cfg.single_draw = a.single_draw;
    return replicate_table2(cfg);
  }
  if (a.coef_set || a.ratios_set)
    throw InvalidArgumentError("--coef and --ratios apply only to --design cc");
  TwoPhaseConfig cfg;
  cfg.cohort_size = a.pop_size ? a.pop_size : 4000;
  cfg.replicates = a.replicates;
  cfg.base_seed = seed;
  cfg.single_draw = a.single_draw;
  return replicate_two_phase(cfg);
}

int cmd_simulate(const SimulateArgs& a) {
  const auto rows = run_simulate(a);
  emit(a.json ? to_json(rows) : to_tsv(rows), a.out);
  return 0;
}

// ---------------------------------------------------------------- replicate

struct PublishedRow {
  const char* design;
  double ncs, dcs, nng, dng;
};

constexpr PublishedRow kPublishedTable2[] = {
    {"case_control_m1", 0.21, 0.0039, 0.27, 0.079},
    {"case_control_m2", 0.19, 0.0042, 0.26, 0.084},
    {"case_control_m5", 0.11, 0.0034, 0.18, 0.068},
    {"case_control_m10", 0.072, 0.0036, 0.16, 0.072},
    {"case_control_m20", 0.040, 0.0036, 0.13, 0.072},
    {"population", 0.0037, 0.0037, 0.075, 0.075},
};

constexpr PublishedRow kPublishedEsoph[] = {
    {"esoph_main", 0.14, 0.0005, 0.23, 0.06},
    {"esoph_interaction", 0.14, 0.0005, 0.23, 0.06},
};

template <std::size_t K>
std::string comparison_block(const std::vector<ComparisonRow>& rows,
                             const PublishedRow (&published)[K]) {
  std::string out = "published comparison (ours vs published, absolute difference):\n";
  for (const auto& row : rows) {
    const PublishedRow* pub = nullptr;
    for (const auto& p : published)
      if (row.design == p.design) pub = &p;
    if (!pub) continue;
    const struct {
      const char* stat;
      double ours, theirs;
    } lines[] = {
        {"naive_cs", row.naive_cs, pub->ncs},
        {"design_cs", row.design_cs, pub->dcs},
        {"naive_nag", row.naive_nag, pub->nng},
        {"design_nag", row.design_nag, pub->dng},
    };
    for (const auto& l : lines)
      out += "  " + pad(row.design, 20) + pad(l.stat, 12) + format_double(l.ours) +
             " vs " + format_double(l.theirs) + "  |diff| " +
             format_double(std::fabs(l.ours - l.theirs)) + "\n";
  }
  return out;
}

std::string heuristic_json(const HeuristicResult& m1, const HeuristicResult& census) {
  const auto one = [](const HeuristicResult& h) {
    return std::string("{\"lhs\": ") + json_number(h.lhs) + ", \"rhs\": " + json_number(h.rhs) +
           ", \"ratio\": " + json_number(h.ratio()) + ", \"naive_cs\": " + json_number(h.naive_cs) +
           ", \"census_cs\": " + json_number(h.census_cs) + ", \"n\": " + std::to_string(h.n) +
           ", \"N\": " + std::to_string(h.N) + "}";
  };
  return "{\"m1\": " + one(m1) + ", \"census\": " + one(census) + "}\n";
}

std::string heuristic_human(const HeuristicResult& m1, const HeuristicResult& census) {
  std::string out = "shrinkage heuristic: log(1 - naive_cs)/log(1 - census_cs) vs N/n\n";
  const auto block = [&](const char* label, const HeuristicResult& h, double lo, double hi) {
    std::string s;
    s += std::string(label) + " (n=" + std::to_string(h.n) + ", N=" + std::to_string(h.N) + "):\n";
    s += "  lhs:       " + format_double(h.lhs) + "\n";
    s += "  rhs:       " + format_double(h.rhs) + "\n";
    s += "  lhs/rhs:   " + format_double(h.ratio()) + "\n";
    s += "  naive_cs:  " + format_double(h.naive_cs) + "\n";
    s += "  census_cs: " + format_double(h.census_cs) + "\n";
    s += "  lhs/rhs within [" + format_double(lo) + ", " + format_double(hi) + "]: " +
         (h.ratio() >= lo && h.ratio() <= hi ? "yes" : "no") + "\n";
    return s;
  };
  out += block("case_control m=1", m1, 0.5, 2.0);
  out += block("census sample n=N", census, 0.999, 1.001);
  return out;
}

int cmd_replicate(const std::string& target, bool seed_set, std::uint64_t seed_flag,
                  bool json, const std::string& out_path) {
  const std::uint64_t seed = seed_set ? seed_flag : seed_from_env();
  if (target == "table2") {
    ExperimentConfig cfg;
    cfg.base_seed = seed;
    const auto rows = replicate_table2(cfg);
    emit(json ? to_json(rows) : to_tsv(rows) + comparison_block(rows, kPublishedTable2),
         out_path);
    return 0;
  }
  if (target == "esoph") {
    const auto rows = replicate_esoph();
    emit(json ? to_json(rows) : to_tsv(rows) + comparison_block(rows, kPublishedEsoph),
         out_path);
    return 0;
  }
  if (target == "heuristic") {
    const Population pop =
        generate_population(100000, {-6.0, 1.0}, rng::substream(seed, rng::kTagPopulation, 0));
    const DesignSample m1 =
        draw_case_control(pop, 1, rng::substream(seed, rng::kTagHeuristic, 0));
    const DesignSample census =
        draw_srs(pop, pop.N, rng::substream(seed, rng::kTagHeuristic, 1));
    const HeuristicResult rm1 = heuristic_check(pop, m1);
    const HeuristicResult rcensus = heuristic_check(pop, census);
    emit(json ? heuristic_json(rm1, rcensus) : heuristic_human(rm1, rcensus), out_path);
    return 0;
  }
  // two-phase
  TwoPhaseConfig cfg;
  cfg.base_seed = seed;
  const auto rows = replicate_two_phase(cfg);
  std::string text = to_tsv(rows);
  if (!json) {
    const ComparisonRow &cc = rows[0], &tp = rows[1], &cohort = rows[2];
    const auto band = [&](const char* label, double mean, double se, double target) {
      const bool ok = std::fabs(mean - target) <= 2.0 * se;
      return "  |" + std::string(label) + " - cohort| <= 2*mc_se: " + (ok ? "yes" : "no") +
             " (|diff| " + format_double(std::fabs(mean - target)) + ", 2*mc_se " +
             format_double(2.0 * se) + ")\n";
    };
    text += "pattern checks:\n";
    text += band("mean design_cs(case_control)", cc.design_cs, cc.mc_se_design_cs, cohort.design_cs);
    text += band("mean design_nag(case_control)", cc.design_nag, cc.mc_se_design_nag, cohort.design_nag);
    text += band("mean design_cs(two_phase)", tp.design_cs, tp.mc_se_design_cs, cohort.design_cs);
    text += band("mean design_nag(two_phase)", tp.design_nag, tp.mc_se_design_nag, cohort.design_nag);
    text += "  mean naive_cs(case_control) > cohort cs: " +
            std::string(cc.naive_cs > cohort.naive_cs ? "yes" : "no") + "\n";
  } else {
    text = to_json(rows);
  }
  emit(text, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-based pseudo R2 for survey-weighted regression"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one model from a CSV file and report R2");
  fit_cmd->add_option("--data", fit_args.data, "input CSV path")->required();
  fit_cmd->add_option("--formula", fit_args.formula,
                      "model formula, e.g. \"y ~ x1 + C(g) + a:b + spline(x; 50,65)\"")
      ->required();
  fit_cmd->add_option("--weights", fit_args.weights, "weight column (default: unit weights)");
  fit_cmd->add_option("--family", fit_args.family, "logistic or gaussian")
      ->check(CLI::IsMember({"logistic", "gaussian"}));
  fit_cmd->add_flag("--json", fit_args.json, "machine-readable output");
  fit_cmd->add_option("--out", fit_args.out, "write the report to this path");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a sampling-design experiment");
  sim_cmd->add_option("--design", sim_args.design, "cc or two-phase")
      ->check(CLI::IsMember({"cc", "two-phase"}));
  sim_cmd->add_option("--pop-size", sim_args.pop_size,
                      "population size (default 100000 for cc, 4000 for two-phase)");
  auto* coef_opt =
      sim_cmd->add_option("--coef", sim_args.coef, "generating coefficients (cc only)")
          ->delimiter(',');
  auto* ratios_opt =
      sim_cmd->add_option("--ratios", sim_args.ratios, "controls per case (cc only)")
          ->delimiter(',');
  sim_cmd->add_option("--replicates", sim_args.replicates, "samples per design point");
  auto* sim_seed = sim_cmd->add_option("--seed", sim_args.seed, "base seed");
  sim_cmd->add_flag("--single-draw", sim_args.single_draw, "one sample per design point");
  sim_cmd->add_flag("--json", sim_args.json, "JSON instead of TSV");
  sim_cmd->add_option("--out", sim_args.out, "write the table to this path");

  std::string rep_target;
  std::uint64_t rep_seed = 0;
  bool rep_json = false;
  std::string rep_out;
  auto* rep_cmd = app.add_subcommand("replicate", "Re-run a bundled experiment");
  rep_cmd->add_option("target", rep_target, "table2, esoph, heuristic, or two-phase")
      ->required()
      ->check(CLI::IsMember({"table2", "esoph", "heuristic", "two-phase"}));
  auto* rep_seed_opt = rep_cmd->add_option("--seed", rep_seed, "base seed");
  rep_cmd->add_flag("--json", rep_json, "JSON instead of text");
  rep_cmd->add_option("--out", rep_out, "write the report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_args);
    if (sim_cmd->parsed()) {
      sim_args.seed_set = sim_seed->count() > 0;
      sim_args.coef_set = coef_opt->count() > 0;
      sim_args.ratios_set = ratios_opt->count() > 0;
      return cmd_simulate(sim_args);
    }
    return cmd_replicate(rep_target, rep_seed_opt->count() > 0, rep_seed, rep_json, rep_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error (%s): %s\n", condition_label(e), e.what());
    return exit_code_for(e);
  }
}
