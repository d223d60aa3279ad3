// Copyright 2026 The dplr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dplr/harness/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dplr/ambssgd/ambssgd.h"
#include "dplr/core/rng.h"
#include "dplr/core/status.h"
#include "dplr/eval/risk.h"
#include "dplr/ssgd/ssgd.h"

namespace dplr {
namespace {

constexpr std::uint64_t kDataFork = 0;
constexpr std::uint64_t kTrainFork = 1;
constexpr std::uint64_t kTestFork = 2;

Json ConstantsJson(const std::vector<std::pair<std::string, double>>& list) {
  Json out = Json::object();
  for (const auto& [name, value] : list) out[name] = value;
  return out;
}

Json PrivacyJson(const PrivacyStatement& p) {
  Json out;
  out["epsilon"] = p.epsilon;
  out["delta"] = p.delta;
  out["alpha"] = p.alpha;
  out["rho"] = p.rho;
  out["mechanism"] = p.mechanism;
  out["assumed_constants"] = ConstantsJson(p.assumed_constants);
  return out;
}

Json Quantiles(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return std::isnan(v); }),
               values.end());
  if (values.empty()) return nullptr;
  Json out;
  out["first"] = values.front();
  out["last"] = values.back();
  std::sort(values.begin(), values.end());
  out["min"] = values.front();
  out["median"] = values[values.size() / 2];
  out["max"] = values.back();
  return out;
}

std::string TraceRow(std::size_t t, const IterationRecord& rec, double risk) {
  return absl::StrFormat("%d,%.12g,%.12g,%d,%.12g\n", t, rec.gamma, rec.zeta,
                         rec.clip_count, risk);
}

struct Trained {
  Vector w_bar;
  double clip_fraction = 0.0;
  Json hyper = Json::object();
  Json trace = Json::object();
  PrivacyStatement privacy;
  std::vector<std::string> warnings;
  std::string trace_csv;
};

absl::StatusOr<Trained> TrainSsgd(const ExperimentConfig& c,
                                  const DistributionSpec& spec,
                                  const Dataset& data, SeededRng& rng) {
  Trained out;
  SsgdConfig cfg;
  SsgdPrivacyConstants privacy{c.c3, c.eps_cap_c};
  std::vector<std::pair<std::string, double>> assumed;
  if (c.paper_mode) {
    DPLR_ASSIGN_OR_RETURN(
        cfg, SsgdIsotropicPreset(spec, data.size(), c.epsilon, c.delta, privacy));
    assumed = {{"c3", c.c3}, {"eps_cap_c", c.eps_cap_c}, {"paper_mode", 1.0}};
    if (!spec.h.IsIdentity()) {
      out.warnings.push_back("--paper-mode preset assumes H = I");
    }
  } else {
    SsgdDerivationOptions options;
    options.c1 = c.c1;
    options.c2 = c.c2;
    options.privacy = privacy;
    DPLR_ASSIGN_OR_RETURN(
        SsgdDerivation derived,
        DeriveSsgdHyperparams(spec, data.size(), c.epsilon, c.delta, options));
    cfg = derived.config;
    assumed = derived.assumed_constants;
    out.warnings = derived.warnings;
  }
  if (c.eta) cfg.eta = *c.eta;
  if (c.zeta) cfg.zeta = *c.zeta;
  if (c.alpha) {
    cfg.alpha = *c.alpha;
    out.warnings.push_back(
        "train.alpha overrides the calibrated noise; the epsilon statement no "
        "longer applies");
  }
  if (c.b || c.s || c.T) {
    out.warnings.push_back("train.b/s/T are ignored by ssgd");
  }

  SsgdOptions options;
  DPLR_ASSIGN_OR_RETURN(SsgdResult result, SsgdTrain(data, cfg, rng, options));
  out.w_bar = std::move(result.w_bar);
  out.clip_fraction = static_cast<double>(result.trace.clip_count) /
                      static_cast<double>(result.trace.steps);
  out.hyper["eta"] = cfg.eta;
  out.hyper["zeta"] = cfg.zeta;
  out.hyper["alpha"] = cfg.alpha;
  out.trace["steps"] = result.trace.steps;
  out.trace["clip_count"] = result.trace.clip_count;
  out.trace["tail_length"] = result.trace.tail_length;
  out.trace["final_iterate_norm"] = result.trace.final_iterate_norm;
  out.privacy.epsilon = c.epsilon;
  out.privacy.delta = c.delta;
  out.privacy.alpha = cfg.alpha;
  out.privacy.rho = std::numeric_limits<double>::quiet_NaN();
  out.privacy.mechanism =
      "ssgd: one-pass shuffled single-sample Gaussian mechanism, "
      "amplification by shuffling (not zCDP-accounted)";
  out.privacy.assumed_constants = assumed;
  return out;
}

absl::StatusOr<Trained> TrainMinibatch(const ExperimentConfig& c,
                                       const DistributionSpec& spec,
                                       const Dataset& data, SeededRng& rng,
                                       bool baseline) {
  Trained out;
  AmbssgdDerivationOptions options;
  options.c1 = c.c1;
  options.batch_policy = c.batch_policy;
  options.domain_size = c.domain_size;
  options.delta_width = c.delta_width;
  options.alpha_form = c.alpha_form;
  AmbssgdConfig cfg;
  std::vector<std::pair<std::string, double>> assumed;
  Json condition = nullptr;
  if (baseline) {
    DPLR_ASSIGN_OR_RETURN(AmbssgdDerivation derived,
                          DeriveBaselineConfig(spec, data.size(), options));
    cfg = derived.config;
    assumed = derived.assumed_constants;
    out.warnings = derived.warnings;
    out.warnings.push_back("algorithm=baseline ignores privacy fields");
  } else if (c.paper_mode) {
    DPLR_ASSIGN_OR_RETURN(cfg, AmbssgdIsotropicPreset(spec, data.size(),
                                                      c.epsilon, c.delta, c.c1));
    assumed = {{"c1", c.c1}, {"K2", spec.k2}, {"paper_mode", 1.0}};
    if (!spec.h.IsIdentity()) {
      out.warnings.push_back("--paper-mode preset assumes H = I");
    }
  } else {
    DPLR_ASSIGN_OR_RETURN(
        AmbssgdDerivation derived,
        DeriveAmbssgdHyperparams(spec, data.size(), c.epsilon, c.delta, options));
    cfg = derived.config;
    assumed = derived.assumed_constants;
    out.warnings = derived.warnings;
    condition = Json::object();
    condition["lhs"] = derived.batch_condition_lhs;
    condition["rhs"] = derived.batch_condition_rhs;
    condition["holds"] = derived.batch_condition_ok;
  }
  if (c.eta) cfg.eta = *c.eta;
  if (c.b) cfg.b = *c.b;
  if (c.s) cfg.s = *c.s;
  if (c.T) cfg.T = *c.T;
  if (c.alpha && !baseline) cfg.alpha = *c.alpha;
  if (c.zeta) {
    cfg.fixed_zeta = *c.zeta;
    if (!baseline) {
      out.warnings.push_back(
          "train.zeta fixes the clipping norm; the adaptive threshold search "
          "is skipped");
    }
  }
  DPLR_RETURN_IF_ERROR(cfg.Validate(data.size()));

  std::vector<double> iterate_risk;
  AmbssgdOptions hooks;
  if (c.trace) {
    iterate_risk.reserve(cfg.T);
    hooks.on_iterate = [&](std::size_t, std::span<const double> w) {
      iterate_risk.push_back(ExcessRisk(w, spec).value_or(
          std::numeric_limits<double>::quiet_NaN()));
    };
  }
  DPLR_ASSIGN_OR_RETURN(
      AmbssgdResult result,
      baseline ? NonprivateBaselineTrain(data, cfg, rng, hooks)
               : AmbssgdTrain(data, cfg, rng, hooks));
  out.w_bar = std::move(result.w_bar);
  const AmbssgdTrace& tr = result.trace;
  out.clip_fraction = static_cast<double>(tr.total_clipped) /
                      static_cast<double>(cfg.T * cfg.b);

  out.hyper["eta"] = cfg.eta;
  out.hyper["b"] = cfg.b;
  out.hyper["s"] = cfg.s;
  out.hyper["T"] = cfg.T;
  out.hyper["B"] = cfg.domain_size;
  out.hyper["delta_width"] = cfg.Stat().EffectiveDelta();
  out.hyper["alpha"] = cfg.alpha;
  out.hyper["rx"] = cfg.rx;
  out.hyper["fixed_zeta"] =
      cfg.fixed_zeta ? Json(*cfg.fixed_zeta) : Json(nullptr);
  out.hyper["batch_condition"] = condition;

  std::vector<double> gammas, zetas;
  for (const IterationRecord& rec : tr.iterations) {
    gammas.push_back(rec.gamma);
    zetas.push_back(rec.zeta);
  }
  out.trace["iterations"] = tr.iterations.size();
  out.trace["total_clipped"] = tr.total_clipped;
  out.trace["iterations_with_clipping"] = tr.iterations_with_clipping;
  out.trace["saturated_searches"] = tr.saturated_searches;
  out.trace["dropped_samples"] = tr.dropped_samples;
  out.trace["tail_length"] = tr.tail_length;
  out.trace["gamma"] = Quantiles(gammas);
  out.trace["zeta"] = Quantiles(zetas);
  if (tr.saturated_searches > 0) {
    out.warnings.push_back(absl::StrFormat(
        "%d threshold searches saturated at the top of the grid",
        tr.saturated_searches));
  }
  if (tr.dropped_samples > 0) {
    out.warnings.push_back(
        absl::StrFormat("dropped %d samples", tr.dropped_samples));
  }
  if (c.trace) {
    out.trace_csv = "t,gamma_t,zeta_t,clip_count,iterate_excess_risk\n";
    for (std::size_t t = 0; t < tr.iterations.size(); ++t) {
      out.trace_csv += TraceRow(t + 1, tr.iterations[t], iterate_risk[t]);
    }
  }

  out.privacy.delta = c.delta;
  out.privacy.assumed_constants = assumed;
  if (baseline) {
    out.privacy.epsilon = std::numeric_limits<double>::infinity();
    out.privacy.alpha = 0.0;
    out.privacy.rho = std::numeric_limits<double>::infinity();
    out.privacy.mechanism = "none (non-private baseline)";
  } else {
    const double rho = result.ledger.TotalRho();
    DPLR_ASSIGN_OR_RETURN(const double composed,
                          ComposeAmbssgdRho(cfg.alpha, static_cast<std::int64_t>(cfg.T)));
    if (std::abs(rho - composed) > 1e-12 * composed) {
      return NumericFailureError(absl::StrFormat(
          "ledger total rho %.17g disagrees with 1/alpha^2 = %.17g", rho,
          composed));
    }
    out.privacy.alpha = cfg.alpha;
    out.privacy.rho = rho;
    DPLR_ASSIGN_OR_RETURN(out.privacy.epsilon, EpsFromRho(rho, c.delta));
    out.privacy.mechanism =
        "ambssgd: per iteration a private threshold search (rho 1/(2 alpha^2)) "
        "and a Gaussian clipped-gradient step (rho 1/(2 alpha^2)) on disjoint "
        "slices; iterations composed in parallel";
    out.privacy.assumed_constants.emplace_back("requested_epsilon", c.epsilon);
  }
  return out;
}

absl::StatusOr<Trained> TrainOls(const ExperimentConfig& c, const Dataset& data) {
  Trained out;
  DPLR_ASSIGN_OR_RETURN(out.w_bar, OlsSolve(data, c.ridge));
  out.hyper["ridge"] = c.ridge;
  out.warnings.push_back("algorithm=ols ignores privacy fields");
  out.privacy.epsilon = std::numeric_limits<double>::infinity();
  out.privacy.delta = c.delta;
  out.privacy.rho = std::numeric_limits<double>::infinity();
  out.privacy.mechanism = "none (ordinary least squares)";
  return out;
}

}  // namespace

std::string RunCsvHeader() {
  return "algorithm,N,d,kappa,sigma,epsilon,delta,seed,excess_risk,"
         "clip_fraction,wallclock_ms";
}

std::string RunCsvRow(const RunSummary& s) {
  return absl::StrFormat("%s,%d,%d,%.12g,%.12g,%.12g,%.12g,%d,%.12g,%.12g,%.3f",
                         s.algorithm, s.n, s.d, s.kappa, s.sigma, s.epsilon,
                         s.delta, s.seed, s.excess_risk, s.clip_fraction,
                         s.wallclock_ms);
}

std::uint64_t RunStreamSeed(std::uint64_t seed, std::uint64_t run_index) {
  return DeriveStreamSeed(seed, run_index);
}

Json WithoutTiming(const Json& report) {
  Json copy = report;
  if (copy.is_object()) copy.erase("timing");
  return copy;
}

absl::StatusOr<Dataset> GenerateRunData(const ExperimentConfig& config,
                                        std::uint64_t seed,
                                        std::uint64_t run_index) {
  DPLR_ASSIGN_OR_RETURN(const DistributionSpec spec, config.Spec());
  SeededRng data_rng =
      SeededRng(RunStreamSeed(seed, run_index)).Fork(kDataFork);
  return Generate(spec, config.n, data_rng);
}

absl::StatusOr<RunOutput> RunSingle(const ExperimentConfig& config,
                                    std::uint64_t seed, std::uint64_t run_index,
                                    const DatasetFile* data) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t stream = RunStreamSeed(seed, run_index);
  const SeededRng root(stream);

  DistributionSpec spec;
  Dataset generated(1);
  const Dataset* train = nullptr;
  if (data != nullptr) {
    if (!data->spec.has_value()) {
      return absl::InvalidArgumentError(
          "dataset file carries no distribution spec; risk cannot be evaluated");
    }
    spec = *data->spec;
    train = &data->data;
  } else {
    DPLR_ASSIGN_OR_RETURN(spec, config.Spec());
    SeededRng data_rng = root.Fork(kDataFork);
    DPLR_ASSIGN_OR_RETURN(generated, Generate(spec, config.n, data_rng));
    train = &generated;
  }
  SeededRng train_rng = root.Fork(kTrainFork);

  Trained trained;
  switch (config.algorithm) {
    case Algorithm::kSsgd: {
      DPLR_ASSIGN_OR_RETURN(trained, TrainSsgd(config, spec, *train, train_rng));
      break;
    }
    case Algorithm::kAmbssgd: {
      DPLR_ASSIGN_OR_RETURN(trained, TrainMinibatch(config, spec, *train,
                                                    train_rng, false));
      break;
    }
    case Algorithm::kBaseline: {
      DPLR_ASSIGN_OR_RETURN(trained, TrainMinibatch(config, spec, *train,
                                                    train_rng, true));
      break;
    }
    case Algorithm::kOls: {
      DPLR_ASSIGN_OR_RETURN(trained, TrainOls(config, *train));
      break;
    }
  }

  RunOutput out;
  DPLR_ASSIGN_OR_RETURN(const double risk, ExcessRisk(trained.w_bar.span(), spec));
  const DerivedConstants constants = DeriveConstants(spec).value_or(DerivedConstants{});

  RunSummary& s = out.summary;
  s.algorithm = std::string(AlgorithmName(config.algorithm));
  s.n = train->size();
  s.d = train->dim();
  s.kappa = constants.kappa;
  s.sigma = spec.sigma;
  s.epsilon = config.epsilon;
  s.delta = config.delta;
  s.seed = seed;
  s.excess_risk = risk;
  s.clip_fraction = trained.clip_fraction;

  Json& r = out.report;
  r["config"] = Json::object();
  for (const auto& [key, value] : config.source.entries()) r["config"][key] = value;
  r["algorithm"] = s.algorithm;
  r["seed"] = seed;
  r["run_index"] = run_index;
  r["stream_seed"] = stream;
  r["data"] = {{"n", s.n}, {"d", s.d}, {"source", data ? "file" : "generated"}};
  r["spec"] = {{"family", std::string(FamilyName(spec.family))},
               {"eigenvalues", std::vector<double>(spec.h.eigenvalues().begin(),
                                                   spec.h.eigenvalues().end())},
               {"w_star", spec.w_star.values()},
               {"sigma", spec.sigma},
               {"tail_a", spec.tail_a},
               {"k2", spec.k2},
               {"rx2", constants.rx2},
               {"kappa", constants.kappa}};
  r["privacy"] = PrivacyJson(trained.privacy);
  r["hyperparameters"] = trained.hyper;
  r["trace_summary"] = trained.trace;
  Json result;
  result["excess_risk"] = risk;
  result["w_bar_norm"] = Norm2(trained.w_bar.span());
  result["w_bar"] = trained.w_bar.values();
  result["clip_fraction"] = trained.clip_fraction;
  if (config.n_test > 0) {
    SeededRng test_rng = root.Fork(kTestFork);
    DPLR_ASSIGN_OR_RETURN(const Dataset test,
                          Generate(spec, config.n_test, test_rng));
    DPLR_ASSIGN_OR_RETURN(const RiskReport report,
                          EvaluateRisk(trained.w_bar.span(), spec, test));
    result["excess_risk_empirical"] = report.excess_risk_empirical;
    result["n_test"] = report.n_test;
  }
  r["result"] = result;
  r["warnings"] = trained.warnings;

  s.wallclock_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  r["timing"] = {{"wallclock_ms", s.wallclock_ms}};
  out.trace_csv = std::move(trained.trace_csv);
  out.w_bar = std::move(trained.w_bar);
  return out;
}

}  // namespace dplr
