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

#include "dplr/harness/config.h"

#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "dplr/core/status.h"
#include "dplr/core/text.h"

namespace dplr {
namespace {

absl::Status KeyError(const std::string& key, const absl::Status& status) {
  return absl::InvalidArgumentError(
      absl::StrFormat("config key '%s': %s", key, std::string(status.message())));
}

// Typed readers; each leaves `out` untouched when the key is absent.
absl::Status ReadDouble(const FlatConfig& f, const std::string& key,
                        double& out) {
  if (auto v = f.Get(key)) {
    absl::StatusOr<double> parsed = ParseDouble(*v);
    if (!parsed.ok()) return KeyError(key, parsed.status());
    out = *parsed;
  }
  return absl::OkStatus();
}

absl::Status ReadDouble(const FlatConfig& f, const std::string& key,
                        std::optional<double>& out) {
  if (auto v = f.Get(key)) {
    absl::StatusOr<double> parsed = ParseDouble(*v);
    if (!parsed.ok()) return KeyError(key, parsed.status());
    out = *parsed;
  }
  return absl::OkStatus();
}

absl::Status ReadSize(const FlatConfig& f, const std::string& key,
                      std::size_t& out) {
  if (auto v = f.Get(key)) {
    absl::StatusOr<std::uint64_t> parsed = ParseUint(*v);
    if (!parsed.ok()) return KeyError(key, parsed.status());
    out = static_cast<std::size_t>(*parsed);
  }
  return absl::OkStatus();
}

absl::Status ReadSize(const FlatConfig& f, const std::string& key,
                      std::optional<std::size_t>& out) {
  if (auto v = f.Get(key)) {
    absl::StatusOr<std::uint64_t> parsed = ParseUint(*v);
    if (!parsed.ok()) return KeyError(key, parsed.status());
    out = static_cast<std::size_t>(*parsed);
  }
  return absl::OkStatus();
}

absl::Status ReadBool(const FlatConfig& f, const std::string& key, bool& out) {
  if (auto v = f.Get(key)) {
    absl::StatusOr<bool> parsed = ParseBool(*v);
    if (!parsed.ok()) return KeyError(key, parsed.status());
    out = *parsed;
  }
  return absl::OkStatus();
}

absl::Status ReadDoubles(const FlatConfig& f, const std::string& key,
                         std::vector<double>& out) {
  if (auto v = f.Get(key)) {
    absl::StatusOr<std::vector<double>> parsed = ParseDoubleList(*v);
    if (!parsed.ok()) return KeyError(key, parsed.status());
    out = *std::move(parsed);
  }
  return absl::OkStatus();
}

absl::Status ReadSizes(const FlatConfig& f, const std::string& key,
                       std::vector<std::size_t>& out) {
  if (auto v = f.Get(key)) {
    absl::StatusOr<std::vector<std::uint64_t>> parsed = ParseUintList(*v);
    if (!parsed.ok()) return KeyError(key, parsed.status());
    out.assign(parsed->begin(), parsed->end());
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<FlatConfig> FlatConfig::Parse(std::string_view text) {
  FlatConfig config;
  std::size_t line_no = 0;
  for (absl::string_view raw :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    ++line_no;
    std::string_view line(raw.data(), raw.size());
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = StripWhitespace(line);
    if (line.empty()) continue;
    absl::Status status = config.Assign(line);
    if (!status.ok()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "config line %d: %s", line_no, std::string(status.message())));
    }
  }
  return config;
}

absl::StatusOr<FlatConfig> FlatConfig::Load(const std::string& path) {
  DPLR_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  return Parse(text);
}

absl::Status FlatConfig::Assign(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "expected key=value, got '%s'", std::string(assignment)));
  }
  const std::string key(StripWhitespace(assignment.substr(0, eq)));
  if (key.empty()) return absl::InvalidArgumentError("empty config key");
  Set(key, std::string(StripWhitespace(assignment.substr(eq + 1))));
  return absl::OkStatus();
}

void FlatConfig::Set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

std::optional<std::string> FlatConfig::Get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string FlatConfig::Serialize() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    absl::StrAppend(&out, key, "=", value, "\n");
  }
  return out;
}

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSsgd:
      return "ssgd";
    case Algorithm::kAmbssgd:
      return "ambssgd";
    case Algorithm::kBaseline:
      return "baseline";
    case Algorithm::kOls:
      return "ols";
  }
  return "unknown";
}

absl::StatusOr<Algorithm> ParseAlgorithm(std::string_view name) {
  if (name == "ssgd") return Algorithm::kSsgd;
  if (name == "ambssgd") return Algorithm::kAmbssgd;
  if (name == "baseline") return Algorithm::kBaseline;
  if (name == "ols") return Algorithm::kOls;
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown algorithm '%s' (ssgd, ambssgd, baseline, ols)", std::string(name)));
}

const std::vector<std::pair<std::string, std::string>>& ConfigKeys() {
  static const auto* keys = new std::vector<std::pair<std::string, std::string>>{
      {"algorithm", "ssgd | ambssgd | baseline | ols (default ambssgd)"},
      {"spec.d", "dimension (default 10)"},
      {"spec.kappa", "condition number of H (default 1)"},
      {"spec.sigma", "response noise std (default 1)"},
      {"spec.family", "gaussian | scaled_uniform"},
      {"spec.k2", "tail constant K2 (default 2)"},
      {"data.n", "training rows N (default 10000)"},
      {"data.n_test", "held-out rows for empirical risk (default 0 = off)"},
      {"privacy.epsilon", "epsilon (default 1)"},
      {"privacy.delta", "delta (default 1e-6)"},
      {"privacy.alpha_form", "tight | standard | simplified (default: auto)"},
      {"constants.c1", "iteration / step-size constant (default 1)"},
      {"constants.c2", "single-sample step-size constant (default 1)"},
      {"constants.c3", "single-sample noise constant (default 1)"},
      {"constants.eps_cap_c", "single-sample epsilon cap constant (default 1)"},
      {"train.eta", "override step size"},
      {"train.zeta", "override clipping norm (ssgd; ambssgd fixed clip)"},
      {"train.alpha", "override noise multiplier"},
      {"train.b", "override batch size"},
      {"train.s", "override stat slice size"},
      {"train.T", "override iteration count"},
      {"train.B", "user-supplied domain size instead of the oracle value"},
      {"train.delta_width", "threshold grid width (default B * 2^-40)"},
      {"train.batch_policy", "error | warn on the batch-size condition"},
      {"train.ridge", "ridge for ols (default 0)"},
      {"run.seeds", "comma-separated seeds (default 1)"},
      {"run.paper_mode", "use the isotropic-Gaussian preset constants"},
      {"run.trace", "emit the per-iteration trace CSV"},
      {"sweep.N", "comma list of N values"},
      {"sweep.d", "comma list of dimensions"},
      {"sweep.epsilon", "comma list of epsilons"},
      {"sweep.sigma", "comma list of sigmas"},
      {"sweep.kappa", "comma list of condition numbers"},
  };
  return *keys;
}

bool ExperimentConfig::HasSweepAxes() const {
  return !sweep_n.empty() || !sweep_d.empty() || !sweep_epsilon.empty() ||
         !sweep_sigma.empty() || !sweep_kappa.empty();
}

absl::StatusOr<DistributionSpec> ExperimentConfig::Spec() const {
  DPLR_ASSIGN_OR_RETURN(DistributionSpec spec, MakeSpec(d, kappa, sigma, family));
  spec.k2 = k2;
  DPLR_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const FlatConfig& flat) {
  for (const auto& [key, value] : flat.entries()) {
    bool known = false;
    for (const auto& entry : ConfigKeys()) known = known || entry.first == key;
    if (!known) {
      return absl::InvalidArgumentError(
          absl::StrFormat("unknown config key '%s'", key));
    }
  }
  ExperimentConfig c;
  c.source = flat;
  if (auto v = flat.Get("algorithm")) {
    DPLR_ASSIGN_OR_RETURN(c.algorithm, ParseAlgorithm(*v));
  }
  DPLR_RETURN_IF_ERROR(ReadSize(flat, "spec.d", c.d));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "spec.kappa", c.kappa));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "spec.sigma", c.sigma));
  if (auto v = flat.Get("spec.family")) {
    DPLR_ASSIGN_OR_RETURN(c.family, ParseFamily(*v));
  }
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "spec.k2", c.k2));
  DPLR_RETURN_IF_ERROR(ReadSize(flat, "data.n", c.n));
  DPLR_RETURN_IF_ERROR(ReadSize(flat, "data.n_test", c.n_test));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "privacy.epsilon", c.epsilon));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "privacy.delta", c.delta));
  if (auto v = flat.Get("privacy.alpha_form")) {
    if (*v == "tight") {
      c.alpha_form = AlphaForm::kTight;
    } else if (*v == "standard") {
      c.alpha_form = AlphaForm::kStandard;
    } else if (*v == "simplified") {
      c.alpha_form = AlphaForm::kSimplified;
    } else if (*v != "auto") {
      return absl::InvalidArgumentError(
          absl::StrFormat("unknown alpha form '%s'", *v));
    }
  }
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "constants.c1", c.c1));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "constants.c2", c.c2));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "constants.c3", c.c3));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "constants.eps_cap_c", c.eps_cap_c));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "train.eta", c.eta));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "train.zeta", c.zeta));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "train.alpha", c.alpha));
  DPLR_RETURN_IF_ERROR(ReadSize(flat, "train.b", c.b));
  DPLR_RETURN_IF_ERROR(ReadSize(flat, "train.s", c.s));
  DPLR_RETURN_IF_ERROR(ReadSize(flat, "train.T", c.T));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "train.B", c.domain_size));
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "train.delta_width", c.delta_width));
  if (auto v = flat.Get("train.batch_policy")) {
    if (*v == "error") {
      c.batch_policy = BatchConditionPolicy::kError;
    } else if (*v == "warn") {
      c.batch_policy = BatchConditionPolicy::kWarn;
    } else {
      return absl::InvalidArgumentError(
          absl::StrFormat("unknown batch policy '%s' (error, warn)", *v));
    }
  }
  DPLR_RETURN_IF_ERROR(ReadDouble(flat, "train.ridge", c.ridge));
  if (auto v = flat.Get("run.seeds")) {
    DPLR_ASSIGN_OR_RETURN(c.seeds, ParseUintList(*v));
  }
  DPLR_RETURN_IF_ERROR(ReadBool(flat, "run.paper_mode", c.paper_mode));
  DPLR_RETURN_IF_ERROR(ReadBool(flat, "run.trace", c.trace));
  DPLR_RETURN_IF_ERROR(ReadSizes(flat, "sweep.N", c.sweep_n));
  DPLR_RETURN_IF_ERROR(ReadSizes(flat, "sweep.d", c.sweep_d));
  DPLR_RETURN_IF_ERROR(ReadDoubles(flat, "sweep.epsilon", c.sweep_epsilon));
  DPLR_RETURN_IF_ERROR(ReadDoubles(flat, "sweep.sigma", c.sweep_sigma));
  DPLR_RETURN_IF_ERROR(ReadDoubles(flat, "sweep.kappa", c.sweep_kappa));

  if (c.seeds.empty()) return absl::InvalidArgumentError("no seeds given");
  if (c.d == 0) return absl::InvalidArgumentError("spec.d must be >= 1");
  if (c.n < 2) return absl::InvalidArgumentError("data.n must be >= 2");
  DPLR_RETURN_IF_ERROR(ValidateBudget(c.epsilon, c.delta));
  for (double eps : c.sweep_epsilon) {
    DPLR_RETURN_IF_ERROR(ValidateBudget(eps, c.delta));
  }
  return c;
}

}  // namespace dplr
