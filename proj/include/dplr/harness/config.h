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

#ifndef DPLR_HARNESS_CONFIG_H_
#define DPLR_HARNESS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dplr/ambssgd/ambssgd.h"
#include "dplr/datagen/distribution.h"
#include "dplr/privacy/accountant.h"

namespace dplr {

// Flat key=value configuration. One assignment per line; '#' starts a
// comment; keys are dotted (spec.sigma=0.5). Later assignments win.
class FlatConfig {
 public:
  static absl::StatusOr<FlatConfig> Parse(std::string_view text);
  static absl::StatusOr<FlatConfig> Load(const std::string& path);

  // "key=value".
  absl::Status Assign(std::string_view assignment);
  void Set(const std::string& key, const std::string& value);
  void Erase(const std::string& key) { entries_.erase(key); }

  bool Has(const std::string& key) const { return entries_.count(key) > 0; }
  std::optional<std::string> Get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Sorted key=value lines.
  std::string Serialize() const;

 private:
  std::map<std::string, std::string> entries_;
};

enum class Algorithm { kSsgd, kAmbssgd, kBaseline, kOls };

std::string_view AlgorithmName(Algorithm algorithm);
absl::StatusOr<Algorithm> ParseAlgorithm(std::string_view name);

// Everything that determines a run apart from the seed.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kAmbssgd;

  // Generating distribution: H has eigenvalues spaced geometrically from
  // kappa down to 1, w* = (1, ..., 1) / sqrt(d).
  std::size_t d = 10;
  double kappa = 1.0;
  double sigma = 1.0;
  CovariateFamily family = CovariateFamily::kGaussian;
  double k2 = 2.0;

  std::size_t n = 10000;
  std::size_t n_test = 0;  // held-out rows for the empirical risk; 0 = off

  double epsilon = 1.0;
  double delta = 1e-6;
  std::optional<AlphaForm> alpha_form;

  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double eps_cap_c = 1.0;
  bool paper_mode = false;
  BatchConditionPolicy batch_policy = BatchConditionPolicy::kError;

  // Explicit overrides of derived hyperparameters.
  std::optional<double> eta;
  std::optional<double> zeta;
  std::optional<double> alpha;
  std::optional<std::size_t> b;
  std::optional<std::size_t> s;
  std::optional<std::size_t> T;
  std::optional<double> domain_size;
  double delta_width = 0.0;
  double ridge = 0.0;

  std::vector<std::uint64_t> seeds = {1};
  bool trace = false;

  // Sweep axes; empty means "not swept".
  std::vector<std::size_t> sweep_n;
  std::vector<std::size_t> sweep_d;
  std::vector<double> sweep_epsilon;
  std::vector<double> sweep_sigma;
  std::vector<double> sweep_kappa;

  // The merged key=value view this config was parsed from.
  FlatConfig source;

  bool HasSweepAxes() const;
  absl::StatusOr<DistributionSpec> Spec() const;
};

// Every recognised key with a one-line description, for --help.
const std::vector<std::pair<std::string, std::string>>& ConfigKeys();

// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(const FlatConfig& flat);

}  // namespace dplr

#endif  // DPLR_HARNESS_CONFIG_H_
