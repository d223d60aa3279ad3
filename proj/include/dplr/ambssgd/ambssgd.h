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

#ifndef DPLR_AMBSSGD_AMBSSGD_H_
#define DPLR_AMBSSGD_AMBSSGD_H_

// Adaptive mini-batch shuffled DP-SGD. Each iteration spends a small slice
// of fresh samples on a private residual threshold, sets the clipping norm
// from it, and takes one noisy clipped mini-batch step on the next slice.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dplr/core/dataset.h"
#include "dplr/core/linalg.h"
#include "dplr/core/rng.h"
#include "dplr/datagen/distribution.h"
#include "dplr/dpstat/dp_stat.h"
#include "dplr/privacy/accountant.h"

namespace dplr {

struct AmbssgdConfig {
  double eta = 0.0;
  std::size_t b = 1;  // gradient batch size
  std::size_t s = 1;  // threshold-search sample size
  std::size_t T = 1;  // iterations
  double domain_size = 1.0;  // B
  double delta_width = 0.0;  // <= 0 means B * 2^-40
  double alpha = 0.0;
  double rx = 1.0;
  double tail_a = 0.5;
  // When set, every iteration clips at this norm and the threshold search
  // is skipped (kNoClip disables clipping).
  std::optional<double> fixed_zeta;

  StatConfig Stat() const;
  absl::Status Validate(std::size_t n) const;
};

enum class SampleRole { kStat, kBatch };

struct AmbssgdOptions {
  // Row index (of the input dataset) read by iteration t, with its role.
  std::function<void(std::size_t t, SampleRole role, std::size_t row)>
      on_sample_access;
  // Before the update of iteration t (0-based): current iterate, the
  // gradient batch, and the clipping norm in force.
  std::function<void(std::size_t t, std::span<const double> w,
                     const DatasetView& batch, double zeta)>
      on_batch;
  // After update t, with the 1-based iterate index t + 1.
  std::function<void(std::size_t index, std::span<const double> w)> on_iterate;
  std::optional<Vector> initial_w;
};

struct IterationRecord {
  double gamma = 0.0;  // NaN when the threshold search was skipped
  double zeta = 0.0;
  std::size_t clip_count = 0;
  int stat_evaluations = 0;
  int grid_index = 0;
  bool saturated = false;
};

struct AmbssgdTrace {
  std::vector<IterationRecord> iterations;
  std::size_t dropped_samples = 0;
  std::size_t total_clipped = 0;
  std::size_t iterations_with_clipping = 0;
  std::size_t saturated_searches = 0;
  std::size_t tail_length = 0;
};

struct AmbssgdResult {
  Vector w_bar;
  AmbssgdTrace trace;
  ZcdpLedger ledger;
};

absl::StatusOr<AmbssgdResult> AmbssgdTrain(const Dataset& data,
                                           const AmbssgdConfig& cfg,
                                           SeededRng& rng,
                                           const AmbssgdOptions& options = {});

// Plain one-pass mini-batch SGD over the same slice layout: no threshold
// search, no clipping, no noise. Matches AmbssgdTrain with alpha = 0 and
// fixed_zeta = kNoClip given the same generator state.
absl::StatusOr<AmbssgdResult> NonprivateBaselineTrain(
    const Dataset& data, const AmbssgdConfig& cfg, SeededRng& rng,
    const AmbssgdOptions& options = {});

// w - eta (1/b) sum_j clip_zeta(x_j (<x_j, w> - y_j)), no noise.
Vector AmbssgdNoiselessStep(std::span<const double> w, const DatasetView& batch,
                            double eta, double zeta);

enum class BatchConditionPolicy { kError, kWarn };

struct AmbssgdDerivationOptions {
  double c1 = 1.0;
  RxMode rx_mode = RxMode::kExact;
  BatchConditionPolicy batch_policy = BatchConditionPolicy::kError;
  std::optional<double> domain_size;  // user-supplied B instead of the oracle
  double delta_width = 0.0;           // <= 0 means B * 2^-40
  // Default: sqrt(8 ln(1/delta))/eps when eps <= ln(1/delta), otherwise the
  // standard form.
  std::optional<AlphaForm> alpha_form;
};

struct AmbssgdDerivation {
  AmbssgdConfig config;
  DerivedConstants constants;
  double batch_condition_lhs = 0.0;  // (N/T - s)^2
  double batch_condition_rhs = 0.0;
  bool batch_condition_ok = false;
  bool domain_oracle_assisted = false;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> assumed_constants;
};

// T = round(c1 kappa ln N), b = ceil(10/11 floor(N/T)), s = floor(N/T) - b,
// eta = b / (R^2 + (b-1) ||H||), B = K2 R (||w*||_H + sigma) ln^{2a} N.
// Checks (N/T - s)^2 >= 24 eta alpha^2 R^2 K2^2 kappa ln^{4a}N Tr(H) / mu.
absl::StatusOr<AmbssgdDerivation> DeriveAmbssgdHyperparams(
    const DistributionSpec& spec, std::size_t n, double epsilon, double delta,
    const AmbssgdDerivationOptions& options = {});

// Same layout and step size with alpha = 0 and clipping disabled.
absl::StatusOr<AmbssgdDerivation> DeriveBaselineConfig(
    const DistributionSpec& spec, std::size_t n,
    const AmbssgdDerivationOptions& options = {});

// Isotropic Gaussian shortcut: eta = 1/(4d), alpha = sqrt(8 ln(1/delta))/eps,
// everything else as in DeriveAmbssgdHyperparams with R^2 = d.
absl::StatusOr<AmbssgdConfig> AmbssgdIsotropicPreset(
    const DistributionSpec& spec, std::size_t n, double epsilon, double delta,
    double c1 = 1.0);

}  // namespace dplr

#endif  // DPLR_AMBSSGD_AMBSSGD_H_
