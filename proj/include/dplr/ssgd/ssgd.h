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

#ifndef DPLR_SSGD_SSGD_H_
#define DPLR_SSGD_SSGD_H_

// One-pass shuffled single-sample DP-SGD with a fixed clipping norm and
// tail averaging.

#include <cstddef>
#include <functional>
#include <limits>
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
#include "dplr/privacy/accountant.h"

namespace dplr {

inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

struct SsgdConfig {
  double eta = 0.0;
  double zeta = kNoClip;  // kNoClip disables clipping (requires alpha == 0)
  double alpha = 0.0;

  absl::Status Validate() const;
};

struct SsgdOptions {
  // Called once per update with the 1-based step and the row index of the
  // input dataset that the step reads.
  std::function<void(std::size_t step, std::size_t row)> on_sample_access;
  // Called with every iterate w_t, t = 1..N.
  std::function<void(std::size_t step, std::span<const double> w)> on_iterate;
  std::optional<Vector> initial_w;  // defaults to 0
  bool shuffle = true;
  bool record_clipped_steps = false;
};

struct SsgdTrace {
  std::size_t steps = 0;
  std::size_t clip_count = 0;
  std::vector<std::size_t> clipped_steps;  // when record_clipped_steps
  std::size_t tail_length = 0;
  double final_iterate_norm = 0.0;
};

struct SsgdResult {
  Vector w_bar;
  SsgdTrace trace;
};

// Update: w <- w - eta (clip_zeta(x (<x, w> - y)) + 2 zeta alpha g),
// g ~ N(0, I). Returns the mean of the last floor(N/2) iterates.
absl::StatusOr<SsgdResult> SsgdTrain(const Dataset& data, const SsgdConfig& cfg,
                                     SeededRng& rng,
                                     const SsgdOptions& options = {});

// The update without noise; used for sensitivity checks.
Vector SsgdNoiselessStep(std::span<const double> w, std::span<const double> x,
                         double y, double eta, double zeta);

struct SsgdDerivationOptions {
  double c1 = 1.0;
  double c2 = 1.0;
  SsgdPrivacyConstants privacy;
  RxMode rx_mode = RxMode::kExact;
};

struct SsgdDerivation {
  SsgdConfig config;
  DerivedConstants constants;
  double eta_terms[3] = {0.0, 0.0, 0.0};
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> assumed_constants;
};

// eta = min{1/(2 R^2), c1 / (ln^{4a+2}N K2^2 R^2 kappa d alpha^2),
//           c2 / (ln^{2a+2}N R^2)}
// zeta = 4 K2 R ln^{2a}N (sqrt(||H||) ||w*|| + sqrt(kappa) sigma)
// alpha from AlphaForSsgd. Warns when N is below
// kappa d ln^{2a+1}(kappa d) ln(1/delta) / eps.
absl::StatusOr<SsgdDerivation> DeriveSsgdHyperparams(
    const DistributionSpec& spec, std::size_t n, double epsilon, double delta,
    const SsgdDerivationOptions& options = {});

// Isotropic Gaussian shortcut: eta = 1/(4d),
// zeta = sqrt(d) sqrt(||w*||^2 + sigma^2) ln N, alpha from AlphaForSsgd.
absl::StatusOr<SsgdConfig> SsgdIsotropicPreset(
    const DistributionSpec& spec, std::size_t n, double epsilon, double delta,
    const SsgdPrivacyConstants& privacy = {});

}  // namespace dplr

#endif  // DPLR_SSGD_SSGD_H_
