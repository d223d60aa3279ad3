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

#ifndef DPLR_DPSTAT_DP_STAT_H_
#define DPLR_DPSTAT_DP_STAT_H_

#include <cstddef>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dplr/core/dataset.h"
#include "dplr/core/rng.h"

namespace dplr {

// Private doubling search for a threshold covering (almost) all absolute
// residuals |<x, w> - y| of a small sample.
struct StatConfig {
  double b = 1.0;            // domain size B
  double delta_width = 0.0;  // discretization width; <= 0 means B * 2^-40
  std::size_t s = 1;         // expected sample count
  double alpha = 0.0;        // noise multiplier

  double EffectiveDelta() const;
  // ceil(log2(B / Delta)).
  int Rounds() const;
  absl::Status Validate() const;
};

struct StatResult {
  double gamma = 0.0;     // Delta * 2^grid_index
  int grid_index = 0;
  int evaluations = 0;    // noisy counts drawn
  bool saturated = false; // no round broke out of the search
};

// Grid values Delta * 2^i for i = 0..Rounds() are tried in order; each round
// compares the exact count of residuals <= gamma_i plus fresh N(0, v) noise
// against s and stops at the first round where the noisy count reaches s.
// v = (Rounds() + 1) alpha^2 so that the worst case of Rounds() + 1
// sensitivity-one counts costs exactly StatRho(alpha).
absl::StatusOr<StatResult> DpStat(const DatasetView& samples,
                                  std::span<const double> w,
                                  const StatConfig& cfg, SeededRng& rng);

double StatNoiseVariance(const StatConfig& cfg);
// zCDP of one search: 1 / (2 alpha^2).
double StatRho(double alpha);

// Checks the two utility clauses for a returned threshold:
//   lower: #{r <= gamma} >= s - Gamma
//   upper: #{r <= max(gamma/2, Delta)} < s - Gamma
// The upper clause has nothing to say when gamma == Delta (no smaller grid
// value was ever skipped) and is reported as vacuous there.
struct StatUtilityReport {
  double gamma_bound = 0.0;  // Gamma
  std::size_t count_at_gamma = 0;
  std::size_t count_below = 0;
  bool lower_ok = false;
  bool upper_ok = false;
  bool upper_vacuous = false;
  bool ok() const { return lower_ok && upper_ok; }
};

absl::StatusOr<StatUtilityReport> VerifyStatUtility(
    double gamma, const DatasetView& samples, std::span<const double> w,
    const StatConfig& cfg, double beta);

}  // namespace dplr

#endif  // DPLR_DPSTAT_DP_STAT_H_
