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

#ifndef DPLR_EVAL_RISK_H_
#define DPLR_EVAL_RISK_H_

#include <cstddef>
#include <span>

#include "absl/status/statusor.h"
#include "dplr/core/dataset.h"
#include "dplr/core/linalg.h"
#include "dplr/datagen/distribution.h"

namespace dplr {

// Population excess risk 1/2 sum_i lambda_i (w_i - w*_i)^2.
absl::StatusOr<double> ExcessRisk(std::span<const double> w,
                                  const DistributionSpec& spec);

// (1 / 2n) sum (y - <x, w>)^2.
absl::StatusOr<double> EmpiricalRisk(std::span<const double> w,
                                     const Dataset& test);

// Solves (X^T X + ridge I) w = X^T y with a Cholesky factorization. With
// ridge == 0 a rank-deficient or badly conditioned system is an error, not
// silently regularized.
absl::StatusOr<Vector> OlsSolve(const Dataset& data, double ridge = 0.0);

struct RiskReport {
  double excess_risk_exact = 0.0;
  // EmpiricalRisk(w) - EmpiricalRisk(w*) on the test set, clamped at 0.
  double excess_risk_empirical = 0.0;
  std::size_t n_test = 0;
};

absl::StatusOr<RiskReport> EvaluateRisk(std::span<const double> w,
                                        const DistributionSpec& spec,
                                        const Dataset& test);

}  // namespace dplr

#endif  // DPLR_EVAL_RISK_H_
