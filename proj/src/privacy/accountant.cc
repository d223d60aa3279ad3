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

#include "dplr/privacy/accountant.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"
#include "dplr/core/status.h"

namespace dplr {

absl::Status ValidateBudget(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive and finite, got %g", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> AlphaForAmbssgd(double epsilon, double delta,
                                       AlphaForm form) {
  DPLR_RETURN_IF_ERROR(ValidateBudget(epsilon, delta));
  const double log_inv_delta = -std::log(delta);
  switch (form) {
    case AlphaForm::kTight:
      return (std::sqrt(log_inv_delta + epsilon) + std::sqrt(log_inv_delta)) /
             epsilon;
    case AlphaForm::kStandard:
      return 2.0 * std::sqrt(log_inv_delta + epsilon) / epsilon;
    case AlphaForm::kSimplified:
      if (epsilon > log_inv_delta) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "simplified noise multiplier needs epsilon <= ln(1/delta) = %g, "
            "got %g",
            log_inv_delta, epsilon));
      }
      return std::sqrt(8.0 * log_inv_delta) / epsilon;
  }
  return absl::InvalidArgumentError("unknown alpha form");
}

absl::StatusOr<double> EpsFromRho(double rho, double delta) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("rho must be finite and >= 0, got %g", rho));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  return rho + 2.0 * std::sqrt(rho * -std::log(delta));
}

absl::StatusOr<double> ComposeAmbssgdRho(double alpha,
                                         std::int64_t iterations) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be positive, got %g", alpha));
  }
  if (iterations < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("iteration count must be >= 1, got %d", iterations));
  }
  // Per iteration: 1/(2 alpha^2) for the threshold search plus 1/(2 alpha^2)
  // for the gradient step; iterations touch disjoint data.
  const double per_iteration = 0.5 / (alpha * alpha) + 0.5 / (alpha * alpha);
  return per_iteration;
}

double SsgdEpsilonCap(double delta, std::size_t n,
                      const SsgdPrivacyConstants& constants) {
  const double nn = static_cast<double>(n);
  return constants.eps_cap_c * std::sqrt(std::log(nn / delta) / nn);
}

absl::StatusOr<double> AlphaForSsgd(double epsilon, double delta, std::size_t n,
                                    const SsgdPrivacyConstants& constants) {
  DPLR_RETURN_IF_ERROR(ValidateBudget(epsilon, delta));
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sample count must be >= 2, got %d", n));
  }
  if (!(constants.c3 > 0.0) || !(constants.eps_cap_c > 0.0)) {
    return absl::InvalidArgumentError("calibration constants must be positive");
  }
  const double cap = SsgdEpsilonCap(delta, n, constants);
  if (epsilon > cap) {
    return BudgetOutOfRangeError(absl::StrFormat(
        "epsilon %g exceeds the single-sample regime bound "
        "%g * sqrt(ln(N/delta)/N) = %g (N=%d, delta=%g)",
        epsilon, constants.eps_cap_c, cap, n, delta));
  }
  const double nn = static_cast<double>(n);
  return constants.c3 * std::log(nn / delta) / (epsilon * std::sqrt(nn));
}

double ShuffleEps0Cap(double delta, std::size_t n) {
  return std::log(static_cast<double>(n) / (16.0 * std::log(2.0 / delta)));
}

absl::StatusOr<double> ShuffleAmplifiedEps(double eps0, double delta,
                                           std::size_t n, double c) {
  if (!(eps0 >= 0.0) || !std::isfinite(eps0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eps0 must be finite and >= 0, got %g", eps0));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta));
  }
  if (n < 1) return absl::InvalidArgumentError("sample count must be >= 1");
  const double cap = ShuffleEps0Cap(delta, n);
  if (eps0 > cap) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "eps0 %g exceeds ln(n / (16 ln(2/delta))) = %g", eps0, cap));
  }
  const double nn = static_cast<double>(n);
  const double e = std::exp(eps0);
  return c * (-std::expm1(-eps0)) *
         (std::sqrt(e * -std::log(delta)) / std::sqrt(nn) + e / nn);
}

absl::StatusOr<double> StatGammaBound(double alpha, double b, double delta_width,
                                      double beta) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be finite and >= 0, got %g", alpha));
  }
  if (!(delta_width > 0.0) || !(b > delta_width) || !std::isfinite(b)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need B > Delta > 0, got B=%g Delta=%g", b, delta_width));
  }
  const double log_ratio = std::log(b / delta_width);
  if (!(beta > 0.0) || !(log_ratio > beta)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 0 < beta < ln(B/Delta) = %g, got beta=%g", log_ratio, beta));
  }
  return alpha * std::sqrt(2.0 * log_ratio * std::log(log_ratio / beta));
}

double GaussianRho(double sensitivity, double stddev) {
  return sensitivity * sensitivity / (2.0 * stddev * stddev);
}

void ZcdpLedger::Record(std::int64_t partition, std::string mechanism,
                        double rho) {
  charges_.push_back({partition, std::move(mechanism), rho});
  per_partition_[partition] += rho;
}

double ZcdpLedger::PartitionRho(std::int64_t partition) const {
  auto it = per_partition_.find(partition);
  return it == per_partition_.end() ? 0.0 : it->second;
}

double ZcdpLedger::TotalRho() const {
  double total = 0.0;
  for (const auto& [partition, rho] : per_partition_) {
    total = std::max(total, rho);
  }
  return total;
}

}  // namespace dplr
