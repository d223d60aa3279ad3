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

#include "dplr/dpstat/dp_stat.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_format.h"
#include "dplr/core/linalg.h"
#include "dplr/core/status.h"
#include "dplr/privacy/accountant.h"

namespace dplr {
namespace {

std::vector<double> SortedResiduals(const DatasetView& samples,
                                    std::span<const double> w) {
  std::vector<double> r(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    r[j] = std::fabs(Dot(samples.x(j), w) - samples.y(j));
  }
  std::sort(r.begin(), r.end());
  return r;
}

std::size_t CountAtMost(const std::vector<double>& sorted, double gamma) {
  return static_cast<std::size_t>(
      std::upper_bound(sorted.begin(), sorted.end(), gamma) - sorted.begin());
}

absl::Status CheckInputs(const DatasetView& samples, std::span<const double> w,
                         const StatConfig& cfg) {
  DPLR_RETURN_IF_ERROR(cfg.Validate());
  if (samples.empty()) {
    return absl::InvalidArgumentError("threshold search needs samples");
  }
  if (samples.size() != cfg.s) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "expected s=%d samples, got %d", cfg.s, samples.size()));
  }
  if (w.size() != samples.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "w has dimension %d, samples have %d", w.size(), samples.dim()));
  }
  return absl::OkStatus();
}

}  // namespace

double StatConfig::EffectiveDelta() const {
  return delta_width > 0.0 ? delta_width : std::ldexp(b, -40);
}

int StatConfig::Rounds() const {
  const double ratio = b / EffectiveDelta();
  int rounds = static_cast<int>(std::ceil(std::log2(ratio)));
  // Guard log2 rounding for exact powers of two.
  while (rounds > 0 && std::ldexp(1.0, rounds - 1) >= ratio) --rounds;
  while (std::ldexp(1.0, rounds) < ratio) ++rounds;
  return rounds;
}

absl::Status StatConfig::Validate() const {
  if (!(b > 0.0) || !std::isfinite(b)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("domain size B must be positive, got %g", b));
  }
  const double width = EffectiveDelta();
  if (!(width < b) || !std::isfinite(width)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 0 < Delta < B, got Delta=%g B=%g", width, b));
  }
  if (s < 1) return absl::InvalidArgumentError("s must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be finite and >= 0, got %g", alpha));
  }
  return absl::OkStatus();
}

double StatNoiseVariance(const StatConfig& cfg) {
  return static_cast<double>(cfg.Rounds() + 1) * cfg.alpha * cfg.alpha;
}

double StatRho(double alpha) { return 0.5 / (alpha * alpha); }

absl::StatusOr<StatResult> DpStat(const DatasetView& samples,
                                  std::span<const double> w,
                                  const StatConfig& cfg, SeededRng& rng) {
  DPLR_RETURN_IF_ERROR(CheckInputs(samples, w, cfg));
  const std::vector<double> sorted = SortedResiduals(samples, w);
  const int rounds = cfg.Rounds();
  const double noise_std = std::sqrt(StatNoiseVariance(cfg));
  const double s = static_cast<double>(cfg.s);

  StatResult result;
  double gamma = cfg.EffectiveDelta();
  for (int i = 0; i <= rounds; ++i) {
    const double count = static_cast<double>(CountAtMost(sorted, gamma));
    double noisy = count;
    if (noise_std > 0.0) noisy += noise_std * rng.Gaussian();
    ++result.evaluations;
    result.gamma = gamma;
    result.grid_index = i;
    if (noisy >= s) return result;
    if (i < rounds) gamma *= 2.0;
  }
  result.saturated = true;
  return result;
}

absl::StatusOr<StatUtilityReport> VerifyStatUtility(
    double gamma, const DatasetView& samples, std::span<const double> w,
    const StatConfig& cfg, double beta) {
  DPLR_RETURN_IF_ERROR(CheckInputs(samples, w, cfg));
  StatUtilityReport report;
  const double width = cfg.EffectiveDelta();
  DPLR_ASSIGN_OR_RETURN(report.gamma_bound,
                        StatGammaBound(cfg.alpha, cfg.b, width, beta));
  const std::vector<double> sorted = SortedResiduals(samples, w);
  const double target = static_cast<double>(cfg.s) - report.gamma_bound;
  report.count_at_gamma = CountAtMost(sorted, gamma);
  report.count_below = CountAtMost(sorted, std::max(gamma / 2.0, width));
  report.lower_ok = static_cast<double>(report.count_at_gamma) >= target;
  report.upper_vacuous = gamma <= width;
  report.upper_ok = report.upper_vacuous ||
                    static_cast<double>(report.count_below) < target;
  return report;
}

}  // namespace dplr
