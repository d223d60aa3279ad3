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

#include "dplr/ssgd/ssgd.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_format.h"
#include "dplr/core/status.h"
#include "dplr/core/tail_average.h"

namespace dplr {
namespace {

constexpr std::uint64_t kShuffleStream = 0;
constexpr std::uint64_t kNoiseStream = 1;

}  // namespace

absl::Status SsgdConfig::Validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step size must be positive, got %g", eta));
  }
  if (!(zeta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("clipping norm must be positive, got %g", zeta));
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("noise multiplier must be finite and >= 0, got %g",
                        alpha));
  }
  if (alpha > 0.0 && std::isinf(zeta)) {
    return absl::InvalidArgumentError(
        "noise needs a finite clipping norm (zeta is unbounded)");
  }
  return absl::OkStatus();
}

Vector SsgdNoiselessStep(std::span<const double> w, std::span<const double> x,
                         double y, double eta, double zeta) {
  const double r = Dot(x, w) - y;
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] * r;
  ClipInPlace(g.span(), zeta);
  Vector out(std::vector<double>(w.begin(), w.end()));
  Axpy(-eta, g.span(), out.span());
  return out;
}

absl::StatusOr<SsgdResult> SsgdTrain(const Dataset& data, const SsgdConfig& cfg,
                                     SeededRng& rng,
                                     const SsgdOptions& options) {
  DPLR_RETURN_IF_ERROR(cfg.Validate());
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("training needs N >= 2 samples, got %d", n));
  }
  Vector w(d, 0.0);
  if (options.initial_w.has_value()) {
    if (options.initial_w->size() != d) {
      return absl::InvalidArgumentError("initial w has the wrong dimension");
    }
    w = *options.initial_w;
  }

  const SeededRng base(rng.NextU64());
  SeededRng shuffle_rng = base.Fork(kShuffleStream);
  SeededRng noise_rng = base.Fork(kNoiseStream);
  std::vector<std::size_t> order;
  if (options.shuffle) {
    order = RandomPermutation(n, shuffle_rng);
  } else {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  const double noise_std = 2.0 * cfg.zeta * cfg.alpha;
  const bool noisy = cfg.alpha > 0.0;
  TailAverager averager(d, n);
  SsgdResult result;
  result.trace.tail_length = TailAverager::TailLength(n);
  Vector g(d);

  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t row = order[t - 1];
    if (options.on_sample_access) options.on_sample_access(t, row);
    const std::span<const double> x = data.x(row);
    const double r = Dot(x, w.span()) - data.y(row);
    if (!std::isfinite(r)) {
      return NumericFailureError(
          absl::StrFormat("non-finite residual at step %d", t));
    }
    for (std::size_t i = 0; i < d; ++i) g[i] = x[i] * r;
    if (ClipInPlace(g.span(), cfg.zeta)) {
      ++result.trace.clip_count;
      if (options.record_clipped_steps) result.trace.clipped_steps.push_back(t);
    }
    if (noisy) {
      for (std::size_t i = 0; i < d; ++i) {
        g[i] += noise_std * noise_rng.Gaussian();
      }
    }
    Axpy(-cfg.eta, g.span(), w.span());
    if (options.on_iterate) options.on_iterate(t, w.span());
    averager.Observe(t, w.span());
  }

  result.w_bar = averager.Mean();
  if (!result.w_bar.AllFinite()) {
    return NumericFailureError("non-finite tail average");
  }
  result.trace.steps = n;
  result.trace.final_iterate_norm = Norm2(w.span());
  return result;
}

absl::StatusOr<SsgdDerivation> DeriveSsgdHyperparams(
    const DistributionSpec& spec, std::size_t n, double epsilon, double delta,
    const SsgdDerivationOptions& options) {
  DPLR_RETURN_IF_ERROR(spec.Validate());
  if (n < 2) return absl::InvalidArgumentError("N must be >= 2");
  SsgdDerivation out;
  DPLR_ASSIGN_OR_RETURN(out.constants,
                        DeriveConstants(spec, options.rx_mode));
  DPLR_ASSIGN_OR_RETURN(const double alpha,
                        AlphaForSsgd(epsilon, delta, n, options.privacy));
  const DerivedConstants& c = out.constants;
  const double a = spec.tail_a;
  const double log_n = std::log(static_cast<double>(n));
  const double d = static_cast<double>(spec.dim());
  const double k2 = spec.k2;

  out.eta_terms[0] = 1.0 / (2.0 * c.rx2);
  out.eta_terms[1] = options.c1 / (std::pow(log_n, 4.0 * a + 2.0) * k2 * k2 *
                                   c.rx2 * c.kappa * d * alpha * alpha);
  out.eta_terms[2] = options.c2 / (std::pow(log_n, 2.0 * a + 2.0) * c.rx2);
  out.config.eta =
      std::min({out.eta_terms[0], out.eta_terms[1], out.eta_terms[2]});
  out.config.zeta = 4.0 * k2 * c.rx * std::pow(log_n, 2.0 * a) *
                    (std::sqrt(c.lambda_max) * c.w_star_norm +
                     std::sqrt(c.kappa) * spec.sigma);
  out.config.alpha = alpha;
  if (!(out.config.zeta > 0.0)) {
    // w* = 0 and sigma = 0: every gradient at w = 0 vanishes.
    out.config.zeta = std::numeric_limits<double>::min();
    out.warnings.push_back(
        "clipping norm is zero (w* = 0 and sigma = 0); using the smallest "
        "positive double");
  }

  const double kd = c.kappa * d;
  const double needed = kd * std::pow(std::log(kd), 2.0 * a + 1.0) *
                        -std::log(delta) / epsilon;
  if (static_cast<double>(n) < needed) {
    out.warnings.push_back(absl::StrFormat(
        "sample complexity: N=%d < kappa d ln^{2a+1}(kappa d) ln(1/delta)/eps "
        "= %.6g",
        n, needed));
  }
  out.assumed_constants = {{"c1", options.c1},
                           {"c2", options.c2},
                           {"c3", options.privacy.c3},
                           {"eps_cap_c", options.privacy.eps_cap_c},
                           {"K2", k2},
                           {"tail_a", a},
                           {"idealized_rx",
                            options.rx_mode == RxMode::kIdealized ? 1.0 : 0.0}};
  DPLR_RETURN_IF_ERROR(out.config.Validate());
  return out;
}

absl::StatusOr<SsgdConfig> SsgdIsotropicPreset(
    const DistributionSpec& spec, std::size_t n, double epsilon, double delta,
    const SsgdPrivacyConstants& privacy) {
  DPLR_RETURN_IF_ERROR(spec.Validate());
  SsgdConfig cfg;
  DPLR_ASSIGN_OR_RETURN(cfg.alpha, AlphaForSsgd(epsilon, delta, n, privacy));
  const double d = static_cast<double>(spec.dim());
  const double w_norm = Norm2(spec.w_star.span());
  cfg.eta = 1.0 / (4.0 * d);
  cfg.zeta = std::sqrt(d) * std::sqrt(w_norm * w_norm + spec.sigma * spec.sigma) *
             std::log(static_cast<double>(n));
  DPLR_RETURN_IF_ERROR(cfg.Validate());
  return cfg;
}

}  // namespace dplr
