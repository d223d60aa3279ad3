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

#include "dplr/ambssgd/ambssgd.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"
#include "dplr/core/status.h"
#include "dplr/core/tail_average.h"
#include "dplr/ssgd/ssgd.h"

namespace dplr {
namespace {

constexpr std::uint64_t kShuffleStream = 0;
constexpr std::uint64_t kStatStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

struct Prepared {
  Dataset shuffled{1};
  std::vector<std::size_t> order;
  SeededRng stat_rng{0};
  SeededRng noise_rng{0};
  Vector w;
};

absl::StatusOr<Prepared> Prepare(const Dataset& data, const AmbssgdConfig& cfg,
                                 SeededRng& rng,
                                 const AmbssgdOptions& options) {
  DPLR_RETURN_IF_ERROR(cfg.Validate(data.size()));
  Prepared p;
  p.w = Vector(data.dim(), 0.0);
  if (options.initial_w.has_value()) {
    if (options.initial_w->size() != data.dim()) {
      return absl::InvalidArgumentError("initial w has the wrong dimension");
    }
    p.w = *options.initial_w;
  }
  const SeededRng base(rng.NextU64());
  SeededRng shuffle_rng = base.Fork(kShuffleStream);
  p.stat_rng = base.Fork(kStatStream);
  p.noise_rng = base.Fork(kNoiseStream);
  p.order = RandomPermutation(data.size(), shuffle_rng);
  p.shuffled = data.Permuted(p.order);
  return p;
}

void ReportAccess(const AmbssgdOptions& options, const Prepared& p,
                  std::size_t t, SampleRole role, std::size_t first,
                  std::size_t count) {
  if (!options.on_sample_access) return;
  for (std::size_t k = first; k < first + count; ++k) {
    options.on_sample_access(t, role, p.order[k]);
  }
}

// Sum of clipped per-sample gradients into `g`; returns the clip count.
std::size_t ClippedGradientSum(std::span<const double> w,
                               const DatasetView& batch, double zeta,
                               std::span<double> g, std::span<double> scratch) {
  std::fill(g.begin(), g.end(), 0.0);
  std::size_t clipped = 0;
  const bool clip = std::isfinite(zeta);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const std::span<const double> x = batch.x(j);
    const double r = Dot(x, w) - batch.y(j);
    if (!clip) {
      Axpy(r, x, g);
      continue;
    }
    for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = x[i] * r;
    if (ClipInPlace(scratch, zeta)) ++clipped;
    Axpy(1.0, scratch, g);
  }
  return clipped;
}

absl::StatusOr<AmbssgdResult> Finish(TailAverager& averager,
                                     AmbssgdResult result) {
  result.w_bar = averager.Mean();
  if (!result.w_bar.AllFinite()) {
    return NumericFailureError("non-finite tail average");
  }
  return result;
}

}  // namespace

StatConfig AmbssgdConfig::Stat() const {
  StatConfig stat;
  stat.b = domain_size;
  stat.delta_width = delta_width;
  stat.s = s;
  stat.alpha = alpha;
  return stat;
}

absl::Status AmbssgdConfig::Validate(std::size_t n) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("step size must be positive, got %g", eta));
  }
  if (b < 1 || s < 1 || T < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need b, s, T >= 1, got b=%d s=%d T=%d", b, s, T));
  }
  if (T > n / (b + s)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "T (b + s) = %d (b + s) exceeds N = %d (b=%d, s=%d)", T, n, b, s));
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("noise multiplier must be finite and >= 0, got %g",
                        alpha));
  }
  if (!(rx > 0.0) || !std::isfinite(rx)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("R_x must be positive, got %g", rx));
  }
  if (!(tail_a > 0.0)) {
    return absl::InvalidArgumentError("tail exponent must be positive");
  }
  if (fixed_zeta.has_value()) {
    if (!(*fixed_zeta > 0.0)) {
      return absl::InvalidArgumentError("fixed clipping norm must be positive");
    }
    if (alpha > 0.0 && std::isinf(*fixed_zeta)) {
      return absl::InvalidArgumentError(
          "noise needs a finite clipping norm (zeta is unbounded)");
    }
  } else {
    DPLR_RETURN_IF_ERROR(Stat().Validate());
  }
  return absl::OkStatus();
}

Vector AmbssgdNoiselessStep(std::span<const double> w, const DatasetView& batch,
                            double eta, double zeta) {
  const std::size_t d = w.size();
  Vector g(d), scratch(d);
  ClippedGradientSum(w, batch, zeta, g.span(), scratch.span());
  for (std::size_t i = 0; i < d; ++i) g[i] /= static_cast<double>(batch.size());
  Vector out(std::vector<double>(w.begin(), w.end()));
  Axpy(-eta, g.span(), out.span());
  return out;
}

absl::StatusOr<AmbssgdResult> AmbssgdTrain(const Dataset& data,
                                           const AmbssgdConfig& cfg,
                                           SeededRng& rng,
                                           const AmbssgdOptions& options) {
  DPLR_ASSIGN_OR_RETURN(Prepared p, Prepare(data, cfg, rng, options));
  const std::size_t d = data.dim();
  const double log_factor =
      std::pow(std::log(static_cast<double>(data.size())), cfg.tail_a);
  const StatConfig stat = cfg.Stat();
  const double bb = static_cast<double>(cfg.b);
  const double stat_rho = cfg.alpha > 0.0 ? StatRho(cfg.alpha) : 0.0;

  AmbssgdResult result;
  result.trace.dropped_samples = data.size() - cfg.T * (cfg.b + cfg.s);
  result.trace.tail_length = TailAverager::TailLength(cfg.T);
  result.trace.iterations.reserve(cfg.T);
  TailAverager averager(d, cfg.T);
  Vector g(d), scratch(d);

  for (std::size_t t = 0; t < cfg.T; ++t) {
    const std::size_t tau = (cfg.b + cfg.s) * t;
    IterationRecord rec;

    if (cfg.fixed_zeta.has_value()) {
      rec.gamma = std::numeric_limits<double>::quiet_NaN();
      rec.zeta = *cfg.fixed_zeta;
    } else {
      ReportAccess(options, p, t, SampleRole::kStat, tau, cfg.s);
      DPLR_ASSIGN_OR_RETURN(
          const StatResult sr,
          DpStat(p.shuffled.View(tau, cfg.s), p.w.span(), stat, p.stat_rng));
      rec.gamma = sr.gamma;
      rec.stat_evaluations = sr.evaluations;
      rec.grid_index = sr.grid_index;
      rec.saturated = sr.saturated;
      rec.zeta = cfg.rx * sr.gamma * log_factor;
      if (sr.saturated) ++result.trace.saturated_searches;
      if (cfg.alpha > 0.0) result.ledger.Record(t, "dp_stat", stat_rho);
    }

    ReportAccess(options, p, t, SampleRole::kBatch, tau + cfg.s, cfg.b);
    const DatasetView batch = p.shuffled.View(tau + cfg.s, cfg.b);
    if (options.on_batch) options.on_batch(t, p.w.span(), batch, rec.zeta);
    rec.clip_count =
        ClippedGradientSum(p.w.span(), batch, rec.zeta, g.span(), scratch.span());
    for (std::size_t i = 0; i < d; ++i) g[i] /= bb;
    if (cfg.alpha > 0.0) {
      const double noise_std = 2.0 * rec.zeta * cfg.alpha / bb;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] += noise_std * p.noise_rng.Gaussian();
      }
      result.ledger.Record(t, "gaussian_gradient",
                           GaussianRho(2.0 * rec.zeta / bb, noise_std));
    }
    Axpy(-cfg.eta, g.span(), p.w.span());
    if (!p.w.AllFinite()) {
      return NumericFailureError(
          absl::StrFormat("non-finite iterate at iteration %d", t + 1));
    }

    if (rec.clip_count > 0) {
      result.trace.total_clipped += rec.clip_count;
      ++result.trace.iterations_with_clipping;
    }
    result.trace.iterations.push_back(rec);
    if (options.on_iterate) options.on_iterate(t + 1, p.w.span());
    averager.Observe(t + 1, p.w.span());
  }
  return Finish(averager, std::move(result));
}

absl::StatusOr<AmbssgdResult> NonprivateBaselineTrain(
    const Dataset& data, const AmbssgdConfig& cfg, SeededRng& rng,
    const AmbssgdOptions& options) {
  AmbssgdConfig plain = cfg;
  plain.alpha = 0.0;
  plain.fixed_zeta = kNoClip;
  DPLR_ASSIGN_OR_RETURN(Prepared p, Prepare(data, plain, rng, options));
  const std::size_t d = data.dim();

  AmbssgdResult result;
  result.trace.dropped_samples = data.size() - cfg.T * (cfg.b + cfg.s);
  result.trace.tail_length = TailAverager::TailLength(cfg.T);
  result.trace.iterations.reserve(cfg.T);
  TailAverager averager(d, cfg.T);
  Vector g(d);

  for (std::size_t t = 0; t < cfg.T; ++t) {
    const std::size_t first = (cfg.b + cfg.s) * t + cfg.s;
    ReportAccess(options, p, t, SampleRole::kBatch, first, cfg.b);
    const DatasetView batch = p.shuffled.View(first, cfg.b);
    if (options.on_batch) options.on_batch(t, p.w.span(), batch, kNoClip);
    std::fill(g.span().begin(), g.span().end(), 0.0);
    for (std::size_t j = 0; j < batch.size(); ++j) {
      Axpy(Dot(batch.x(j), p.w.span()) - batch.y(j), batch.x(j), g.span());
    }
    // Same arithmetic order as the clipped path: average, then step.
    for (std::size_t i = 0; i < d; ++i) g[i] /= static_cast<double>(cfg.b);
    Axpy(-cfg.eta, g.span(), p.w.span());
    if (!p.w.AllFinite()) {
      return NumericFailureError(
          absl::StrFormat("non-finite iterate at iteration %d", t + 1));
    }
    IterationRecord rec;
    rec.gamma = std::numeric_limits<double>::quiet_NaN();
    rec.zeta = kNoClip;
    result.trace.iterations.push_back(rec);
    if (options.on_iterate) options.on_iterate(t + 1, p.w.span());
    averager.Observe(t + 1, p.w.span());
  }
  return Finish(averager, std::move(result));
}

absl::StatusOr<AmbssgdDerivation> DeriveAmbssgdHyperparams(
    const DistributionSpec& spec, std::size_t n, double epsilon, double delta,
    const AmbssgdDerivationOptions& options) {
  DPLR_RETURN_IF_ERROR(spec.Validate());
  DPLR_RETURN_IF_ERROR(ValidateBudget(epsilon, delta));
  if (n < 2) return absl::InvalidArgumentError("N must be >= 2");
  if (!(options.c1 > 0.0)) {
    return absl::InvalidArgumentError("c1 must be positive");
  }
  AmbssgdDerivation out;
  DPLR_ASSIGN_OR_RETURN(out.constants, DeriveConstants(spec, options.rx_mode));
  const DerivedConstants& c = out.constants;
  AmbssgdConfig& cfg = out.config;
  const double nn = static_cast<double>(n);
  const double log_n = std::log(nn);
  const double a = spec.tail_a;
  const double k2 = spec.k2;
  const double log_inv_delta = -std::log(delta);

  const double t_real = std::round(options.c1 * c.kappa * log_n);
  cfg.T = static_cast<std::size_t>(std::max(1.0, t_real));
  const std::size_t m = n / cfg.T;
  cfg.b = (10 * m + 10) / 11;  // ceil(10 m / 11)
  cfg.s = m - cfg.b;
  if (cfg.b < 1 || cfg.s < 1) {
    return ConfigInfeasibleError(absl::StrFormat(
        "N/T = %d/%d leaves no room for a batch and a stat slice (b=%d, s=%d)",
        n, cfg.T, cfg.b, cfg.s));
  }
  const double b = static_cast<double>(cfg.b);
  cfg.eta = b / (c.rx2 + (b - 1.0) * c.lambda_max);
  cfg.rx = c.rx;
  cfg.tail_a = a;

  if (options.domain_size.has_value()) {
    if (!(*options.domain_size > 0.0)) {
      return absl::InvalidArgumentError("domain size B must be positive");
    }
    cfg.domain_size = *options.domain_size;
  } else {
    cfg.domain_size = k2 * c.rx * (c.w_star_h_norm + spec.sigma) *
                      std::pow(log_n, 2.0 * a);
    out.domain_oracle_assisted = true;
    if (!(cfg.domain_size > 0.0)) {
      return ConfigInfeasibleError(
          "domain size B is zero (w* = 0 and sigma = 0); supply B explicitly");
    }
  }
  cfg.delta_width = options.delta_width > 0.0 ? options.delta_width
                                              : std::ldexp(cfg.domain_size, -40);

  AlphaForm form = AlphaForm::kSimplified;
  if (options.alpha_form.has_value()) {
    form = *options.alpha_form;
  } else if (epsilon > log_inv_delta) {
    form = AlphaForm::kStandard;
    out.warnings.push_back(absl::StrFormat(
        "eps=%g > ln(1/delta)=%g: using 2 sqrt(ln(1/delta)+eps)/eps instead of "
        "sqrt(8 ln(1/delta))/eps",
        epsilon, log_inv_delta));
  }
  DPLR_ASSIGN_OR_RETURN(cfg.alpha, AlphaForAmbssgd(epsilon, delta, form));

  const double lhs_root = nn / static_cast<double>(cfg.T) -
                          static_cast<double>(cfg.s);
  out.batch_condition_lhs = lhs_root * lhs_root;
  out.batch_condition_rhs = 24.0 * cfg.eta * cfg.alpha * cfg.alpha * c.rx2 *
                            k2 * k2 * c.kappa * std::pow(log_n, 4.0 * a) *
                            c.trace / c.mu;
  out.batch_condition_ok = out.batch_condition_lhs >= out.batch_condition_rhs;
  if (!out.batch_condition_ok) {
    const std::string message = absl::StrFormat(
        "batch-size condition (N/T - s)^2 >= 24 eta alpha^2 R^2 K2^2 kappa "
        "ln^{4a}N Tr(H)/mu fails: %.6g < %.6g",
        out.batch_condition_lhs, out.batch_condition_rhs);
    if (options.batch_policy == BatchConditionPolicy::kError) {
      return ConfigInfeasibleError(message);
    }
    out.warnings.push_back(message);
  }

  const double needed = c.kappa * c.kappa * static_cast<double>(spec.dim()) *
                        (1.0 + std::sqrt(log_inv_delta) / epsilon);
  if (nn < needed) {
    out.warnings.push_back(absl::StrFormat(
        "sample complexity: N=%d < kappa^2 d (1 + sqrt(ln(1/delta))/eps) = "
        "%.6g",
        n, needed));
  }
  if (out.domain_oracle_assisted) {
    out.warnings.push_back(
        "domain size B uses the generating ||w*||_H and sigma (oracle-assisted)");
  }
  if (n > cfg.T * (cfg.b + cfg.s)) {
    out.warnings.push_back(absl::StrFormat(
        "%d trailing samples are not used", n - cfg.T * (cfg.b + cfg.s)));
  }
  out.assumed_constants = {{"c1", options.c1},
                           {"K2", k2},
                           {"tail_a", a},
                           {"delta_width_log2_ratio",
                            std::log2(cfg.domain_size / cfg.delta_width)},
                           {"idealized_rx",
                            options.rx_mode == RxMode::kIdealized ? 1.0 : 0.0}};
  DPLR_RETURN_IF_ERROR(cfg.Validate(n));
  return out;
}

absl::StatusOr<AmbssgdDerivation> DeriveBaselineConfig(
    const DistributionSpec& spec, std::size_t n,
    const AmbssgdDerivationOptions& options) {
  AmbssgdDerivationOptions relaxed = options;
  relaxed.batch_policy = BatchConditionPolicy::kWarn;
  // The budget only feeds alpha, which is discarded below.
  DPLR_ASSIGN_OR_RETURN(AmbssgdDerivation out,
                        DeriveAmbssgdHyperparams(spec, n, 1.0, 0.5, relaxed));
  out.config.alpha = 0.0;
  out.config.fixed_zeta = kNoClip;
  out.batch_condition_rhs = 0.0;
  out.batch_condition_ok = true;
  out.warnings.erase(
      std::remove_if(out.warnings.begin(), out.warnings.end(),
                     [](const std::string& w) {
                       return w.rfind("batch-size", 0) == 0 ||
                              w.rfind("sample complexity", 0) == 0 ||
                              w.rfind("eps=", 0) == 0;
                     }),
      out.warnings.end());
  return out;
}

absl::StatusOr<AmbssgdConfig> AmbssgdIsotropicPreset(
    const DistributionSpec& spec, std::size_t n, double epsilon, double delta,
    double c1) {
  AmbssgdDerivationOptions options;
  options.c1 = c1;
  options.rx_mode = RxMode::kIdealized;
  options.batch_policy = BatchConditionPolicy::kWarn;
  options.alpha_form = AlphaForm::kSimplified;
  DPLR_ASSIGN_OR_RETURN(AmbssgdDerivation derived,
                        DeriveAmbssgdHyperparams(spec, n, epsilon, delta,
                                                 options));
  derived.config.eta = 1.0 / (4.0 * static_cast<double>(spec.dim()));
  return derived.config;
}

}  // namespace dplr
