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

#include "dplr/datagen/distribution.h"

#include <cmath>
#include <vector>

#include "absl/strings/str_format.h"
#include "dplr/core/status.h"

namespace dplr {

std::string_view FamilyName(CovariateFamily family) {
  switch (family) {
    case CovariateFamily::kGaussian:
      return "gaussian";
    case CovariateFamily::kScaledUniform:
      return "scaled_uniform";
  }
  return "unknown";
}

absl::StatusOr<CovariateFamily> ParseFamily(std::string_view name) {
  if (name == "gaussian") return CovariateFamily::kGaussian;
  if (name == "scaled_uniform") return CovariateFamily::kScaledUniform;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown covariate family '%s'", std::string(name)));
}

absl::Status DistributionSpec::Validate() const {
  if (w_star.size() != h.dim()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("w* has dimension %d but H has dimension %d",
                        w_star.size(), h.dim()));
  }
  if (!w_star.AllFinite()) {
    return absl::InvalidArgumentError("w* has non-finite entries");
  }
  if (!std::isfinite(sigma) || sigma < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be finite and >= 0, got %g", sigma));
  }
  if (tail_a != 0.5) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "family %s is sub-Gaussian and requires tail_a = 0.5, got %g",
        std::string(FamilyName(family)), tail_a));
  }
  if (!std::isfinite(k2) || k2 <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("K2 must be positive, got %g", k2));
  }
  return absl::OkStatus();
}

absl::StatusOr<DistributionSpec> MakeSpec(std::size_t dim, double kappa,
                                          double sigma,
                                          CovariateFamily family) {
  if (dim == 0) return absl::InvalidArgumentError("dimension must be >= 1");
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("condition number must be >= 1, got %g", kappa));
  }
  std::vector<double> eigenvalues(dim, 1.0);
  if (dim > 1) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double frac =
          static_cast<double>(dim - 1 - i) / static_cast<double>(dim - 1);
      eigenvalues[i] = std::pow(kappa, frac);
    }
  }
  DPLR_ASSIGN_OR_RETURN(DiagonalPSD h, DiagonalPSD::Create(eigenvalues));
  DistributionSpec spec;
  spec.h = std::move(h);
  spec.w_star = Vector(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  spec.sigma = sigma;
  spec.family = family;
  DPLR_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

absl::StatusOr<double> ComputeRx2(const DistributionSpec& spec, RxMode mode) {
  DPLR_RETURN_IF_ERROR(spec.Validate());
  const double trace = spec.h.Trace();
  const double lambda_max = spec.h.MaxEigenvalue();
  if (mode == RxMode::kIdealized) {
    return static_cast<double>(spec.dim()) * lambda_max;
  }
  // For independent symmetric coordinates E[|x|^2 x x^T] is diagonal with
  // entries lambda_j (Tr(H) + (m4 - 1) lambda_j), m4 = E[u^4] of the
  // unit-variance coordinate law.
  switch (spec.family) {
    case CovariateFamily::kGaussian:
      return trace + 2.0 * lambda_max;
    case CovariateFamily::kScaledUniform:
      return trace + 0.8 * lambda_max;
  }
  return absl::UnimplementedError(absl::StrFormat(
      "R_x is not available for family %d", static_cast<int>(spec.family)));
}

absl::StatusOr<DerivedConstants> DeriveConstants(const DistributionSpec& spec,
                                                 RxMode mode) {
  DerivedConstants c;
  DPLR_ASSIGN_OR_RETURN(c.rx2, ComputeRx2(spec, mode));
  c.rx = std::sqrt(c.rx2);
  c.trace = spec.h.Trace();
  c.lambda_max = spec.h.MaxEigenvalue();
  c.mu = spec.h.MinEigenvalue();
  c.kappa = c.lambda_max / c.mu;
  c.w_star_norm = Norm2(spec.w_star.span());
  DPLR_ASSIGN_OR_RETURN(c.w_star_h_norm,
                        QuadraticNorm(spec.w_star.span(), spec.h));
  return c;
}

absl::StatusOr<Dataset> Generate(const DistributionSpec& spec, std::size_t n,
                                 SeededRng& rng) {
  DPLR_RETURN_IF_ERROR(spec.Validate());
  if (n == 0) return absl::InvalidArgumentError("sample count must be >= 1");
  const std::size_t d = spec.dim();
  std::vector<double> scale(d);
  for (std::size_t i = 0; i < d; ++i) scale[i] = std::sqrt(spec.h[i]);
  const double uniform_half_width = std::sqrt(3.0);

  Dataset data(d);
  data.Reserve(n);
  std::vector<double> x(d);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t i = 0; i < d; ++i) {
      double u;
      if (spec.family == CovariateFamily::kGaussian) {
        u = rng.Gaussian();
      } else {
        u = uniform_half_width * (2.0 * rng.Uniform01() - 1.0);
      }
      x[i] = scale[i] * u;
    }
    double y = Dot(x, spec.w_star.span());
    if (spec.sigma > 0.0) y += spec.sigma * rng.Gaussian();
    data.AppendUnchecked(x, y);
  }
  return data;
}

}  // namespace dplr
