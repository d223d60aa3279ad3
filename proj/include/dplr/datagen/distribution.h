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

#ifndef DPLR_DATAGEN_DISTRIBUTION_H_
#define DPLR_DATAGEN_DISTRIBUTION_H_

#include <cstddef>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dplr/core/dataset.h"
#include "dplr/core/linalg.h"
#include "dplr/core/rng.h"

namespace dplr {

enum class CovariateFamily {
  // x = H^{1/2} g with g standard normal.
  kGaussian,
  // x_i = sqrt(lambda_i) * u_i with u_i uniform on [-sqrt(3), sqrt(3)]
  // (unit variance, bounded support).
  kScaledUniform,
};

std::string_view FamilyName(CovariateFamily family);
absl::StatusOr<CovariateFamily> ParseFamily(std::string_view name);

// How R_x^2 is obtained from the distribution.
enum class RxMode {
  // Smallest R^2 with E[|x|^2 x x^T] <= R^2 H, in closed form.
  kExact,
  // The idealized value d * ||H||_2, which is d for identity covariance and
  // reproduces the constants of the isotropic Gaussian preset.
  kIdealized,
};

// Ground-truth model y = <x, w*> + z, z ~ N(0, sigma^2) independent of x.
struct DistributionSpec {
  DiagonalPSD h = DiagonalPSD::Identity(1);
  Vector w_star = Vector(1);
  double sigma = 0.0;
  CovariateFamily family = CovariateFamily::kGaussian;
  // Tail exponent a; both supported families are sub-Gaussian (a = 1/2).
  double tail_a = 0.5;
  // Tail constant K_2. Treated as a tuning constant.
  double k2 = 2.0;

  std::size_t dim() const { return h.dim(); }
  absl::Status Validate() const;
};

// H = diag(kappa, ..., 1) with eigenvalues geometrically spaced from kappa
// down to 1 (all ones when kappa == 1), w* = (1, ..., 1) / sqrt(d) so that
// ||w*||_2 = 1.
absl::StatusOr<DistributionSpec> MakeSpec(std::size_t dim, double kappa,
                                          double sigma,
                                          CovariateFamily family =
                                              CovariateFamily::kGaussian);

// Distribution constants consumed by the trainers.
struct DerivedConstants {
  double rx2 = 0.0;
  double rx = 0.0;
  double trace = 0.0;
  double lambda_max = 0.0;  // ||H||_2
  double mu = 0.0;          // smallest eigenvalue
  double kappa = 0.0;       // ||H||_2 / mu
  double w_star_norm = 0.0;    // ||w*||_2
  double w_star_h_norm = 0.0;  // ||w*||_H
};

// Gaussian: Tr(H) + 2 lambda_max. ScaledUniform: Tr(H) + 0.8 lambda_max
// (fourth moment of a unit-variance uniform is 9/5). Idealized mode: d * ||H||_2.
absl::StatusOr<double> ComputeRx2(const DistributionSpec& spec,
                                  RxMode mode = RxMode::kExact);

absl::StatusOr<DerivedConstants> DeriveConstants(const DistributionSpec& spec,
                                                 RxMode mode = RxMode::kExact);

// Draws n i.i.d. rows. Per row the generator consumes d covariate variates
// followed by one noise variate (the noise draw is skipped when sigma == 0).
absl::StatusOr<Dataset> Generate(const DistributionSpec& spec, std::size_t n,
                                 SeededRng& rng);

}  // namespace dplr

#endif  // DPLR_DATAGEN_DISTRIBUTION_H_
