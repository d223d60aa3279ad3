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

#ifndef DPLR_PRIVACY_ACCOUNTANT_H_
#define DPLR_PRIVACY_ACCOUNTANT_H_

// Privacy calibration and zCDP bookkeeping. All logarithms are natural.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dplr {

// Which closed form to use when turning an (epsilon, delta) budget into the
// noise multiplier of the adaptive mini-batch trainer (L = ln(1/delta)):
enum class AlphaForm {
  // (sqrt(L + eps) + sqrt(L)) / eps. The smallest alpha for which
  // EpsFromRho(1 / alpha^2, delta) <= eps; the conversion is then an
  // equality.
  kTight,
  // 2 sqrt(L + eps) / eps. Always >= the tight value.
  kStandard,
  // sqrt(8 L) / eps. Only valid for eps <= L.
  kSimplified,
};

absl::Status ValidateBudget(double epsilon, double delta);

absl::StatusOr<double> AlphaForAmbssgd(double epsilon, double delta,
                                       AlphaForm form = AlphaForm::kStandard);

// rho + 2 sqrt(rho ln(1/delta)).
absl::StatusOr<double> EpsFromRho(double rho, double delta);

// 1 / alpha^2 for one full run. The stat call and the noisy gradient step of
// iteration t touch disjoint samples of a single pass, so the per-iteration
// costs compose in parallel and the total does not grow with T.
absl::StatusOr<double> ComposeAmbssgdRho(double alpha, std::int64_t iterations);

// Constants hidden by the asymptotic single-sample calibration.
struct SsgdPrivacyConstants {
  double c3 = 1.0;         // alpha = c3 ln(N/delta) / (eps sqrt(N))
  double eps_cap_c = 1.0;  // eps <= eps_cap_c sqrt(ln(N/delta) / N)
};

double SsgdEpsilonCap(double delta, std::size_t n,
                      const SsgdPrivacyConstants& constants = {});

// Fails with kOutOfRange when epsilon exceeds the cap.
absl::StatusOr<double> AlphaForSsgd(double epsilon, double delta, std::size_t n,
                                    const SsgdPrivacyConstants& constants = {});

// Amplified epsilon of one eps0-DP local randomizer per record over a
// uniformly shuffled dataset of n records:
//   c (1 - e^-eps0) (sqrt(e^eps0 ln(1/delta)) / sqrt(n) + e^eps0 / n),
// valid when eps0 <= ln(n / (16 ln(2/delta))).
absl::StatusOr<double> ShuffleAmplifiedEps(double eps0, double delta,
                                           std::size_t n, double c = 1.0);
double ShuffleEps0Cap(double delta, std::size_t n);

// Count error bound of the private threshold search:
//   alpha sqrt(2 ln(B/Delta) ln(ln(B/Delta) / beta)).
// Requires B > Delta > 0, beta > 0 and ln(B/Delta) > beta.
absl::StatusOr<double> StatGammaBound(double alpha, double b, double delta_width,
                                      double beta);

// zCDP of a Gaussian mechanism with the given l2 sensitivity and noise std.
double GaussianRho(double sensitivity, double stddev);

// Records zCDP charges against partitions of the data. Charges against the
// same partition compose sequentially (sum); different partitions hold
// disjoint records and compose in parallel (max).
class ZcdpLedger {
 public:
  struct Charge {
    std::int64_t partition;
    std::string mechanism;
    double rho;
  };

  void Record(std::int64_t partition, std::string mechanism, double rho);

  const std::vector<Charge>& charges() const { return charges_; }
  double PartitionRho(std::int64_t partition) const;
  // max over partitions of the per-partition sum; 0 when empty.
  double TotalRho() const;
  std::size_t partition_count() const { return per_partition_.size(); }

 private:
  std::vector<Charge> charges_;
  std::map<std::int64_t, double> per_partition_;
};

// Summary emitted with every run.
struct PrivacyStatement {
  double epsilon = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double rho = 0.0;  // 0 for the single-sample trainer, which is not zCDP-accounted
  std::string mechanism;
  std::vector<std::pair<std::string, double>> assumed_constants;
};

}  // namespace dplr

#endif  // DPLR_PRIVACY_ACCOUNTANT_H_
