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

#include "dplr/eval/risk.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "absl/strings/str_format.h"
#include "dplr/core/status.h"

namespace dplr {
namespace {

// Reciprocal condition estimate below which an unregularized solve is
// reported as singular.
constexpr double kMinRcond = 1e-12;

}  // namespace

absl::StatusOr<double> ExcessRisk(std::span<const double> w,
                                  const DistributionSpec& spec) {
  if (w.size() != spec.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "w has dimension %d, spec has %d", w.size(), spec.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double e = w[i] - spec.w_star[i];
    sum += spec.h[i] * e * e;
  }
  return 0.5 * sum;
}

absl::StatusOr<double> EmpiricalRisk(std::span<const double> w,
                                     const Dataset& test) {
  if (test.empty()) return absl::InvalidArgumentError("empty test set");
  if (w.size() != test.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "w has dimension %d, data has %d", w.size(), test.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double r = test.y(i) - Dot(test.x(i), w);
    sum += r * r;
  }
  return sum / (2.0 * static_cast<double>(test.size()));
}

absl::StatusOr<Vector> OlsSolve(const Dataset& data, double ridge) {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("ridge must be finite and >= 0, got %g", ridge));
  }
  if (data.empty()) return absl::InvalidArgumentError("empty dataset");
  const std::size_t d = data.dim();
  if (ridge == 0.0 && data.size() < d) {
    return NumericFailureError(absl::StrFormat(
        "X^T X is singular: N=%d < d=%d and ridge is 0", data.size(), d));
  }
  const Eigen::Index dd = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dd, dd);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dd);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::Map<const Eigen::VectorXd> x(data.x(i).data(), dd);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
    rhs += data.y(i) * x;
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += ridge;

  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    return NumericFailureError("X^T X + ridge I is not positive definite");
  }
  if (ridge == 0.0 && llt.rcond() < kMinRcond) {
    return NumericFailureError(absl::StrFormat(
        "X^T X is numerically singular (rcond %.3g)", llt.rcond()));
  }
  const Eigen::VectorXd solution = llt.solve(rhs);
  Vector w(d);
  for (std::size_t i = 0; i < d; ++i) w[i] = solution(static_cast<Eigen::Index>(i));
  if (!w.AllFinite()) return NumericFailureError("non-finite OLS solution");
  return w;
}

absl::StatusOr<RiskReport> EvaluateRisk(std::span<const double> w,
                                        const DistributionSpec& spec,
                                        const Dataset& test) {
  RiskReport report;
  DPLR_ASSIGN_OR_RETURN(report.excess_risk_exact, ExcessRisk(w, spec));
  DPLR_ASSIGN_OR_RETURN(const double risk_w, EmpiricalRisk(w, test));
  DPLR_ASSIGN_OR_RETURN(const double risk_star,
                        EmpiricalRisk(spec.w_star.span(), test));
  report.excess_risk_empirical = std::max(0.0, risk_w - risk_star);
  report.n_test = test.size();
  return report;
}

}  // namespace dplr
