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

#include "dplr/core/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"

namespace dplr {

absl::StatusOr<Vector> Vector::Create(std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("vector dimension must be at least 1");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      return absl::InvalidArgumentError(
          absl::StrFormat("vector entry %d is not finite", i));
    }
  }
  return Vector(std::move(values));
}

bool Vector::AllFinite() const { return dplr::AllFinite(values_); }

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Norm2(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

void Axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double e) { return std::isfinite(e); });
}

absl::StatusOr<DiagonalPSD> DiagonalPSD::Create(
    std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) {
    return absl::InvalidArgumentError("covariance dimension must be >= 1");
  }
  for (double e : eigenvalues) {
    if (!std::isfinite(e) || e <= 0.0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "covariance eigenvalues must be finite and positive, got %g", e));
    }
  }
  return DiagonalPSD(std::move(eigenvalues));
}

DiagonalPSD DiagonalPSD::Identity(std::size_t dim) {
  return DiagonalPSD(std::vector<double>(dim, 1.0));
}

double DiagonalPSD::Trace() const {
  double sum = 0.0;
  for (double e : eigenvalues_) sum += e;
  return sum;
}

double DiagonalPSD::MaxEigenvalue() const {
  return *std::max_element(eigenvalues_.begin(), eigenvalues_.end());
}

double DiagonalPSD::MinEigenvalue() const {
  return *std::min_element(eigenvalues_.begin(), eigenvalues_.end());
}

bool DiagonalPSD::IsIdentity() const {
  return std::all_of(eigenvalues_.begin(), eigenvalues_.end(),
                     [](double e) { return e == 1.0; });
}

absl::StatusOr<double> QuadraticNorm(std::span<const double> v,
                                     const DiagonalPSD& h) {
  if (v.size() != h.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dimension mismatch: vector %d vs matrix %d", v.size(), h.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += h[i] * v[i] * v[i];
  return std::sqrt(sum);
}

bool ClipInPlace(std::span<double> v, double zeta) {
  const double norm = Norm2(v);
  if (norm <= zeta) return false;
  double scale = zeta / norm;
  for (;;) {
    for (double& e : v) e *= scale;
    // Rounding can leave the rescaled norm an ulp above zeta.
    if (Norm2(v) <= zeta) break;
    scale = std::nextafter(1.0, 0.0);
  }
  return true;
}

absl::StatusOr<Vector> Clip(const Vector& v, double zeta) {
  if (!(zeta > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("clipping norm must be positive, got %g", zeta));
  }
  if (!v.AllFinite()) {
    return absl::InvalidArgumentError("cannot clip a non-finite vector");
  }
  Vector out = v;
  ClipInPlace(out.span(), zeta);
  return out;
}

}  // namespace dplr
