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

#ifndef DPLR_CORE_LINALG_H_
#define DPLR_CORE_LINALG_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dplr {

// Dense real vector. Values crossing a public boundary (Create, file I/O,
// trainer iterates) are checked to be finite; arithmetic helpers below do
// not re-check.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  Vector(std::initializer_list<double> values) : values_(values) {}
  explicit Vector(std::vector<double> values) : values_(std::move(values)) {}

  // Validating constructor: dimension >= 1 and every entry finite.
  static absl::StatusOr<Vector> Create(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool AllFinite() const;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> values_;
};

double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> v);
// y += a * x.
void Axpy(double a, std::span<const double> x, std::span<double> y);
bool AllFinite(std::span<const double> v);

// Second-moment matrix stored by its (strictly positive) eigenvalues.
class DiagonalPSD {
 public:
  static absl::StatusOr<DiagonalPSD> Create(std::vector<double> eigenvalues);
  static DiagonalPSD Identity(std::size_t dim);

  std::size_t dim() const { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  double operator[](std::size_t i) const { return eigenvalues_[i]; }

  double Trace() const;
  // Spectral norm, i.e. the largest eigenvalue.
  double MaxEigenvalue() const;
  double MinEigenvalue() const;
  double ConditionNumber() const { return MaxEigenvalue() / MinEigenvalue(); }
  bool IsIdentity() const;

 private:
  explicit DiagonalPSD(std::vector<double> eigenvalues)
      : eigenvalues_(std::move(eigenvalues)) {}

  std::vector<double> eigenvalues_;
};

// ||v||_H = sqrt(sum_i lambda_i v_i^2).
absl::StatusOr<double> QuadraticNorm(std::span<const double> v,
                                     const DiagonalPSD& h);

// clip_zeta(v) = v * min{1, zeta / ||v||_2}. zeta may be +infinity, which
// disables clipping. The result never has norm above zeta, so clipping is
// idempotent bit for bit.
absl::StatusOr<Vector> Clip(const Vector& v, double zeta);

// In-place variant for hot loops; preconditions are the caller's job.
// Returns true iff the vector was rescaled.
bool ClipInPlace(std::span<double> v, double zeta);

}  // namespace dplr

#endif  // DPLR_CORE_LINALG_H_
