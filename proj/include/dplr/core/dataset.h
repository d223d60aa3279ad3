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

#ifndef DPLR_CORE_DATASET_H_
#define DPLR_CORE_DATASET_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dplr/core/rng.h"

namespace dplr {

class DatasetView;

// Ordered (x, y) rows of a fixed dimension. Covariates are stored row-major
// in one contiguous buffer.
class Dataset {
 public:
  explicit Dataset(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return responses_.size(); }
  bool empty() const { return responses_.empty(); }

  std::span<const double> x(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  double y(std::size_t i) const { return responses_[i]; }

  void Reserve(std::size_t rows);
  // Appends a row; fails on dimension mismatch or non-finite values.
  absl::Status Append(std::span<const double> x, double y);
  // Unchecked append for generators that already guarantee the contract.
  void AppendUnchecked(std::span<const double> x, double y);

  // Rows [first, first + count) without copying.
  DatasetView View(std::size_t first, std::size_t count) const;
  DatasetView View() const;

  // New dataset whose row i is this dataset's row order[i].
  Dataset Permuted(std::span<const std::size_t> order) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<double> responses_;
};

// Non-owning window over consecutive rows of a Dataset. `offset()` is the
// index of the first row in the underlying dataset.
class DatasetView {
 public:
  DatasetView(const Dataset& data, std::size_t first, std::size_t count)
      : data_(&data), first_(first), count_(count) {}

  std::size_t dim() const { return data_->dim(); }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::size_t offset() const { return first_; }
  std::span<const double> x(std::size_t i) const { return data_->x(first_ + i); }
  double y(std::size_t i) const { return data_->y(first_ + i); }

 private:
  const Dataset* data_;
  std::size_t first_;
  std::size_t count_;
};

// Fisher-Yates: for i = n-1 down to 1, swap position i with a uniform index
// in [0, i]. Deterministic given the generator state.
std::vector<std::size_t> RandomPermutation(std::size_t n, SeededRng& rng);

// Uniformly random reordering of the rows.
absl::StatusOr<Dataset> Shuffle(const Dataset& data, SeededRng& rng);

}  // namespace dplr

#endif  // DPLR_CORE_DATASET_H_
