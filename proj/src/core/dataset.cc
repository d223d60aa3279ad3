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

#include "dplr/core/dataset.h"

#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_format.h"
#include "dplr/core/linalg.h"

namespace dplr {

void Dataset::Reserve(std::size_t rows) {
  features_.reserve(rows * dim_);
  responses_.reserve(rows);
}

absl::Status Dataset::Append(std::span<const double> x, double y) {
  if (x.size() != dim_) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "row has dimension %d, dataset has dimension %d", x.size(), dim_));
  }
  if (!AllFinite(x) || !std::isfinite(y)) {
    return absl::InvalidArgumentError("row contains a non-finite value");
  }
  AppendUnchecked(x, y);
  return absl::OkStatus();
}

void Dataset::AppendUnchecked(std::span<const double> x, double y) {
  features_.insert(features_.end(), x.begin(), x.end());
  responses_.push_back(y);
}

DatasetView Dataset::View(std::size_t first, std::size_t count) const {
  return DatasetView(*this, first, count);
}

DatasetView Dataset::View() const { return DatasetView(*this, 0, size()); }

Dataset Dataset::Permuted(std::span<const std::size_t> order) const {
  Dataset out(dim_);
  out.Reserve(order.size());
  for (std::size_t i : order) out.AppendUnchecked(x(i), y(i));
  return out;
}

std::vector<std::size_t> RandomPermutation(std::size_t n, SeededRng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = rng.UniformIndex(i + 1);
    std::swap(order[i], order[j]);
  }
  return order;
}

absl::StatusOr<Dataset> Shuffle(const Dataset& data, SeededRng& rng) {
  if (data.empty()) {
    return absl::InvalidArgumentError("cannot shuffle an empty dataset");
  }
  const std::vector<std::size_t> order = RandomPermutation(data.size(), rng);
  return data.Permuted(order);
}

}  // namespace dplr
