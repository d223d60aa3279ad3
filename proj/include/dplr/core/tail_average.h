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

#ifndef DPLR_CORE_TAIL_AVERAGE_H_
#define DPLR_CORE_TAIL_AVERAGE_H_

#include <algorithm>
#include <cstddef>
#include <span>

#include "dplr/core/linalg.h"

namespace dplr {

// Running mean of the last max(1, floor(n/2)) of the iterates w_1..w_n.
// Memory is O(d): iterates before the tail are ignored, the rest summed.
class TailAverager {
 public:
  TailAverager(std::size_t dim, std::size_t total_iterates)
      : sum_(dim, 0.0),
        tail_length_(std::max<std::size_t>(1, total_iterates / 2)),
        first_tail_index_(total_iterates - tail_length_ + 1) {}

  static std::size_t TailLength(std::size_t total_iterates) {
    return std::max<std::size_t>(1, total_iterates / 2);
  }

  // `index` is 1-based: the iterate produced by update number `index`.
  void Observe(std::size_t index, std::span<const double> w) {
    if (index < first_tail_index_) return;
    Axpy(1.0, w, sum_.span());
    ++count_;
  }

  std::size_t first_tail_index() const { return first_tail_index_; }
  std::size_t count() const { return count_; }

  Vector Mean() const {
    Vector out = sum_;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= n;
    return out;
  }

 private:
  Vector sum_;
  std::size_t tail_length_;
  std::size_t first_tail_index_;
  std::size_t count_ = 0;
};

}  // namespace dplr

#endif  // DPLR_CORE_TAIL_AVERAGE_H_
