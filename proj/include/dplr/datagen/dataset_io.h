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

#ifndef DPLR_DATAGEN_DATASET_IO_H_
#define DPLR_DATAGEN_DATASET_IO_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dplr/core/dataset.h"
#include "dplr/datagen/distribution.h"

namespace dplr {

// Dataset text format:
//
//   # dplr-dataset 1
//   # d=<dim>
//   # n=<rows>
//   # seed=<seed>                  (optional)
//   # spec.family=gaussian         (optional block, all-or-nothing)
//   # spec.eigenvalues=l1,...,ld
//   # spec.w_star=w1,...,wd
//   # spec.sigma=<sigma>
//   # spec.tail_a=<a>
//   # spec.k2=<K2>
//   x1,...,xd,y
//   ...
//
// Reals are written with 17 significant digits, so a write/read cycle
// reproduces every double bit for bit.
struct DatasetFile {
  Dataset data{1};
  std::optional<std::uint64_t> seed;
  std::optional<DistributionSpec> spec;
};

std::string FormatDouble(double value);

absl::Status WriteDataset(std::ostream& out, const DatasetFile& file);
absl::Status WriteDatasetFile(const std::string& path, const DatasetFile& file);

absl::StatusOr<DatasetFile> ReadDataset(std::istream& in);
absl::StatusOr<DatasetFile> ReadDatasetFile(const std::string& path);

}  // namespace dplr

#endif  // DPLR_DATAGEN_DATASET_IO_H_
