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

#ifndef DPLR_HARNESS_SWEEP_H_
#define DPLR_HARNESS_SWEEP_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dplr/harness/config.h"
#include "dplr/harness/experiment.h"

namespace dplr {

// One point of the axis cross product (before seeds are expanded).
struct SweepCell {
  std::size_t index = 0;
  ExperimentConfig config;
};

// Cross product of the configured axes in the fixed order N, d, epsilon,
// sigma, kappa (last axis varies fastest).
std::vector<SweepCell> ExpandSweep(const ExperimentConfig& config);

struct SweepRow {
  std::size_t cell = 0;
  std::uint64_t seed = 0;
  std::uint64_t run_index = 0;
  bool ok = false;
  std::string error;  // "<code>: <message>" when !ok
  RunSummary summary;
};

struct SweepOptions {
  std::size_t jobs = 1;
  // Output directory. Each run writes its row (and report when
  // write_reports) atomically under <out_dir>/cells/, and the merged
  // runs.csv and aggregate.csv are written at the end. Empty = in memory.
  std::string out_dir;
  bool write_reports = false;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;  // cell-major, then seed order
  std::string runs_csv;
  std::string aggregate_csv;
  std::optional<std::string> first_failure;
  bool ok() const { return !first_failure.has_value(); }
};

// Runs every (cell, seed) pair. The run index of pair (cell c, seed
// position k) is c * seeds + k. Failures become rows with a status and do
// not stop the sweep.
absl::StatusOr<SweepOutcome> RunSweep(const ExperimentConfig& config,
                                      const SweepOptions& options);

// runs.csv: run columns + status,error.
std::string SweepRunsHeader();
// aggregate.csv: algorithm,N,d,kappa,sigma,epsilon,delta,runs,failed,
// mean_excess_risk,stderr_excess_risk,mean_clip_fraction
std::string SweepAggregateHeader();

}  // namespace dplr

#endif  // DPLR_HARNESS_SWEEP_H_
