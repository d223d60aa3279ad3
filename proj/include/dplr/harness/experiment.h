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

#ifndef DPLR_HARNESS_EXPERIMENT_H_
#define DPLR_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "dplr/core/linalg.h"
#include "dplr/datagen/dataset_io.h"
#include "dplr/harness/config.h"
#include "json.hpp"

namespace dplr {

using Json = nlohmann::ordered_json;

// One row of the run table.
struct RunSummary {
  std::string algorithm;
  std::size_t n = 0;
  std::size_t d = 0;
  double kappa = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  double excess_risk = 0.0;
  double clip_fraction = 0.0;
  double wallclock_ms = 0.0;
};

// Columns: algorithm,N,d,kappa,sigma,epsilon,delta,seed,excess_risk,
// clip_fraction,wallclock_ms
std::string RunCsvHeader();
std::string RunCsvRow(const RunSummary& summary);

struct RunOutput {
  RunSummary summary;
  // Everything except wall-clock time is a deterministic function of
  // (config, seed, run index). Timing lives under the "timing" key.
  Json report;
  // t,gamma_t,zeta_t,clip_count,iterate_excess_risk (when run.trace is set
  // and the algorithm is iterative over batches).
  std::string trace_csv;
  Vector w_bar;
};

// Per-run generator seed: DeriveStreamSeed(seed, run_index), i.e.
// SplitMix64(seed ^ SplitMix64(run_index)). Data, training and held-out
// rows use forks 0, 1 and 2 of that stream.
std::uint64_t RunStreamSeed(std::uint64_t seed, std::uint64_t run_index);

// The training rows RunSingle would generate for (config, seed, run_index).
absl::StatusOr<Dataset> GenerateRunData(const ExperimentConfig& config,
                                        std::uint64_t seed,
                                        std::uint64_t run_index = 0);

// Trains on `data` when given (its spec is required for risk evaluation),
// otherwise generates N rows from the configured distribution.
absl::StatusOr<RunOutput> RunSingle(const ExperimentConfig& config,
                                    std::uint64_t seed,
                                    std::uint64_t run_index = 0,
                                    const DatasetFile* data = nullptr);

// Copy of a report with the "timing" block removed.
Json WithoutTiming(const Json& report);

}  // namespace dplr

#endif  // DPLR_HARNESS_EXPERIMENT_H_
