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

#include "dplr/harness/sweep.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_replace.h"
#include "dplr/core/status.h"
#include "dplr/core/text.h"

namespace dplr {
namespace {

std::string FormatAxisDouble(double v) { return absl::StrFormat("%.12g", v); }

// CSV-safe error text: no commas or newlines.
std::string CsvSafe(std::string text) {
  return absl::StrReplaceAll(text, {{",", ";"}, {"\n", " "}, {"\r", " "}});
}

std::string RowCsv(const SweepRow& row) {
  return absl::StrCat(RunCsvRow(row.summary), ",", row.ok ? "ok" : "error",
                      ",", CsvSafe(row.error));
}

// Summary fields that describe the cell even when the run failed.
RunSummary CellSummary(const ExperimentConfig& c, std::uint64_t seed) {
  RunSummary s;
  s.algorithm = std::string(AlgorithmName(c.algorithm));
  s.n = c.n;
  s.d = c.d;
  s.kappa = c.kappa;
  s.sigma = c.sigma;
  s.epsilon = c.epsilon;
  s.delta = c.delta;
  s.seed = seed;
  s.excess_risk = std::numeric_limits<double>::quiet_NaN();
  s.clip_fraction = std::numeric_limits<double>::quiet_NaN();
  return s;
}

}  // namespace

std::vector<SweepCell> ExpandSweep(const ExperimentConfig& config) {
  std::vector<SweepCell> cells(1);
  cells[0].config = config;
  auto expand = [&cells](const auto& values, auto apply) {
    if (values.empty()) return;
    std::vector<SweepCell> next;
    next.reserve(cells.size() * values.size());
    for (const SweepCell& cell : cells) {
      for (const auto& value : values) {
        SweepCell copy = cell;
        apply(copy.config, value);
        next.push_back(std::move(copy));
      }
    }
    cells = std::move(next);
  };
  expand(config.sweep_n, [](ExperimentConfig& c, std::size_t v) {
    c.n = v;
    c.source.Set("data.n", absl::StrCat(v));
  });
  expand(config.sweep_d, [](ExperimentConfig& c, std::size_t v) {
    c.d = v;
    c.source.Set("spec.d", absl::StrCat(v));
  });
  expand(config.sweep_epsilon, [](ExperimentConfig& c, double v) {
    c.epsilon = v;
    c.source.Set("privacy.epsilon", FormatAxisDouble(v));
  });
  expand(config.sweep_sigma, [](ExperimentConfig& c, double v) {
    c.sigma = v;
    c.source.Set("spec.sigma", FormatAxisDouble(v));
  });
  expand(config.sweep_kappa, [](ExperimentConfig& c, double v) {
    c.kappa = v;
    c.source.Set("spec.kappa", FormatAxisDouble(v));
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i].index = i;
    ExperimentConfig& c = cells[i].config;
    for (const char* key :
         {"sweep.N", "sweep.d", "sweep.epsilon", "sweep.sigma", "sweep.kappa"}) {
      c.source.Erase(key);
    }
    c.sweep_n.clear();
    c.sweep_d.clear();
    c.sweep_epsilon.clear();
    c.sweep_sigma.clear();
    c.sweep_kappa.clear();
  }
  return cells;
}

std::string SweepRunsHeader() { return RunCsvHeader() + ",status,error"; }

std::string SweepAggregateHeader() {
  return "algorithm,N,d,kappa,sigma,epsilon,delta,runs,failed,"
         "mean_excess_risk,stderr_excess_risk,mean_clip_fraction";
}

absl::StatusOr<SweepOutcome> RunSweep(const ExperimentConfig& config,
                                      const SweepOptions& options) {
  if (!config.HasSweepAxes()) {
    return absl::InvalidArgumentError(
        "sweep needs at least one axis (sweep.N, sweep.d, sweep.epsilon, "
        "sweep.sigma or sweep.kappa)");
  }
  const std::vector<SweepCell> cells = ExpandSweep(config);
  const std::size_t per_cell = config.seeds.size();
  const std::size_t total = cells.size() * per_cell;

  std::filesystem::path cell_dir;
  if (!options.out_dir.empty()) {
    cell_dir = std::filesystem::path(options.out_dir) / "cells";
    std::error_code ec;
    std::filesystem::create_directories(cell_dir, ec);
    if (ec) {
      return absl::UnavailableError(absl::StrFormat(
          "cannot create '%s': %s", cell_dir.string(), ec.message()));
    }
  }

  SweepOutcome outcome;
  outcome.rows.resize(total);
  std::vector<absl::Status> io_errors(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const SweepCell& cell = cells[i / per_cell];
      const std::uint64_t seed = config.seeds[i % per_cell];
      SweepRow& row = outcome.rows[i];
      row.cell = cell.index;
      row.seed = seed;
      row.run_index = i;
      absl::StatusOr<RunOutput> run = RunSingle(cell.config, seed, i);
      if (run.ok()) {
        row.ok = true;
        row.summary = run->summary;
      } else {
        row.ok = false;
        row.summary = CellSummary(cell.config, seed);
        row.error = absl::StrCat(absl::StatusCodeToString(run.status().code()),
                                 ": ", std::string(run.status().message()));
      }
      if (!cell_dir.empty()) {
        const std::string stem = absl::StrFormat("run_%06d", i);
        absl::Status st = WriteFileAtomically(
            (cell_dir / (stem + ".csv")).string(), RowCsv(row) + "\n");
        if (st.ok() && options.write_reports && run.ok()) {
          st = WriteFileAtomically((cell_dir / (stem + ".json")).string(),
                                   run->report.dump(2) + "\n");
        }
        io_errors[i] = st;
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, total));
  std::vector<std::thread> threads;
  threads.reserve(jobs - 1);
  for (std::size_t j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();
  for (const absl::Status& st : io_errors) DPLR_RETURN_IF_ERROR(st);

  outcome.runs_csv = SweepRunsHeader() + "\n";
  for (const SweepRow& row : outcome.rows) {
    outcome.runs_csv += RowCsv(row) + "\n";
    if (!row.ok && !outcome.first_failure) {
      outcome.first_failure = absl::StrFormat("cell %d seed %d: %s", row.cell,
                                              row.seed, row.error);
    }
  }

  outcome.aggregate_csv = SweepAggregateHeader() + "\n";
  for (const SweepCell& cell : cells) {
    std::vector<double> risks, clips;
    std::size_t failed = 0;
    for (std::size_t k = 0; k < per_cell; ++k) {
      const SweepRow& row = outcome.rows[cell.index * per_cell + k];
      if (!row.ok) {
        ++failed;
        continue;
      }
      risks.push_back(row.summary.excess_risk);
      clips.push_back(row.summary.clip_fraction);
    }
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stderr_ = std::numeric_limits<double>::quiet_NaN();
    double clip_mean = std::numeric_limits<double>::quiet_NaN();
    if (!risks.empty()) {
      const double n = static_cast<double>(risks.size());
      double sum = 0.0, clip_sum = 0.0;
      for (std::size_t k = 0; k < risks.size(); ++k) {
        sum += risks[k];
        clip_sum += clips[k];
      }
      mean = sum / n;
      clip_mean = clip_sum / n;
      if (risks.size() > 1) {
        double ss = 0.0;
        for (double r : risks) ss += (r - mean) * (r - mean);
        stderr_ = std::sqrt(ss / (n - 1.0) / n);
      }
    }
    const ExperimentConfig& c = cell.config;
    outcome.aggregate_csv += absl::StrFormat(
        "%s,%d,%d,%.12g,%.12g,%.12g,%.12g,%d,%d,%.12g,%.12g,%.12g\n",
        std::string(AlgorithmName(c.algorithm)), c.n, c.d, c.kappa, c.sigma,
        c.epsilon, c.delta, per_cell, failed, mean, stderr_, clip_mean);
  }

  if (!options.out_dir.empty()) {
    const std::filesystem::path out(options.out_dir);
    DPLR_RETURN_IF_ERROR(
        WriteFileAtomically((out / "runs.csv").string(), outcome.runs_csv));
    DPLR_RETURN_IF_ERROR(WriteFileAtomically((out / "aggregate.csv").string(),
                                             outcome.aggregate_csv));
  }
  return outcome;
}

}  // namespace dplr
