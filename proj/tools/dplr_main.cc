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

// dplr: generate data, train private linear regressors, run sweeps.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dplr/core/status.h"
#include "dplr/core/text.h"
#include "dplr/datagen/dataset_io.h"
#include "dplr/eval/risk.h"
#include "dplr/harness/config.h"
#include "dplr/harness/experiment.h"
#include "dplr/harness/sweep.h"

namespace dplr {
namespace {

constexpr const char* kSchemaHelp = R"(Output schemas
  train --format csv (one row per seed):
    algorithm,N,d,kappa,sigma,epsilon,delta,seed,excess_risk,clip_fraction,wallclock_ms
  sweep <out>/runs.csv: the train columns followed by status,error
    (status is ok|error; error is "<code>: <message>" with commas replaced)
  sweep <out>/aggregate.csv (one row per axis cell):
    algorithm,N,d,kappa,sigma,epsilon,delta,runs,failed,mean_excess_risk,
    stderr_excess_risk,mean_clip_fraction
  train --out DIR also writes report_seed<S>.json and, with run.trace=true,
    trace_seed<S>.csv: t,gamma_t,zeta_t,clip_count,iterate_excess_risk
  wallclock_ms and the JSON "timing" block are the only non-deterministic
  fields.
Exit status: 0 when every run succeeded, 1 on usage/config errors, 2 when a
run failed (the message names the first failure).)";

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::string seeds;
  bool paper_mode = false;
  std::string out_dir;
  std::string format = "csv";
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file");
  cmd->add_option("--set", flags.sets, "override a config key (key=value)")
      ->type_name("KEY=VALUE");
  cmd->add_option("--seed", flags.seeds, "comma-separated seeds (run.seeds)");
  cmd->add_flag("--paper-mode", flags.paper_mode,
                "isotropic-Gaussian preset constants (run.paper_mode)");
  cmd->add_option("--format", flags.format, "stdout format")
      ->check(CLI::IsMember({"csv", "json"}));
}

absl::StatusOr<ExperimentConfig> LoadConfig(const CommonFlags& flags) {
  FlatConfig flat;
  if (!flags.config_path.empty()) {
    DPLR_ASSIGN_OR_RETURN(flat, FlatConfig::Load(flags.config_path));
  }
  for (const std::string& assignment : flags.sets) {
    DPLR_RETURN_IF_ERROR(flat.Assign(assignment));
  }
  if (!flags.seeds.empty()) flat.Set("run.seeds", flags.seeds);
  if (flags.paper_mode) flat.Set("run.paper_mode", "true");
  return ParseExperimentConfig(flat);
}

absl::Status EnsureDir(const std::string& dir) {
  if (dir.empty()) return absl::OkStatus();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrFormat("cannot create '%s': %s", dir, ec.message()));
  }
  return absl::OkStatus();
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir.empty() ? "." : dir) / name).string();
}

absl::Status CmdGen(const CommonFlags& flags) {
  DPLR_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  DPLR_RETURN_IF_ERROR(EnsureDir(flags.out_dir));
  DPLR_ASSIGN_OR_RETURN(const DistributionSpec spec, config.Spec());
  for (std::uint64_t seed : config.seeds) {
    DatasetFile file;
    DPLR_ASSIGN_OR_RETURN(file.data, GenerateRunData(config, seed));
    file.seed = seed;
    file.spec = spec;
    const std::string path =
        JoinPath(flags.out_dir, absl::StrFormat("dataset_seed%d.csv", seed));
    DPLR_RETURN_IF_ERROR(WriteDatasetFile(path, file));
    std::cout << path << "\n";
  }
  return absl::OkStatus();
}

absl::Status CmdTrain(const CommonFlags& flags, const std::string& data_path) {
  DPLR_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  std::optional<DatasetFile> data;
  if (!data_path.empty()) {
    DPLR_ASSIGN_OR_RETURN(data, ReadDatasetFile(data_path));
  }
  DPLR_RETURN_IF_ERROR(EnsureDir(flags.out_dir));
  std::string csv = RunCsvHeader() + "\n";
  Json reports = Json::array();
  for (std::size_t k = 0; k < config.seeds.size(); ++k) {
    const std::uint64_t seed = config.seeds[k];
    absl::StatusOr<RunOutput> run =
        RunSingle(config, seed, k, data ? &*data : nullptr);
    if (!run.ok()) {
      return absl::Status(run.status().code(),
                          absl::StrFormat("seed %d: %s", seed,
                                          std::string(run.status().message())));
    }
    csv += RunCsvRow(run->summary) + "\n";
    if (!flags.out_dir.empty()) {
      DPLR_RETURN_IF_ERROR(WriteFileAtomically(
          JoinPath(flags.out_dir, absl::StrFormat("report_seed%d.json", seed)),
          run->report.dump(2) + "\n"));
      if (!run->trace_csv.empty()) {
        DPLR_RETURN_IF_ERROR(WriteFileAtomically(
            JoinPath(flags.out_dir, absl::StrFormat("trace_seed%d.csv", seed)),
            run->trace_csv));
      }
    }
    for (const auto& warning : run->report["warnings"]) {
      std::cerr << "warning (seed " << seed << "): "
                << warning.get<std::string>() << "\n";
    }
    reports.push_back(std::move(run->report));
  }
  if (!flags.out_dir.empty()) {
    DPLR_RETURN_IF_ERROR(
        WriteFileAtomically(JoinPath(flags.out_dir, "summary.csv"), csv));
  }
  if (flags.format == "json") {
    std::cout << (reports.size() == 1 ? reports[0] : reports).dump(2) << "\n";
  } else {
    std::cout << csv;
  }
  return absl::OkStatus();
}

// Returns the first run failure separately so the caller can exit with 2.
absl::StatusOr<std::optional<std::string>> CmdSweep(const CommonFlags& flags,
                                                    std::size_t jobs,
                                                    bool reports) {
  DPLR_ASSIGN_OR_RETURN(const ExperimentConfig config, LoadConfig(flags));
  SweepOptions options;
  options.jobs = jobs;
  options.out_dir = flags.out_dir.empty() ? "sweep_out" : flags.out_dir;
  options.write_reports = reports;
  DPLR_ASSIGN_OR_RETURN(const SweepOutcome outcome, RunSweep(config, options));
  if (flags.format == "json") {
    Json rows = Json::array();
    for (const SweepRow& row : outcome.rows) {
      Json j;
      j["cell"] = row.cell;
      j["seed"] = row.seed;
      j["run_index"] = row.run_index;
      j["status"] = row.ok ? "ok" : "error";
      j["error"] = row.error;
      j["excess_risk"] = row.summary.excess_risk;
      j["clip_fraction"] = row.summary.clip_fraction;
      rows.push_back(std::move(j));
    }
    std::cout << rows.dump(2) << "\n";
  } else {
    std::cout << outcome.aggregate_csv;
  }
  std::cerr << "wrote " << JoinPath(options.out_dir, "runs.csv") << " and "
            << JoinPath(options.out_dir, "aggregate.csv") << "\n";
  return outcome.first_failure;
}

absl::Status CmdEval(const CommonFlags& flags, const std::string& data_path,
                     const std::string& w_list, const std::string& report_path,
                     bool ols, double ridge) {
  if (data_path.empty()) return absl::InvalidArgumentError("--data is required");
  DPLR_ASSIGN_OR_RETURN(const DatasetFile file, ReadDatasetFile(data_path));
  Vector w;
  std::string source;
  if (ols) {
    DPLR_ASSIGN_OR_RETURN(w, OlsSolve(file.data, ridge));
    source = "ols";
  } else if (!w_list.empty()) {
    DPLR_ASSIGN_OR_RETURN(std::vector<double> values, ParseDoubleList(w_list));
    w = Vector(std::move(values));
    source = "argument";
  } else if (!report_path.empty()) {
    DPLR_ASSIGN_OR_RETURN(const std::string text, ReadFile(report_path));
    const Json report = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (report.is_discarded() || !report.contains("result") ||
        !report["result"].contains("w_bar")) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "'%s' is not a run report with result.w_bar", report_path));
    }
    w = Vector(report["result"]["w_bar"].get<std::vector<double>>());
    source = report_path;
  } else {
    return absl::InvalidArgumentError("give one of --w, --report or --ols");
  }
  if (w.size() != file.data.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "w has dimension %d, data has %d", w.size(), file.data.dim()));
  }
  DPLR_ASSIGN_OR_RETURN(const double empirical,
                        EmpiricalRisk(w.span(), file.data));
  Json out;
  out["source"] = source;
  out["n"] = file.data.size();
  out["d"] = file.data.dim();
  out["empirical_risk"] = empirical;
  if (file.spec.has_value()) {
    DPLR_ASSIGN_OR_RETURN(const RiskReport report,
                          EvaluateRisk(w.span(), *file.spec, file.data));
    out["excess_risk_exact"] = report.excess_risk_exact;
    out["excess_risk_empirical"] = report.excess_risk_empirical;
  } else {
    out["excess_risk_exact"] = nullptr;
    out["excess_risk_empirical"] = nullptr;
  }
  if (flags.format == "json") {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "source,n,d,empirical_risk,excess_risk_exact,"
                 "excess_risk_empirical\n";
    std::cout << source << "," << out["n"] << "," << out["d"] << ","
              << out["empirical_risk"] << "," << out["excess_risk_exact"] << ","
              << out["excess_risk_empirical"] << "\n";
  }
  return absl::OkStatus();
}

std::string ConfigKeyHelp() {
  std::string text = "Config keys (key=value, also settable with --set)\n";
  for (const auto& [key, description] : ConfigKeys()) {
    text += absl::StrFormat("  %-20s %s\n", key, description);
  }
  return text;
}

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"dplr: differentially private linear regression toolkit"};
  app.footer(ConfigKeyHelp() + "\n" + kSchemaHelp);
  app.require_subcommand(1);

  CommonFlags gen_flags, train_flags, sweep_flags, eval_flags;
  CLI::App* gen = app.add_subcommand("gen", "write synthetic datasets");
  AddCommonFlags(gen, gen_flags);
  gen->add_option("--out", gen_flags.out_dir, "output directory");

  CLI::App* train = app.add_subcommand("train", "train one run per seed");
  AddCommonFlags(train, train_flags);
  train->add_option("--out", train_flags.out_dir,
                    "directory for reports, traces and summary.csv");
  std::string train_data;
  train->add_option("--data", train_data,
                    "train on a dataset file instead of generating rows");

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over sweep.* axes");
  AddCommonFlags(sweep, sweep_flags);
  sweep->add_option("--out", sweep_flags.out_dir,
                    "output directory (default sweep_out)");
  std::size_t jobs = 1;
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
  bool sweep_reports = false;
  sweep->add_flag("--reports", sweep_reports, "also write per-run JSON reports");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a model on a dataset");
  AddCommonFlags(eval, eval_flags);
  std::string eval_data, eval_w, eval_report;
  bool eval_ols = false;
  double ridge = 0.0;
  eval->add_option("--data", eval_data, "dataset file")->required();
  eval->add_option("--w", eval_w, "comma-separated weights");
  eval->add_option("--report", eval_report, "run report JSON (uses result.w_bar)");
  eval->add_flag("--ols", eval_ols, "fit least squares on the dataset");
  eval->add_option("--ridge", ridge, "ridge for --ols");

  CLI11_PARSE(app, argc, argv);

  absl::Status status;
  if (gen->parsed()) {
    status = CmdGen(gen_flags);
  } else if (train->parsed()) {
    status = CmdTrain(train_flags, train_data);
  } else if (sweep->parsed()) {
    absl::StatusOr<std::optional<std::string>> failure =
        CmdSweep(sweep_flags, jobs, sweep_reports);
    if (!failure.ok()) return Fail(failure.status());
    if (failure->has_value()) {
      std::cerr << "error: run failed: " << **failure << "\n";
      return 2;
    }
    return 0;
  } else if (eval->parsed()) {
    status = CmdEval(eval_flags, eval_data, eval_w, eval_report, eval_ols, ridge);
  }
  if (!status.ok()) return Fail(status);
  return 0;
}

}  // namespace
}  // namespace dplr

int main(int argc, char** argv) { return dplr::Main(argc, argv); }
