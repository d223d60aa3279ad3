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


// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance                 run all criteria
//   acceptance --criterion 6   run one
//
// Exit status is 0 only if every selected criterion passed, including its
// wall-clock budget.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dplr/ambssgd/ambssgd.h"
#include "dplr/core/linalg.h"
#include "dplr/core/rng.h"
#include "dplr/core/text.h"
#include "dplr/datagen/distribution.h"
#include "dplr/dpstat/dp_stat.h"
#include "dplr/eval/risk.h"
#include "dplr/harness/config.h"
#include "dplr/harness/experiment.h"
#include "dplr/harness/sweep.h"
#include "dplr/privacy/accountant.h"
#include "dplr/ssgd/ssgd.h"
#include "test_support.h"

namespace dplr {
namespace {

using ::dplr::testing::DiagSpec;
using ::dplr::testing::HuberGradientFd;
using ::dplr::testing::L2Distance;
using ::dplr::testing::LogLogSlope;
using ::dplr::testing::Mean;
using ::dplr::testing::Spearman;
using ::dplr::testing::ValueOrDie;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Verdict()> run;
};

std::string Fmt(double v) { return absl::StrFormat("%.4g", v); }

std::string FmtList(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(Fmt(x));
  return "[" + absl::StrJoin(parts, ", ") + "]";
}

ExperimentConfig Config(const std::string& text) {
  return ValueOrDie(ParseExperimentConfig(ValueOrDie(FlatConfig::Parse(text))),
                    "config");
}

// --- 1: clipping --------------------------------------------------------------

Verdict Clipping() {
  SeededRng rng(101);
  int violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = 1 + rng.UniformIndex(10);
    Vector v(d);
    const double scale = std::exp(3.0 * rng.Gaussian());
    for (std::size_t i = 0; i < d; ++i) v[i] = scale * rng.Gaussian();
    const double zeta = std::exp(rng.Gaussian());
    const Vector c = ValueOrDie(Clip(v, zeta));
    const double cn = Norm2(c.span()), vn = Norm2(v.span());
    if (cn > zeta) ++violations;
    if (!(ValueOrDie(Clip(c, zeta)) == c)) ++violations;
    if (vn > zeta) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
          if (std::fabs(c[i] * v[j] - c[j] * v[i]) > 1e-12 * cn * vn) ++violations;
        }
        if (c[i] * v[i] < 0.0) ++violations;
      }
    } else if (!(c == v)) {
      ++violations;
    }
  }
  double worst_fd = 0.0;
  int points = 0;
  while (points < 20) {
    const std::size_t d = 2 + rng.UniformIndex(6);
    Vector x(d), w(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = rng.Gaussian();
      w[i] = rng.Gaussian();
    }
    const double y = 2.0 * rng.Gaussian();
    const double zeta = 0.2 + 3.0 * rng.Uniform01();
    const double r = Dot(x.span(), w.span()) - y;
    if (std::fabs(std::fabs(r) * Norm2(x.span()) - zeta) < 1e-3 * zeta) continue;
    Vector g(d);
    for (std::size_t i = 0; i < d; ++i) g[i] = x[i] * r;
    const Vector clipped = ValueOrDie(Clip(g, zeta));
    const std::vector<double> fd = HuberGradientFd(x.span(), y, w.span(), zeta, 1e-6);
    worst_fd = std::max(worst_fd, L2Distance(fd, clipped.span()) / Norm2(clipped.span()));
    ++points;
  }
  return {violations == 0 && worst_fd <= 1e-5,
          absl::StrFormat("property violations=%d over 2000 vectors; worst "
                          "Huber finite-difference rel. error=%s at 20 points",
                          violations, Fmt(worst_fd))};
}

// --- 2: sensitivity -----------------------------------------------------------

Verdict Sensitivity() {
  SeededRng rng(202);
  double ssgd_max = 0.0, amb_max = 0.0;
  bool within = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.UniformIndex(8);
    const double eta = 0.01 + rng.Uniform01();
    const double zeta = 0.1 + 3.0 * rng.Uniform01();
    Vector w(d), x(d), x2(d);
    for (std::size_t i = 0; i < d; ++i) {
      w[i] = rng.Gaussian();
      x[i] = 2.0 * rng.Gaussian();
      x2[i] = 2.0 * rng.Gaussian();
    }
    const double ratio =
        L2Distance(SsgdNoiselessStep(w.span(), x.span(), 3 * rng.Gaussian(), eta, zeta).span(),
                   SsgdNoiselessStep(w.span(), x2.span(), 3 * rng.Gaussian(), eta, zeta).span()) /
        (2.0 * eta * zeta);
    within &= ratio <= 1.0 + 1e-12;
    ssgd_max = std::max(ssgd_max, ratio);

    const std::size_t b = 1 + rng.UniformIndex(30);
    Dataset a(d), c(d);
    for (std::size_t i = 0; i < b; ++i) {
      std::vector<double> row(d);
      for (double& e : row) e = 2.0 * rng.Gaussian();
      const double y = 3.0 * rng.Gaussian();
      a.AppendUnchecked(row, y);
      if (i == 0) {
        for (double& e : row) e = 2.0 * rng.Gaussian();
        c.AppendUnchecked(row, 3.0 * rng.Gaussian());
      } else {
        c.AppendUnchecked(row, y);
      }
    }
    const double amb =
        L2Distance(AmbssgdNoiselessStep(w.span(), a.View(), eta, zeta).span(),
                   AmbssgdNoiselessStep(w.span(), c.View(), eta, zeta).span()) /
        (2.0 * eta * zeta / b);
    within &= amb <= 1.0 + 1e-12;
    amb_max = std::max(amb_max, amb);
  }
  // Adversarial pair: the differing samples have large, opposite gradients,
  // so both clip to norm zeta in opposite directions.
  const double w[2] = {0.0, 0.0};
  const double xp[2] = {10.0, 0.0};
  const double eta = 0.3, zeta = 1.0;
  const double adv_ssgd =
      L2Distance(SsgdNoiselessStep(w, xp, 10.0, eta, zeta).span(),
                 SsgdNoiselessStep(w, xp, -10.0, eta, zeta).span()) /
      (2 * eta * zeta);
  Dataset a(2), c(2);
  a.AppendUnchecked(xp, 10.0);
  c.AppendUnchecked(xp, -10.0);
  const double other[2] = {0.1, 0.2};
  for (int i = 0; i < 7; ++i) {
    a.AppendUnchecked(other, 0.05);
    c.AppendUnchecked(other, 0.05);
  }
  const double adv_amb =
      L2Distance(AmbssgdNoiselessStep(w, a.View(), eta, zeta).span(),
                 AmbssgdNoiselessStep(w, c.View(), eta, zeta).span()) /
      (2 * eta * zeta / 8);
  within &= adv_ssgd <= 1.0 + 1e-12 && adv_amb <= 1.0 + 1e-12;
  const bool tight = std::max(ssgd_max, adv_ssgd) >= 0.9 &&
                     std::max(amb_max, adv_amb) >= 0.9;
  return {within && tight,
          absl::StrFormat("max distance/bound over 100 random neighbours: "
                          "single-sample %s, mini-batch %s; adversarial pair "
                          "%s, %s",
                          Fmt(ssgd_max), Fmt(amb_max), Fmt(adv_ssgd), Fmt(adv_amb))};
}

// --- 3: accountant ------------------------------------------------------------

Verdict Accountant() {
  double worst = 0.0;
  bool standard_ok = true;
  for (int i = 0; i < 20; ++i) {
    const double eps = 0.05 * std::pow(10.0, 3.0 * i / 19.0);
    for (int j = 0; j < 20; ++j) {
      const double delta = std::pow(10.0, -1.0 - 11.0 * j / 19.0);
      const double a = ValueOrDie(AlphaForAmbssgd(eps, delta, AlphaForm::kTight));
      const double back = ValueOrDie(EpsFromRho(1.0 / (a * a), delta));
      worst = std::max(worst, std::fabs(back - eps) / eps);
      const double s = ValueOrDie(AlphaForAmbssgd(eps, delta));
      standard_ok &= ValueOrDie(EpsFromRho(1.0 / (s * s), delta)) <= eps * (1 + 1e-12);
    }
  }
  bool t_independent = true;
  for (double alpha : {0.5, 2.0, 10.0}) {
    const double r1 = ValueOrDie(ComposeAmbssgdRho(alpha, 1));
    for (std::int64_t t : {2, 10, 100, 100000}) {
      t_independent &= ValueOrDie(ComposeAmbssgdRho(alpha, t)) == r1;
    }
    t_independent &= std::fabs(r1 - 1.0 / (alpha * alpha)) <= 1e-15 * r1;
  }
  const double cap = SsgdEpsilonCap(1e-6, 100000);
  const absl::StatusOr<double> over = AlphaForSsgd(cap * 1.01, 1e-6, 100000);
  const bool cap_enforced = !over.ok() &&
                            over.status().code() == absl::StatusCode::kOutOfRange &&
                            AlphaForSsgd(cap * 0.99, 1e-6, 100000).ok();
  return {worst <= 1e-12 && standard_ok && t_independent && cap_enforced,
          absl::StrFormat("round-trip worst rel. error=%s on 20x20 grid; "
                          "standard form within budget=%d; T-independent=%d; "
                          "single-sample cap %s enforced=%d",
                          Fmt(worst), standard_ok, t_independent, Fmt(cap),
                          cap_enforced)};
}

// --- 4: DP-STAT ---------------------------------------------------------------

Verdict DpStatCriterion() {
  const double zero[1] = {0.0};
  const double one[1] = {1.0};
  SeededRng rng(404);
  StatConfig cfg;
  cfg.b = 16.0;
  cfg.delta_width = 0.25;
  cfg.alpha = 0.0;
  Dataset three(1);
  for (double r : {0.3, 0.9, 1.7}) three.AppendUnchecked(one, r);
  cfg.s = 3;
  const double g1 = ValueOrDie(DpStat(three.View(), zero, cfg, rng)).gamma;
  Dataset eleven(1);
  for (int i = 0; i < 11; ++i) eleven.AppendUnchecked(one, 1.0);
  cfg.s = 11;
  const double g2 = ValueOrDie(DpStat(eleven.View(), zero, cfg, rng)).gamma;
  const bool traces = g1 == 2.0 && g2 == 1.0;

  // Noisy runs: residuals of a Gaussian model at w = 0 (so |y| ~ |N(0, 2)|),
  // s = 200 samples, B = 64, default Delta = B 2^-40.
  const DistributionSpec spec = DiagSpec({1.0}, 1.0);
  StatConfig noisy;
  noisy.b = 64.0;
  noisy.s = 200;
  noisy.alpha = 2.0;
  const double beta = 0.01;
  int lower_fail = 0, upper_fail = 0, any_fail = 0;
  constexpr int kRuns = 1000;
  for (int run = 0; run < kRuns; ++run) {
    SeededRng data_rng(DeriveStreamSeed(4040, run));
    const Dataset data = ValueOrDie(Generate(spec, noisy.s, data_rng));
    SeededRng stat_rng(DeriveStreamSeed(4041, run));
    const StatResult r = ValueOrDie(DpStat(data.View(), zero, noisy, stat_rng));
    const StatUtilityReport u =
        ValueOrDie(VerifyStatUtility(r.gamma, data.View(), zero, noisy, beta));
    lower_fail += !u.lower_ok;
    upper_fail += !u.upper_ok;
    any_fail += !u.ok();
  }
  const double freq = any_fail / static_cast<double>(kRuns);
  bool charge = true;
  for (double alpha : {0.5, 2.0, 5.0}) {
    charge &= std::fabs(StatRho(alpha) - 1.0 / (2 * alpha * alpha)) <= 1e-15;
    noisy.alpha = alpha;
    charge &= std::fabs((noisy.Rounds() + 1) / (2.0 * StatNoiseVariance(noisy)) -
                        StatRho(alpha)) <= 1e-15;
  }
  return {traces && freq <= 0.05 && charge,
          absl::StrFormat("hand traces %s,%s (want 2,1); clause failure "
                          "frequency=%s over %d runs (first clause %d, second "
                          "clause %d), want <= 0.05; charge per call "
                          "1/(2 alpha^2)=%d",
                          Fmt(g1), Fmt(g2), Fmt(freq), kRuns, lower_fail,
                          upper_fail, charge)};
}

// --- 5: baseline --------------------------------------------------------------

Verdict Baseline() {
  const ExperimentConfig c =
      Config("algorithm=baseline\nspec.d=10\nspec.kappa=1\nspec.sigma=0.5\n"
             "data.n=50000\n");
  std::vector<double> risks;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    risks.push_back(ValueOrDie(RunSingle(c, seed, seed - 1)).summary.excess_risk);
  }
  const double target = 2.0 * 0.25 * 10 / 50000.0;
  const double mean = Mean(risks);
  return {mean <= 4.0 * target,
          absl::StrFormat("mean excess risk=%s over 20 seeds, limit 4 x "
                          "2 sigma^2 d/N=%s",
                          Fmt(mean), Fmt(4.0 * target))};
}

// --- 6: N scaling -------------------------------------------------------------

Verdict NScaling() {
  const std::vector<double> ns = {4000, 16000, 64000};
  std::vector<double> means, medians;
  for (double n : ns) {
    const ExperimentConfig c = Config(absl::StrFormat(
        "algorithm=ambssgd\nspec.d=10\nspec.sigma=1\nprivacy.epsilon=8\n"
        "privacy.delta=1e-6\ndata.n=%d\ntrain.batch_policy=warn\n",
        static_cast<int>(n)));
    std::vector<double> risks;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      risks.push_back(ValueOrDie(RunSingle(c, seed, seed - 1)).summary.excess_risk);
    }
    means.push_back(Mean(risks));
    medians.push_back(::dplr::testing::Median(risks));
  }
  const double slope = LogLogSlope(ns, means);
  return {slope >= -1.35 && slope <= -0.65,
          absl::StrFormat("log-log slope of mean excess risk=%s (want "
                          "[-1.35, -0.65]); means %s; medians %s; "
                          "8 sigma^2 d/N=%s",
                          Fmt(slope), FmtList(means), FmtList(medians),
                          FmtList({80.0 / 4000, 80.0 / 16000, 80.0 / 64000}))};
}

// --- 7: epsilon scaling -------------------------------------------------------

Verdict EpsScaling() {
  const std::vector<double> eps = {0.5, 1.0, 2.0, 4.0};
  std::vector<double> means;
  for (double e : eps) {
    const ExperimentConfig c = Config(absl::StrFormat(
        "algorithm=ambssgd\nspec.d=20\nspec.sigma=1\nprivacy.epsilon=%g\n"
        "data.n=8000\ntrain.batch_policy=warn\n",
        e));
    std::vector<double> risks;
    // Run index = seed - 1 at every epsilon: each seed sees the same rows.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      risks.push_back(ValueOrDie(RunSingle(c, seed, seed - 1)).summary.excess_risk);
    }
    means.push_back(Mean(risks));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < means.size(); ++i) monotone &= means[i] <= means[i - 1];
  return {monotone,
          absl::StrFormat("mean excess risk at eps %s = %s; non-increasing=%d; "
                          "Spearman=%s",
                          FmtList(eps), FmtList(means), monotone,
                          Fmt(Spearman(eps, means)))};
}

// --- 8: clipping fraction -----------------------------------------------------

Verdict ClipFraction() {
  const ExperimentConfig c = Config(
      "algorithm=ambssgd\nspec.d=10\nspec.sigma=1\ndata.n=100000\n"
      "train.batch_policy=warn\n");
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    worst = std::max(worst,
                     ValueOrDie(RunSingle(c, seed, seed - 1)).summary.clip_fraction);
  }
  return {worst <= 0.01,
          absl::StrFormat("largest clipped-gradient fraction over 20 seeds=%s "
                          "(limit 0.01)",
                          Fmt(worst))};
}

// --- 9: determinism -----------------------------------------------------------

struct Invocation {
  int exit_code = -1;
  std::string out;
};

Invocation RunCli(const std::string& args) {
  const std::string cmd = std::string(DPLR_CLI_PATH) + " " + args + " 2>/dev/null";
  Invocation result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string StripTiming(const std::string& json_text) {
  const Json j = Json::parse(json_text, nullptr, false);
  if (j.is_discarded()) return "unparseable";
  if (j.is_array()) {
    Json out = Json::array();
    for (const Json& e : j) out.push_back(WithoutTiming(e));
    return out.dump();
  }
  return WithoutTiming(j).dump();
}

// runs.csv: drop wallclock_ms (third column from the end).
std::string StripRunsWallclock(const std::string& csv) {
  std::string out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t end = csv.find('\n', pos);
    std::string line = csv.substr(pos, end - pos);
    pos = end == std::string::npos ? csv.size() : end + 1;
    const std::size_t c2 = line.rfind(',');
    const std::size_t c1 = line.rfind(',', c2 - 1);
    const std::size_t c0 = line.rfind(',', c1 - 1);
    out += line.substr(0, c0) + line.substr(c1) + "\n";
  }
  return out;
}

Verdict Determinism() {
  std::vector<std::string> mismatches;
  const std::string base = " --seed 11,12 --format json --set run.trace=true"
                           " --set data.n_test=1000";
  for (const std::string algo : {"ssgd", "ambssgd", "baseline", "ols"}) {
    std::string args = "train --set algorithm=" + algo + base;
    if (algo == "ssgd") args += " --set privacy.epsilon=0.01 --set data.n=20000";
    if (algo != "ssgd") args += " --set train.batch_policy=warn --set data.n=40000";
    const Invocation a = RunCli(args), b = RunCli(args);
    if (a.exit_code != 0 || b.exit_code != 0 ||
        StripTiming(a.out) != StripTiming(b.out)) {
      mismatches.push_back(algo);
    }
  }
  const std::string dir =
      (std::filesystem::temp_directory_path() / "dplr_acceptance_sweep").string();
  std::string runs[2];
  for (int k = 0; k < 2; ++k) {
    std::filesystem::remove_all(dir);
    const Invocation s = RunCli(
        "sweep --set algorithm=ambssgd --set train.batch_policy=warn "
        "--set sweep.N=4000,8000 --set sweep.epsilon=1,4 --seed 1,2,3 "
        "--jobs 3 --out " + dir);
    if (s.exit_code != 0) mismatches.push_back("sweep exit");
    runs[k] = StripRunsWallclock(ReadFile(dir + "/runs.csv").value_or("")) +
              ReadFile(dir + "/aggregate.csv").value_or("");
  }
  std::filesystem::remove_all(dir);
  if (runs[0].empty() || runs[0] != runs[1]) mismatches.push_back("sweep");
  return {mismatches.empty(),
          mismatches.empty()
              ? "train (ssgd, ambssgd, baseline, ols) and sweep outputs "
                "identical across two invocations apart from timing"
              : "mismatch: " + absl::StrJoin(mismatches, ", ")};
}

// --- 10: throughput -----------------------------------------------------------

Verdict Throughput() {
  struct Point {
    std::size_t n, d;
    double seconds = 0.0;
  };
  std::vector<Point> points = {{10000, 10}, {100000, 10}, {10000, 100}};
  for (Point& p : points) {
    const DistributionSpec spec = DiagSpec(std::vector<double>(p.d, 1.0), 1.0);
    SeededRng gen(1000 + p.n + p.d);
    const Dataset data = ValueOrDie(Generate(spec, p.n, gen));
    AmbssgdDerivationOptions opt;
    opt.batch_policy = BatchConditionPolicy::kWarn;
    const AmbssgdConfig cfg =
        ValueOrDie(DeriveAmbssgdHyperparams(spec, p.n, 1.0, 1e-6, opt)).config;
    // Best of several repetitions, each long enough to time reliably.
    double best = INFINITY;
    for (int rep = 0; rep < 7; ++rep) {
      const int inner = static_cast<int>(std::max<std::size_t>(1, 2000000 / (p.n * p.d)));
      const auto start = std::chrono::steady_clock::now();
      for (int k = 0; k < inner; ++k) {
        SeededRng rng(rep * 100 + k);
        ValueOrDie(AmbssgdTrain(data, cfg, rng));
      }
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      best = std::min(best, dt.count() / inner);
    }
    p.seconds = best;
  }
  std::vector<double> per_unit;
  for (const Point& p : points) per_unit.push_back(p.seconds / (p.n * p.d));
  const double ratio = *std::max_element(per_unit.begin(), per_unit.end()) /
                       *std::min_element(per_unit.begin(), per_unit.end());
  return {ratio <= 2.0,
          absl::StrFormat("seconds per (N d): %s at (1e4,10), (1e5,10), "
                          "(1e4,100); max/min=%s (limit 2)",
                          FmtList(per_unit), Fmt(ratio))};
}

}  // namespace
}  // namespace dplr

int main(int argc, char** argv) {
  using namespace dplr;
  CLI::App app{"dplr acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "clipping operator suite", 1, Clipping},
      {2, "sensitivity invariants", 5, Sensitivity},
      {3, "privacy accountant", 1, Accountant},
      {4, "DP-STAT traces, utility and charge", 10, DpStatCriterion},
      {5, "non-private baseline risk", 60, Baseline},
      {6, "N-scaling slope", 300, NScaling},
      {7, "epsilon-scaling monotonicity", 300, EpsScaling},
      {8, "no-clipping event", 120, ClipFraction},
      {9, "determinism", 60, Determinism},
      {10, "throughput linear in N d", 120, Throughput},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = c.run();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    const bool in_budget = dt.count() < c.budget_s;
    const bool pass = v.pass && in_budget;
    all &= pass;
    std::cout << absl::StrFormat("AC%d %s %s: %s [%.2fs, budget %.0fs%s]\n", c.id,
                                 pass ? "PASS" : "FAIL", c.title, v.detail,
                                 dt.count(), c.budget_s,
                                 in_budget ? "" : ", OVER BUDGET");
    std::cout.flush();
  }
  return all ? 0 : 1;
}
