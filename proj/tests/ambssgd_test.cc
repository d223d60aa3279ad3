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


#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "dplr/ambssgd/ambssgd.h"
#include "dplr/core/rng.h"
#include "dplr/datagen/distribution.h"
#include "dplr/eval/risk.h"
#include "dplr/ssgd/ssgd.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace dplr {
namespace {

using ::dplr::testing::ConstantRows;
using ::dplr::testing::DiagSpec;
using ::dplr::testing::L2Distance;
using ::dplr::testing::Median;
using ::dplr::testing::ValueOrDie;

AmbssgdConfig SmallConfig() {
  AmbssgdConfig cfg;
  cfg.eta = 1.0;
  cfg.b = 5;
  cfg.s = 1;
  cfg.T = 4;
  cfg.domain_size = 16.0;
  cfg.rx = 1.0;
  return cfg;
}

TEST(AmbssgdTrainTest, OneStepSolve) {
  const Dataset data = ConstantRows(24, 1.0, 1.0);
  const DistributionSpec spec = [] {
    DistributionSpec s = DiagSpec({1.0}, 0.0);
    s.w_star = Vector{1.0};
    return s;
  }();
  std::vector<double> iterates;
  AmbssgdOptions options;
  options.on_iterate = [&](std::size_t, std::span<const double> w) {
    iterates.push_back(w[0]);
  };
  SeededRng rng(1);
  const AmbssgdResult r =
      ValueOrDie(AmbssgdTrain(data, SmallConfig(), rng, options));
  ASSERT_EQ(iterates.size(), 4u);
  for (double w : iterates) EXPECT_EQ(w, 1.0);
  EXPECT_EQ(ValueOrDie(ExcessRisk(r.w_bar.span(), spec)), 0.0);
  EXPECT_EQ(r.trace.total_clipped, 0u);
  EXPECT_EQ(r.trace.tail_length, 2u);
}

TEST(AmbssgdTrainTest, SlicesAreDisjointAndOnePass) {
  const DistributionSpec spec = DiagSpec({1.0, 2.0}, 1.0);
  SeededRng gen(2);
  const Dataset data = ValueOrDie(Generate(spec, 1003, gen));
  AmbssgdConfig cfg = SmallConfig();
  cfg.eta = 0.1;
  cfg.b = 90;
  cfg.s = 9;
  cfg.T = 10;
  cfg.alpha = 1.0;
  cfg.domain_size = 50.0;
  std::vector<std::vector<std::size_t>> stat(cfg.T), batch(cfg.T);
  AmbssgdOptions options;
  std::size_t last_t = 0;
  options.on_sample_access = [&](std::size_t t, SampleRole role, std::size_t row) {
    EXPECT_GE(t, last_t);
    last_t = t;
    (role == SampleRole::kStat ? stat : batch)[t].push_back(row);
  };
  SeededRng rng(3);
  const AmbssgdResult r = ValueOrDie(AmbssgdTrain(data, cfg, rng, options));
  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (std::size_t t = 0; t < cfg.T; ++t) {
    EXPECT_EQ(stat[t].size(), cfg.s);
    EXPECT_EQ(batch[t].size(), cfg.b);
    for (const auto* rows : {&stat[t], &batch[t]}) {
      seen.insert(rows->begin(), rows->end());
      total += rows->size();
    }
  }
  EXPECT_EQ(total, cfg.T * (cfg.b + cfg.s));
  EXPECT_EQ(seen.size(), total);
  EXPECT_LT(*seen.rbegin(), data.size());
  EXPECT_EQ(r.trace.dropped_samples, 13u);
}

TEST(AmbssgdTrainTest, LedgerMatchesParallelComposition) {
  const DistributionSpec spec = DiagSpec({1.0, 1.0, 1.0}, 1.0);
  SeededRng gen(4);
  const Dataset data = ValueOrDie(Generate(spec, 2000, gen));
  AmbssgdConfig cfg = SmallConfig();
  cfg.eta = 0.5;
  cfg.b = 180;
  cfg.s = 18;
  cfg.T = 10;
  cfg.alpha = 2.5;
  cfg.domain_size = 40.0;
  SeededRng rng(5);
  const AmbssgdResult r = ValueOrDie(AmbssgdTrain(data, cfg, rng));
  EXPECT_EQ(r.ledger.partition_count(), cfg.T);
  EXPECT_EQ(r.ledger.charges().size(), 2 * cfg.T);
  for (const ZcdpLedger::Charge& c : r.ledger.charges()) {
    EXPECT_NEAR(c.rho, 1.0 / (2 * 2.5 * 2.5), 1e-15) << c.mechanism;
  }
  EXPECT_NEAR(r.ledger.TotalRho(), ValueOrDie(ComposeAmbssgdRho(2.5, 10)), 1e-15);
}

TEST(AmbssgdTrainTest, InjectedNoiseScale) {
  Dataset data(1);
  const double zero[1] = {0.0};
  for (int i = 0; i < 20000 * 11; ++i) data.AppendUnchecked(zero, 0.0);
  AmbssgdConfig cfg = SmallConfig();
  cfg.eta = 0.5;
  cfg.b = 10;
  cfg.s = 1;
  cfg.T = 20000;
  cfg.alpha = 2.0;
  cfg.fixed_zeta = 1.5;
  double prev = 0.0, s2 = 0.0;
  AmbssgdOptions options;
  options.on_iterate = [&](std::size_t, std::span<const double> w) {
    s2 += (w[0] - prev) * (w[0] - prev);
    prev = w[0];
  };
  SeededRng rng(6);
  const AmbssgdResult r = ValueOrDie(AmbssgdTrain(data, cfg, rng, options));
  const double expected = std::pow(0.5 * 2.0 * 1.5 * 2.0 / 10.0, 2);
  EXPECT_NEAR(s2 / cfg.T, expected, 4.0 * expected * std::sqrt(2.0 / cfg.T));
  EXPECT_TRUE(std::isnan(r.trace.iterations[0].gamma));
  EXPECT_EQ(r.trace.iterations[0].zeta, 1.5);
}

TEST(AmbssgdTrainTest, BaselinePathEquivalence) {
  const DistributionSpec spec = DiagSpec({3.0, 1.0, 0.5}, 0.8);
  SeededRng gen(7);
  const Dataset data = ValueOrDie(Generate(spec, 5000, gen));
  AmbssgdDerivation d = ValueOrDie(DeriveBaselineConfig(spec, 5000));
  EXPECT_EQ(d.config.alpha, 0.0);
  ASSERT_TRUE(d.config.fixed_zeta.has_value());
  EXPECT_EQ(*d.config.fixed_zeta, kNoClip);
  SeededRng a(8), b(8);
  const AmbssgdResult base = ValueOrDie(NonprivateBaselineTrain(data, d.config, a));
  const AmbssgdResult full = ValueOrDie(AmbssgdTrain(data, d.config, b));
  EXPECT_EQ(base.w_bar, full.w_bar);
  EXPECT_EQ(base.ledger.TotalRho(), 0.0);
  EXPECT_EQ(full.ledger.TotalRho(), 0.0);
}

TEST(AmbssgdTrainTest, BaselineFixedPoint) {
  const DistributionSpec spec = DiagSpec({2.0, 1.0}, 0.0);
  SeededRng gen(9);
  const Dataset data = ValueOrDie(Generate(spec, 3000, gen));
  const AmbssgdDerivation d = ValueOrDie(DeriveBaselineConfig(spec, 3000));
  AmbssgdOptions options;
  options.initial_w = spec.w_star;
  SeededRng rng(10);
  const AmbssgdResult r =
      ValueOrDie(NonprivateBaselineTrain(data, d.config, rng, options));
  EXPECT_EQ(r.w_bar, spec.w_star);
}

TEST(AmbssgdTrainTest, Deterministic) {
  const DistributionSpec spec = DiagSpec(std::vector<double>(4, 1.0), 1.0);
  SeededRng gen(11);
  const Dataset data = ValueOrDie(Generate(spec, 20000, gen));
  AmbssgdDerivationOptions opt;
  opt.batch_policy = BatchConditionPolicy::kWarn;
  const AmbssgdDerivation d =
      ValueOrDie(DeriveAmbssgdHyperparams(spec, 20000, 2.0, 1e-6, opt));
  SeededRng a(12), b(12);
  const AmbssgdResult ra = ValueOrDie(AmbssgdTrain(data, d.config, a));
  const AmbssgdResult rb = ValueOrDie(AmbssgdTrain(data, d.config, b));
  EXPECT_EQ(ra.w_bar, rb.w_bar);
  ASSERT_EQ(ra.trace.iterations.size(), rb.trace.iterations.size());
  for (std::size_t t = 0; t < ra.trace.iterations.size(); ++t) {
    EXPECT_EQ(ra.trace.iterations[t].gamma, rb.trace.iterations[t].gamma);
    EXPECT_EQ(ra.trace.iterations[t].clip_count, rb.trace.iterations[t].clip_count);
  }
}

TEST(AmbssgdTrainTest, ThresholdContractsOnNoiselessData) {
  const DistributionSpec spec = DiagSpec(std::vector<double>(5, 1.0), 0.0);
  const std::size_t n = 20000;
  AmbssgdDerivationOptions opt;
  opt.batch_policy = BatchConditionPolicy::kWarn;
  opt.domain_size = 100.0;
  AmbssgdConfig cfg =
      ValueOrDie(DeriveAmbssgdHyperparams(spec, n, 1.0, 1e-6, opt)).config;
  cfg.alpha = 0.0;
  cfg.eta *= 0.5;  // slow enough that the contraction spans several iterations
  std::vector<std::vector<double>> gammas(cfg.T);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SeededRng gen(seed);
    const Dataset data = ValueOrDie(Generate(spec, n, gen));
    SeededRng rng(seed + 1000);
    const AmbssgdResult r = ValueOrDie(AmbssgdTrain(data, cfg, rng));
    for (std::size_t t = 0; t < cfg.T; ++t) {
      gammas[t].push_back(r.trace.iterations[t].gamma);
    }
  }
  for (std::size_t t = cfg.T / 2 + 1; t < cfg.T; ++t) {
    EXPECT_LE(Median(gammas[t]), Median(gammas[t - 1])) << "t=" << t;
  }
  EXPECT_LT(Median(gammas[cfg.T - 1]), Median(gammas[0]));
}

TEST(AmbssgdTrainTest, Errors) {
  SeededRng rng(1);
  AmbssgdConfig cfg = SmallConfig();
  EXPECT_FALSE(AmbssgdTrain(ConstantRows(23, 1.0, 1.0), cfg, rng).ok());
  cfg.s = 0;
  EXPECT_FALSE(AmbssgdTrain(ConstantRows(24, 1.0, 1.0), cfg, rng).ok());
  cfg = SmallConfig();
  cfg.eta = 1e3;
  cfg.fixed_zeta = kNoClip;
  cfg.T = 400;
  const absl::StatusOr<AmbssgdResult> blown =
      AmbssgdTrain(ConstantRows(2400, 1e3, 1.0), cfg, rng);
  ASSERT_FALSE(blown.ok());
  EXPECT_NE(blown.status().message().find("iteration"), std::string::npos);
}

TEST(AmbssgdSensitivityTest, NeighboringBatchesWithinBound) {
  SeededRng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.UniformIndex(5);
    const std::size_t b = 1 + rng.UniformIndex(20);
    Dataset a(d), c(d);
    for (std::size_t i = 0; i < b; ++i) {
      std::vector<double> x(d);
      for (double& e : x) e = 2.0 * rng.Gaussian();
      const double y = 3.0 * rng.Gaussian();
      a.AppendUnchecked(x, y);
      if (i == 0) {
        for (double& e : x) e = 2.0 * rng.Gaussian();
        c.AppendUnchecked(x, 3.0 * rng.Gaussian());
      } else {
        c.AppendUnchecked(x, y);
      }
    }
    Vector w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = rng.Gaussian();
    const double eta = 0.05 + rng.Uniform01();
    const double zeta = 0.1 + 3.0 * rng.Uniform01();
    const Vector ua = AmbssgdNoiselessStep(w.span(), a.View(), eta, zeta);
    const Vector uc = AmbssgdNoiselessStep(w.span(), c.View(), eta, zeta);
    EXPECT_LE(L2Distance(ua.span(), uc.span()), 2.0 * eta * zeta / b * (1 + 1e-12));
  }
}

TEST(DeriveAmbssgdTest, GoldenConfig) {
  // d=10, H=diag(4,1,...,1), w*=1/sqrt(10), sigma=1, K2=2, N=1e5, eps=1,
  // delta=1e-6. Values evaluated independently in double precision.
  std::vector<double> eig(10, 1.0);
  eig[0] = 4.0;
  const DistributionSpec spec = DiagSpec(eig, 1.0);
  const absl::StatusOr<AmbssgdDerivation> strict =
      DeriveAmbssgdHyperparams(spec, 100000, 1.0, 1e-6);
  ASSERT_FALSE(strict.ok());
  EXPECT_EQ(strict.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_NE(strict.status().message().find("3.90819e+06 < 3.83115e+08"),
            std::string::npos)
      << strict.status();

  AmbssgdDerivationOptions opt;
  opt.batch_policy = BatchConditionPolicy::kWarn;
  const AmbssgdDerivation d =
      ValueOrDie(DeriveAmbssgdHyperparams(spec, 100000, 1.0, 1e-6, opt));
  EXPECT_EQ(d.config.T, 46u);
  EXPECT_EQ(d.config.b, 1976u);
  EXPECT_EQ(d.config.s, 197u);
  EXPECT_NEAR(d.config.eta, 0.24946345158439592, 1e-14);
  EXPECT_NEAR(d.config.domain_size, 225.8263987840841, 1e-11);
  EXPECT_NEAR(d.config.Stat().EffectiveDelta(), 2.0538791321458492e-10, 1e-22);
  EXPECT_NEAR(d.config.alpha, 10.513043539513864, 1e-12);
  EXPECT_NEAR(d.config.rx, std::sqrt(21.0), 1e-14);
  EXPECT_NEAR(d.batch_condition_lhs, 3908185.181474481, 1e-6);
  EXPECT_NEAR(d.batch_condition_rhs, 383114959.7591331, 1e-4);
  EXPECT_FALSE(d.batch_condition_ok);
  EXPECT_TRUE(d.domain_oracle_assisted);
  EXPECT_EQ(d.config.T * (d.config.b + d.config.s), 99958u);
}

TEST(DeriveAmbssgdTest, AlphaFormSelection) {
  AmbssgdDerivationOptions opt;
  opt.batch_policy = BatchConditionPolicy::kWarn;
  const DistributionSpec spec = DiagSpec({1.0, 1.0}, 1.0);
  const AmbssgdDerivation hi =
      ValueOrDie(DeriveAmbssgdHyperparams(spec, 50000, 20.0, 1e-6, opt));
  EXPECT_NEAR(hi.config.alpha, ValueOrDie(AlphaForAmbssgd(20.0, 1e-6)), 1e-15);
  EXPECT_TRUE(std::any_of(hi.warnings.begin(), hi.warnings.end(),
                          [](const std::string& w) {
                            return w.find("ln(1/delta)") != std::string::npos;
                          }));
  const AmbssgdDerivation lo =
      ValueOrDie(DeriveAmbssgdHyperparams(spec, 50000, 2.0, 1e-6, opt));
  EXPECT_NEAR(lo.config.alpha, std::sqrt(8.0 * std::log(1e6)) / 2.0, 1e-14);
}

TEST(DeriveAmbssgdTest, UserDomainSizeAndInfeasibleSplit) {
  AmbssgdDerivationOptions opt;
  opt.batch_policy = BatchConditionPolicy::kWarn;
  opt.domain_size = 7.0;
  const DistributionSpec spec = DiagSpec({1.0}, 1.0);
  const AmbssgdDerivation d =
      ValueOrDie(DeriveAmbssgdHyperparams(spec, 10000, 1.0, 1e-6, opt));
  EXPECT_EQ(d.config.domain_size, 7.0);
  EXPECT_FALSE(d.domain_oracle_assisted);
  // N/T = 1 leaves no stat slice.
  EXPECT_FALSE(DeriveAmbssgdHyperparams(spec, 3, 1.0, 1e-6, opt).ok());
}

TEST(AmbssgdIsotropicPresetTest, Preset) {
  const DistributionSpec spec = DiagSpec(std::vector<double>(8, 1.0), 1.0);
  const AmbssgdConfig cfg =
      ValueOrDie(AmbssgdIsotropicPreset(spec, 100000, 1.0, 1e-6));
  EXPECT_EQ(cfg.eta, 1.0 / 32.0);
  EXPECT_NEAR(cfg.alpha, std::sqrt(8.0 * std::log(1e6)), 1e-14);
  EXPECT_NEAR(cfg.rx, std::sqrt(8.0), 1e-15);
}

}  // namespace
}  // namespace dplr
