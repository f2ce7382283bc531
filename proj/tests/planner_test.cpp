/* Copyright 2026 The TeraSched Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "terasched/error.hpp"
#include "terasched/planner.hpp"
#include "terasched/simulator.hpp"

namespace terasched {
namespace {

using testing::BruteForceLatency;
using testing::RandomModel;
using testing::TabulatedModel;

PlanConfig Config(int stages, std::int64_t seq_len, std::int64_t g,
                  double epsilon) {
  PlanConfig cfg;
  cfg.stages = stages;
  cfg.seq_len = seq_len;
  cfg.granularity = g;
  cfg.epsilon = epsilon;
  return cfg;
}

// Per-result invariants every PlanResult must satisfy.
void CheckPlan(const CostModel& model, const PlanConfig& cfg,
               const PlanResult& plan) {
  CHECK_NOTHROW(ValidateScheme(plan.scheme, cfg.seq_len, cfg.granularity));
  REQUIRE(plan.per_slice_ms.size() == plan.scheme.size());
  std::int64_t ctx = 0;
  double total = 0.0, slowest = 0.0;
  for (std::size_t i = 0; i < plan.scheme.size(); ++i) {
    const double t = Eval(model, plan.scheme.lengths[i], ctx, cfg.mode);
    CHECK(plan.per_slice_ms[i] == t);
    CHECK(t <= plan.t_max_ms + 1e-9);
    total += t;
    slowest = std::max(slowest, t);
    ctx += plan.scheme.lengths[i];
  }
  CHECK(std::abs(plan.predicted_ms - (total + (cfg.stages - 1) * slowest)) <=
        1e-9);
  CHECK(std::abs(Simulate(plan.per_slice_ms, cfg.stages).makespan_ms -
                 plan.predicted_ms) <= 1e-9);
}

TEST_CASE("constant model: the single slice minimizes the total") {
  const CostModel m = TabulatedModel(8, 64, [](auto) { return 2.0; });
  const PlanConfig cfg = Config(4, 64, 8, 0.1);
  const auto r = DpFixedTmax(m, cfg, 2.0);
  REQUIRE(r);
  CHECK(r->scheme == SlicingScheme{{64}});
  CHECK(r->total_ms == 2.0);
  CHECK_FALSE(DpFixedTmax(m, cfg, 1.5));
}

TEST_CASE("length-proportional model with a unit cap forces unit slices") {
  const CostModel m = TabulatedModel(1, 3, [](auto l) { return double(l); });
  const auto r = DpFixedTmax(m, Config(2, 3, 1, 0.0), 1.0);
  REQUIRE(r);
  CHECK(r->scheme == SlicingScheme{{1, 1, 1}});
  CHECK(r->total_ms == 3.0);
}

TEST_CASE("dp_fixed_tmax input validation") {
  const CostModel m = TabulatedModel(8, 64, [](auto) { return 2.0; });
  CHECK_THROWS_AS(DpFixedTmax(m, Config(2, 64, 8, 0.1), 0.0), Error);
  CHECK_THROWS_AS(DpFixedTmax(m, Config(2, 128, 8, 0.1), 5.0), Error);
  CHECK_THROWS_AS(DpFixedTmax(m, Config(2, 60, 8, 0.1), 5.0), Error);
  CHECK_THROWS_AS(DpFixedTmax(m, Config(0, 64, 8, 0.1), 5.0), Error);
  CHECK_THROWS_AS(DpFixedTmax(m, Config(2, 64, 4, 0.1), 5.0), Error);
  CHECK_THROWS_AS(DpFixedTmax(m, Config(2, 64, 8, -1.0), 5.0), Error);
}

TEST_CASE("ties in the DP take the shortest final slice") {
  // Every slice costs 1 regardless of length, so [L] wins; with a cap that
  // admits only length-1 and length-2 slices at cost 1 each, [1, 2] and
  // [2, 1] tie at 2 and the shorter final slice is kept.
  BaseTimeTable base{{1, 1.0}, {2, 1.0}, {3, 5.0}};
  const CostModel m(1, base, {});
  const auto r = DpFixedTmax(m, Config(1, 3, 1, 0.0), 1.0);
  REQUIRE(r);
  CHECK(r->scheme == SlicingScheme{{2, 1}});
}

TEST_CASE("single stage plans a single slice on a constant model") {
  const CostModel m = TabulatedModel(8, 256, [](auto) { return 3.0; });
  const PlanConfig cfg = Config(1, 256, 8, 0.1);
  const PlanResult r = Optimize(m, cfg);
  CHECK(r.scheme == SlicingScheme{{256}});
  CHECK(r.predicted_ms == 3.0);
  CheckPlan(m, cfg, r);
}

TEST_CASE("three tokens, t = l, two stages") {
  const CostModel m = TabulatedModel(1, 3, [](auto l) { return double(l); });
  const PlanConfig cfg = Config(2, 3, 1, 0.0);
  // Compositions: [3] -> 6, [1,2] / [2,1] -> 5, [1,1,1] -> 4.
  CHECK(BruteForceLatency(m, 2, Mode::kForward, 3) == 4.0);
  const PlanResult r = Optimize(m, cfg);
  CHECK(r.scheme == SlicingScheme{{1, 1, 1}});
  CHECK(r.predicted_ms == 4.0);
  CheckPlan(m, cfg, r);
}

TEST_CASE("three tokens, t = 1 + l, three stages") {
  const CostModel m = TabulatedModel(1, 3, [](auto l) { return 1.0 + l; });
  const PlanConfig cfg = Config(3, 3, 1, 0.0);
  // [3] -> 12, [1,2] / [2,1] -> 11, [1,1,1] -> 10.
  CHECK(BruteForceLatency(m, 3, Mode::kForward, 3) == 10.0);
  const PlanResult r = Optimize(m, cfg);
  CHECK(r.scheme == SlicingScheme{{1, 1, 1}});
  CHECK(r.predicted_ms == 10.0);
}

TEST_CASE("brute force on one unit and on oversized instances") {
  const CostModel m = TabulatedModel(8, 8, [](auto) { return 1.5; });
  const PlanResult r = BruteForceOptimal(m, Config(3, 8, 8, 0.0));
  CHECK(r.scheme == SlicingScheme{{8}});
  CHECK(r.predicted_ms == 4.5);
  const CostModel big = TabulatedModel(1, 23, [](auto) { return 1.0; });
  CHECK_THROWS_AS(BruteForceOptimal(big, Config(2, 23, 1, 0.0)), Error);
}

TEST_CASE("brute force matches the independent composition oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const std::int64_t L = 1 + trial % 10;
    const CostModel m = RandomModel(rng, L);
    for (int k = 1; k <= 4; ++k) {
      const PlanResult r = BruteForceOptimal(m, Config(k, L, 1, 0.0));
      CHECK(std::abs(r.predicted_ms -
                     BruteForceLatency(m, k, Mode::kForward, L)) <= 1e-9);
    }
  }
}

TEST_CASE("optimize equals brute force at epsilon zero") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<std::int64_t> len(1, 12);
  std::uniform_int_distribution<int> stages(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const std::int64_t L = len(rng);
    const CostModel m = RandomModel(rng, L);
    PlanConfig cfg = Config(stages(rng), L, 1, 0.0);
    cfg.mode = trial % 2 ? Mode::kForwardBackward : Mode::kForward;
    const PlanResult opt = Optimize(m, cfg);
    const PlanResult brute = BruteForceOptimal(m, cfg);
    CHECK(std::abs(opt.predicted_ms - brute.predicted_ms) <= 1e-9);
    CheckPlan(m, cfg, opt);
    CheckPlan(m, cfg, brute);
  }
}

TEST_CASE("pruning never changes the result") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::int64_t L = 8 + trial;
    const CostModel m = RandomModel(rng, L);
    for (double eps : {0.0, 0.1}) {
      const PlanConfig cfg = Config(1 + trial % 6, L, 1, eps);
      const PlanResult pruned = Optimize(m, cfg, {.prune = true});
      const PlanResult full = Optimize(m, cfg, {.prune = false});
      CHECK(pruned.predicted_ms == full.predicted_ms);
    }
  }
}

TEST_CASE("epsilon thinning stays within K * epsilon") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const std::int64_t L = 10 + trial;
    const CostModel m = RandomModel(rng, L);
    const int k = 1 + trial % 5;
    const double exact = Optimize(m, Config(k, L, 1, 0.0)).predicted_ms;
    for (double eps : {0.05, 0.1, 0.5}) {
      const PlanConfig cfg = Config(k, L, 1, eps);
      const PlanResult r = Optimize(m, cfg);
      CHECK(r.predicted_ms <= exact + k * eps + 1e-9);
      CHECK(r.predicted_ms >= exact - 1e-9);
      CheckPlan(m, cfg, r);
    }
  }
}

TEST_CASE("thinning covers a skipped optimum through the cluster cap") {
  // t(1,0)=1, t(1,1)=1.05, t(2,0)=1.9. Optimum [1,1]: 2.05 + 1.05 = 3.1.
  // [2] costs 3.8. With epsilon 0.1 the candidates 1 and 1.05 share a
  // cluster; solving only at 1 and then 1.9 would return [2].
  BaseTimeTable base{{1, 1.0}, {2, 1.9}};
  const CostModel m(1, base, ContextCoeffs{0, 0, 0.05, 0});
  const PlanResult r = Optimize(m, Config(2, 2, 1, 0.1));
  CHECK(r.scheme == SlicingScheme{{1, 1}});
  CHECK(r.predicted_ms == doctest::Approx(3.1));
}

TEST_CASE("candidate thinning keeps the first value of each cluster") {
  const std::vector<double> v{1.0, 1.05, 1.2, 1.25, 1.29, 1.5};
  const auto clusters = ThinCandidates(v, 0.1);
  REQUIRE(clusters.size() == 3);
  CHECK(clusters[0].floor_ms == 1.0);
  CHECK(clusters[0].cap_ms == 1.05);
  CHECK(clusters[1].floor_ms == 1.2);
  CHECK(clusters[1].cap_ms == 1.29);
  CHECK(clusters[2].floor_ms == 1.5);
  CHECK(clusters[2].cap_ms == 1.5);
  for (std::size_t i = 1; i < clusters.size(); ++i) {
    CHECK(clusters[i].floor_ms >= clusters[i - 1].floor_ms + 0.1);
  }
  CHECK(ThinCandidates(v, 0.0).size() == v.size());
}

TEST_CASE("candidates are the sorted distinct grid values") {
  const CostModel m = TabulatedModel(1, 4, [](auto l) { return double(l); },
                                     ContextCoeffs{0, 0, 1, 0});
  // t(i, j) = i + j for i + j <= 4, i >= 1.
  const auto c = TmaxCandidates(LatencyGrid(m, 4, Mode::kForward));
  CHECK(c == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("the optimized plan dominates every uniform split") {
  SynthParams p;
  p.ctx = {0.1, 0.001, 0.002, 1e-5};
  p.max_len = 512;
  const CostModel m = SynthGpuModel(p);
  for (int k : {1, 4, 16}) {
    const PlanConfig cfg = Config(k, 512, 8, 0.0);
    const PlanResult dp = Optimize(m, cfg);
    CheckPlan(m, cfg, dp);
    for (std::int64_t d : {1, 2, 4, 8, 16, 32, 64}) {
      const PlanResult u = EvaluateScheme(m, cfg, UniformScheme(512, d, 8));
      CHECK(dp.predicted_ms <= u.predicted_ms + 1e-9);
    }
  }
}

TEST_CASE("threaded candidate evaluation is bitwise identical") {
  SynthParams p;
  p.ctx = {0.1, 0.001, 0.002, 1e-5};
  p.max_len = 1024;
  const CostModel m = SynthGpuModel(p);
  for (double eps : {0.0, 0.1}) {
    const PlanConfig cfg = Config(24, 1024, 8, eps);
    const PlanResult one = Optimize(m, cfg, {.threads = 1});
    const PlanResult many = Optimize(m, cfg, {.threads = 4});
    CHECK(one.scheme == many.scheme);
    CHECK(one.predicted_ms == many.predicted_ms);
    CHECK(one.t_max_ms == many.t_max_ms);
  }
}

TEST_CASE("evaluating a given scheme") {
  const CostModel m = TabulatedModel(1, 3, [](auto l) { return double(l); });
  const PlanConfig cfg = Config(2, 3, 1, 0.0);
  const PlanResult r = EvaluateScheme(m, cfg, SlicingScheme{{1, 2}});
  CHECK(r.per_slice_ms == std::vector<double>{1, 2});
  CHECK(r.t_max_ms == 2.0);
  CHECK(r.predicted_ms == 5.0);
  CHECK_THROWS_AS(EvaluateScheme(m, cfg, SlicingScheme{{1, 1}}), Error);
}

}  // namespace
}  // namespace terasched
