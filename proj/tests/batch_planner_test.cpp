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

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "terasched/batch_planner.hpp"
#include "terasched/error.hpp"

namespace terasched {
namespace {

using testing::BrutePartitionCost;

CostModel SmallModel() {
  SynthParams p;
  p.flat_until = 32;
  p.ctx = {0.1, 0.001, 0.002, 1e-4};
  p.max_len = 128;
  return SynthGpuModel(p);
}

PlanConfig SmallConfig() {
  PlanConfig cfg;
  cfg.stages = 4;
  cfg.seq_len = 128;
  cfg.granularity = 8;
  cfg.epsilon = 0.0;
  return cfg;
}

TEST_CASE("batch cost model scaling") {
  const CostModel m = SmallModel();
  CHECK(BatchCostModel(m, 1) == m);
  const CostModel two = BatchCostModel(m, 2);
  for (std::int64_t i = 8; i <= 128; i += 24) {
    for (std::int64_t j = 0; i + j <= 128; j += 16) {
      CHECK(Eval(two, i, j) == 2.0 * Eval(m, i, j));
    }
  }
  const BatchFactorTable table{{1, 1.0}, {2, 1.4}};
  CHECK(BatchCostModel(m, 1, table) == m);
  const CostModel measured = BatchCostModel(m, 2, table);
  CHECK(Eval(measured, 16, 32) ==
        doctest::Approx(1.4 * Eval(m, 16, 32)).epsilon(1e-12));
  CHECK_THROWS_AS(BatchCostModel(m, 3, table), Error);
  CHECK_THROWS_AS(BatchCostModel(m, 0), Error);
}

TEST_CASE("knapsack: one slice of two beats two slices of one") {
  const std::vector<double> costs{5.0, 8.0};
  // Partitions of 2: [2] -> 8, [1,1] -> 10.
  CHECK(BrutePartitionCost(costs, 2) == 8.0);
  const BatchPartition p = SolveBatchKnapsack(costs, 2);
  CHECK(p.slices == std::vector<std::int64_t>{2});
  CHECK(p.total_ms == 8.0);
}

TEST_CASE("knapsack matches brute-force partitions") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> cost(0.5, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t batch = 1 + trial % 8;
    std::vector<double> costs(batch);
    for (double& c : costs) c = cost(rng);
    const BatchPartition p = SolveBatchKnapsack(costs, batch);
    std::int64_t covered = 0;
    double total = 0.0;
    for (auto b : p.slices) {
      CHECK(b >= 1);
      covered += b;
      total += costs[b - 1];
    }
    CHECK(covered == batch);
    CHECK(std::abs(total - p.total_ms) <= 1e-9);
    CHECK(std::abs(p.total_ms - BrutePartitionCost(costs, batch)) <= 1e-9);
  }
}

TEST_CASE("linear costs tie everywhere and resolve to all ones") {
  for (double t1 : {0.1, 1.0 / 3.0, 7.0}) {
    std::vector<double> costs;
    for (int b = 1; b <= 16; ++b) costs.push_back(b * t1);
    const BatchPartition p = SolveBatchKnapsack(costs, 16);
    CHECK(p.slices == std::vector<std::int64_t>(16, 1));
  }
}

TEST_CASE("knapsack rejects bad inputs") {
  CHECK_THROWS_AS(SolveBatchKnapsack(std::vector<double>{1.0}, 2), Error);
  CHECK_THROWS_AS(SolveBatchKnapsack(std::vector<double>{1.0}, 0), Error);
  try {
    SolveBatchKnapsack(std::vector<double>{1.0, -2.0}, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInfeasible);
  }
}

TEST_CASE("joint plan with a batch of one is the token plan") {
  const CostModel m = SmallModel();
  const PlanConfig cfg = SmallConfig();
  const BatchPlan bp = JointPlan(m, cfg, 1);
  const PlanResult plan = Optimize(m, cfg);
  REQUIRE(bp.entries.size() == 1);
  CHECK(bp.entries[0].batch_slice == 1);
  CHECK(bp.entries[0].scheme == plan.scheme);
  CHECK(bp.total_latency_ms == plan.predicted_ms);
}

TEST_CASE("joint plan honours injected costs and keeps planned schemes") {
  const CostModel m = SmallModel();
  const PlanConfig cfg = SmallConfig();
  JointPlanOptions options;
  options.cost_override = std::vector<double>{5.0, 8.0};
  const BatchPlan bp = JointPlan(m, cfg, 2, options);
  REQUIRE(bp.entries.size() == 1);
  CHECK(bp.entries[0].batch_slice == 2);
  CHECK(bp.entries[0].scheme == Optimize(BatchCostModel(m, 2), cfg).scheme);
  CHECK(bp.total_latency_ms == 8.0);
}

TEST_CASE("joint plan with linear scaling splits into single sequences") {
  const CostModel m = SmallModel();
  PlanConfig cfg = SmallConfig();
  const BatchPlan bp = JointPlan(m, cfg, 4);
  std::int64_t covered = 0;
  double total = 0.0;
  for (const auto& e : bp.entries) {
    covered += e.batch_slice;
    total += e.latency_ms;
  }
  CHECK(covered == 4);
  CHECK(std::abs(total - bp.total_latency_ms) <= 1e-9);
  CHECK(bp.entries.size() == 4);
}

TEST_CASE("joint plan is identical across thread counts") {
  const CostModel m = SmallModel();
  const PlanConfig cfg = SmallConfig();
  JointPlanOptions serial, parallel;
  serial.factors = BatchFactorTable{{1, 1.0}, {2, 1.3}, {3, 1.7}, {4, 2.2}};
  parallel.factors = serial.factors;
  serial.optimize.threads = 1;
  parallel.optimize.threads = 3;
  const BatchPlan a = JointPlan(m, cfg, 4, serial);
  const BatchPlan b = JointPlan(m, cfg, 4, parallel);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].batch_slice == b.entries[i].batch_slice);
    CHECK(a.entries[i].scheme == b.entries[i].scheme);
  }
  CHECK(a.total_latency_ms == b.total_latency_ms);
}

}  // namespace
}  // namespace terasched
