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

#ifndef TERASCHED_BATCH_PLANNER_HPP_
#define TERASCHED_BATCH_PLANNER_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "terasched/cost_model.hpp"
#include "terasched/planner.hpp"
#include "terasched/scheme.hpp"

namespace terasched {

// Measured latency multiplier for a batch slice of b sequences.
using BatchFactorTable = std::map<std::int64_t, double>;

// Cost model for slices carrying `batch_slice` sequences. With a table the
// model is scaled by factors[b] (missing b is an error); without one the
// scale is b itself.
CostModel BatchCostModel(const CostModel& model, std::int64_t batch_slice,
                         const std::optional<BatchFactorTable>& factors =
                             std::nullopt);

struct BatchPlan {
  std::vector<BatchEntry> entries;
  double total_latency_ms = 0.0;
};

struct BatchPartition {
  std::vector<std::int64_t> slices;  // batch slice sizes, summing to B
  double total_ms = 0.0;
};

// Exact unbounded knapsack over the batch: costs[b - 1] is the latency of one
// slice of b sequences. C(n) = min_b C(n - b) + T_b; among ties (within
// 1e-9 ms) the smallest b is taken first.
BatchPartition SolveBatchKnapsack(std::span<const double> costs,
                                  std::int64_t batch);

struct JointPlanOptions {
  std::optional<BatchFactorTable> factors;
  // Replaces the planned T_b (costs[b - 1]) while keeping the planned schemes.
  std::optional<std::vector<double>> cost_override;
  OptimizeOptions optimize;
};

// Plans every batch slice size 1..B with Optimize, then partitions B.
BatchPlan JointPlan(const CostModel& model, const PlanConfig& cfg,
                    std::int64_t batch, const JointPlanOptions& options = {});

}  // namespace terasched

#endif  // TERASCHED_BATCH_PLANNER_HPP_
