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

#include "terasched/batch_planner.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>

#include "terasched/error.hpp"

namespace terasched {

CostModel BatchCostModel(const CostModel& model, std::int64_t batch_slice,
                         const std::optional<BatchFactorTable>& factors) {
  if (batch_slice < 1) {
    throw BadInput("batch slice must be at least 1");
  }
  double factor = static_cast<double>(batch_slice);
  if (factors) {
    auto it = factors->find(batch_slice);
    if (it == factors->end()) {
      throw BadInput("batch factor table has no entry for b = " +
                     std::to_string(batch_slice));
    }
    factor = it->second;
  }
  if (factor == 1.0) return model;
  return ScaleModel(model, factor);
}

BatchPartition SolveBatchKnapsack(std::span<const double> costs,
                                  std::int64_t batch) {
  if (batch < 1) {
    throw BadInput("batch size must be at least 1");
  }
  if (static_cast<std::int64_t>(costs.size()) < batch) {
    throw BadInput("need a latency for every batch slice size up to " +
                   std::to_string(batch));
  }
  for (std::int64_t b = 1; b <= batch; ++b) {
    if (!(costs[b - 1] > 0.0)) {
      throw Infeasible("batch slice size " + std::to_string(b) +
                       " has no positive latency");
    }
  }
  std::vector<double> best(batch + 1, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> choice(batch + 1, 0);
  best[0] = 0.0;
  for (std::int64_t n = 1; n <= batch; ++n) {
    for (std::int64_t b = 1; b <= n; ++b) {
      const double total = best[n - b] + costs[b - 1];
      if (total < best[n] - kTimeTolerance) {
        best[n] = total;
        choice[n] = b;
      }
    }
  }
  BatchPartition out;
  out.total_ms = best[batch];
  for (std::int64_t n = batch; n > 0; n -= choice[n]) {
    out.slices.push_back(choice[n]);
  }
  return out;
}

BatchPlan JointPlan(const CostModel& model, const PlanConfig& cfg,
                    std::int64_t batch, const JointPlanOptions& options) {
  if (batch < 1) {
    throw BadInput("batch size must be at least 1");
  }
  if (options.cost_override &&
      static_cast<std::int64_t>(options.cost_override->size()) < batch) {
    throw BadInput("cost override must list T_b for every b up to " +
                   std::to_string(batch));
  }
  const int threads = options.optimize.threads > 0
                          ? options.optimize.threads
                          : static_cast<int>(std::max(
                                1U, std::thread::hardware_concurrency()));
  const bool parallel = threads > 1 && batch > 1;
  OptimizeOptions inner = options.optimize;
  if (parallel) inner.threads = 1;

  std::vector<PlanResult> plans(batch);
  std::vector<std::exception_ptr> failures(batch);
  auto plan_one = [&](std::int64_t b) {
    try {
      plans[b - 1] =
          Optimize(BatchCostModel(model, b, options.factors), cfg, inner);
    } catch (...) {
      failures[b - 1] = std::current_exception();
    }
  };
  // Per-b plans are independent; the knapsack below is sequential.
  if (!parallel) {
    for (std::int64_t b = 1; b <= batch; ++b) plan_one(b);
  } else {
    std::vector<std::jthread> workers;
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::int64_t b = w + 1; b <= batch; b += threads) plan_one(b);
      });
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<double> costs(batch);
  for (std::int64_t b = 1; b <= batch; ++b) {
    costs[b - 1] = options.cost_override ? (*options.cost_override)[b - 1]
                                         : plans[b - 1].predicted_ms;
  }
  const BatchPartition partition = SolveBatchKnapsack(costs, batch);

  BatchPlan plan;
  for (std::int64_t b : partition.slices) {
    plan.entries.push_back({b, plans[b - 1].scheme, costs[b - 1]});
    plan.total_latency_ms += costs[b - 1];
  }
  return plan;
}

}  // namespace terasched
