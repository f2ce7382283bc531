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

#ifndef TERASCHED_PLANNER_HPP_
#define TERASCHED_PLANNER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "terasched/cost_model.hpp"
#include "terasched/scheme.hpp"

namespace terasched {

struct PlanConfig {
  int stages = 1;                 // K
  std::int64_t seq_len = 2048;    // L, tokens
  std::int64_t granularity = 8;   // g, tokens per DP unit
  double epsilon = 0.1;           // ms between evaluated t_max values
  Mode mode = Mode::kForward;

  bool operator==(const PlanConfig&) const = default;
};

// Throws BadInput when the config is malformed or does not match `model`.
void ValidateConfig(const PlanConfig& cfg, const CostModel& model);

struct PlanResult {
  SlicingScheme scheme;
  double t_max_ms = 0.0;
  // per_slice_ms[i] = Eval(l_i, l_1 + ... + l_{i-1})
  std::vector<double> per_slice_ms;
  // sum(per_slice) + (K - 1) * max(per_slice)
  double predicted_ms = 0.0;
};

struct FixedTmaxResult {
  double total_ms = 0.0;  // minimal sum of slice times under the cap
  SlicingScheme scheme;
};

// Minimal total slice time over schemes whose every slice costs at most
// `t_max_ms` (+1e-9). Empty when some prefix admits no feasible slice.
// Among equal totals the shortest final slice wins.
std::optional<FixedTmaxResult> DpFixedTmax(const CostModel& model,
                                           const PlanConfig& cfg,
                                           double t_max_ms);

// Same DP over a precomputed LatencyGrid; `granularity` converts units back
// to tokens in the returned scheme.
std::optional<FixedTmaxResult> DpFixedTmaxOnGrid(const Eigen::MatrixXd& grid,
                                                 std::int64_t granularity,
                                                 double t_max_ms);

// A group of sorted candidate values [floor, cap] within epsilon of `floor`.
// Clusters start at least epsilon apart.
struct TmaxCluster {
  double floor_ms = 0.0;
  double cap_ms = 0.0;
};

// Sorted distinct entries of a LatencyGrid.
std::vector<double> TmaxCandidates(const Eigen::MatrixXd& grid);
std::vector<TmaxCluster> ThinCandidates(std::span<const double> sorted,
                                        double epsilon);

struct OptimizeOptions {
  // Stop once K * t_max reaches the best latency found so far.
  bool prune = true;
  // Worker threads for candidate evaluation; 0 picks hardware concurrency.
  // The result does not depend on this value.
  int threads = 1;
};

// Optimal slicing within K * epsilon of the true optimum (exact at epsilon 0).
// Throws BadInput on a malformed config or model.
PlanResult Optimize(const CostModel& model, const PlanConfig& cfg,
                    const OptimizeOptions& options = {});

// Exhaustive search over all 2^(L/g - 1) compositions; L/g must be <= 22.
PlanResult BruteForceOptimal(const CostModel& model, const PlanConfig& cfg);

// Scores a given scheme; t_max_ms is its slowest slice.
PlanResult EvaluateScheme(const CostModel& model, const PlanConfig& cfg,
                          const SlicingScheme& scheme);

inline constexpr std::int64_t kBruteForceMaxUnits = 22;

}  // namespace terasched

#endif  // TERASCHED_PLANNER_HPP_
