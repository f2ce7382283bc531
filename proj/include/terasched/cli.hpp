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

#ifndef TERASCHED_CLI_HPP_
#define TERASCHED_CLI_HPP_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "terasched/cost_model.hpp"
#include "terasched/planner.hpp"

namespace terasched::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kBadInput = 2;
inline constexpr int kInfeasible = 3;
inline constexpr int kIoFailure = 4;

// Entry point shared by the binary and the tests. `args[0]` is the program
// name. Subcommands: fit, plan, simulate, sweep, batch-plan, synth-model.
int Run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err);

struct SweepRow {
  std::string scheme_label;  // "uniform-<d>" or "dp"
  std::int64_t num_slices = 0;
  double predicted_ms = 0.0;
  double simulated_ms = 0.0;
  double speedup_vs_single_slice = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by num_slices, dp after ties

  bool operator==(const SweepReport&) const = default;
};

// Uniform splits into each of `slice_counts` slices next to the optimized
// plan, each scored in closed form and by simulation.
SweepReport BuildSweep(const CostModel& model, const PlanConfig& cfg,
                       std::span<const std::int64_t> slice_counts,
                       const OptimizeOptions& options = {});

// Header `scheme_label,num_slices,predicted_ms,simulated_ms,
// speedup_vs_single_slice`; reals are written with 17 significant digits so
// parsing restores them exactly.
std::string SweepToCsv(const SweepReport& report);
SweepReport ParseSweepCsv(std::istream& in, std::string_view source);

// Grid samples of `model` (forward mode) over `points` x `points` slice and
// context lengths, each multiplied by a uniform factor in [1 - noise,
// 1 + noise] drawn from a generator seeded with `seed`.
std::vector<Measurement> SampleGrid(const CostModel& model, int points,
                                    double noise, std::uint64_t seed);

// Reads TERASCHED_THREADS as a cap on planner threads; unset or 0 means
// one per hardware thread.
int ThreadsFromEnv();

}  // namespace terasched::cli

#endif  // TERASCHED_CLI_HPP_
