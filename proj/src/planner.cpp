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

#include "terasched/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "terasched/error.hpp"
#include "terasched/simulator.hpp"

namespace terasched {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PlanResult ScoreOnGrid(const Eigen::MatrixXd& grid, std::int64_t granularity,
                       int stages, SlicingScheme scheme, double t_max_ms) {
  PlanResult result;
  result.per_slice_ms.reserve(scheme.size());
  std::int64_t ctx_units = 0;
  for (std::int64_t len : scheme.lengths) {
    const std::int64_t units = len / granularity;
    result.per_slice_ms.push_back(grid(units, ctx_units));
    ctx_units += units;
  }
  result.scheme = std::move(scheme);
  result.t_max_ms = t_max_ms;
  result.predicted_ms = ClosedFormMakespan(result.per_slice_ms, stages);
  return result;
}

int ResolveThreads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void ValidateConfig(const PlanConfig& cfg, const CostModel& model) {
  if (cfg.stages < 1) {
    throw BadInput("stage count must be at least 1");
  }
  if (cfg.granularity < 1) {
    throw BadInput("granularity must be positive");
  }
  if (cfg.granularity != model.granularity()) {
    throw BadInput("config granularity " + std::to_string(cfg.granularity) +
                   " differs from the cost model's " +
                   std::to_string(model.granularity()));
  }
  if (cfg.seq_len < cfg.granularity || cfg.seq_len % cfg.granularity != 0) {
    throw BadInput("sequence length " + std::to_string(cfg.seq_len) +
                   " is not a positive multiple of the granularity");
  }
  if (cfg.seq_len > model.max_len()) {
    throw BadInput("sequence length " + std::to_string(cfg.seq_len) +
                   " exceeds the cost model range " +
                   std::to_string(model.max_len()));
  }
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) {
    throw BadInput("epsilon must be a finite non-negative number");
  }
}

std::optional<FixedTmaxResult> DpFixedTmaxOnGrid(const Eigen::MatrixXd& grid,
                                                 std::int64_t granularity,
                                                 double t_max_ms) {
  const Eigen::Index n = grid.rows() - 1;
  const double cap = t_max_ms + kTimeTolerance;
  // best[i]: minimal total over the first i units; last[i]: final slice.
  std::vector<double> best(n + 1, kInf);
  std::vector<Eigen::Index> last(n + 1, 0);
  best[0] = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    for (Eigen::Index k = 1; k <= i; ++k) {
      const double t = grid(k, i - k);
      if (!(t <= cap) || best[i - k] == kInf) continue;
      const double total = best[i - k] + t;
      if (total < best[i]) {
        best[i] = total;
        last[i] = k;
      }
    }
  }
  if (best[n] == kInf) return std::nullopt;

  FixedTmaxResult out;
  out.total_ms = best[n];
  for (Eigen::Index i = n; i > 0; i -= last[i]) {
    out.scheme.lengths.push_back(last[i] * granularity);
  }
  std::reverse(out.scheme.lengths.begin(), out.scheme.lengths.end());
  return out;
}

std::optional<FixedTmaxResult> DpFixedTmax(const CostModel& model,
                                           const PlanConfig& cfg,
                                           double t_max_ms) {
  ValidateConfig(cfg, model);
  if (!(t_max_ms > 0.0)) {
    throw BadInput("t_max must be positive");
  }
  return DpFixedTmaxOnGrid(LatencyGrid(model, cfg.seq_len, cfg.mode),
                           cfg.granularity, t_max_ms);
}

std::vector<double> TmaxCandidates(const Eigen::MatrixXd& grid) {
  const Eigen::Index n = grid.rows() - 1;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (Eigen::Index i = 1; i <= n; ++i) {
    for (Eigen::Index j = 0; i + j <= n; ++j) values.push_back(grid(i, j));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<TmaxCluster> ThinCandidates(std::span<const double> sorted,
                                        double epsilon) {
  std::vector<TmaxCluster> clusters;
  for (double v : sorted) {
    if (clusters.empty() || v >= clusters.back().floor_ms + epsilon) {
      clusters.push_back({v, v});
    } else {
      clusters.back().cap_ms = v;
    }
  }
  return clusters;
}

PlanResult Optimize(const CostModel& model, const PlanConfig& cfg,
                    const OptimizeOptions& options) {
  ValidateConfig(cfg, model);
  const Eigen::MatrixXd grid = LatencyGrid(model, cfg.seq_len, cfg.mode);
  const std::vector<double> candidates = TmaxCandidates(grid);
  const std::vector<TmaxCluster> clusters =
      ThinCandidates(candidates, cfg.epsilon);
  if (clusters.empty()) {
    throw BadInput("cost model yields no t_max candidates");
  }

  // Each cluster is solved at its cap, so any optimum whose slowest slice
  // lies in [floor, cap] stays feasible; the gap is then below K * epsilon.
  const double stages = static_cast<double>(cfg.stages);
  const int threads = ResolveThreads(options.threads);
  std::optional<PlanResult> best;
  std::vector<std::optional<FixedTmaxResult>> batch;

  for (std::size_t next = 0; next < clusters.size();) {
    const std::size_t count =
        std::min<std::size_t>(static_cast<std::size_t>(threads),
                              clusters.size() - next);
    batch.assign(count, std::nullopt);
    auto solve = [&](std::size_t slot) {
      batch[slot] =
          DpFixedTmaxOnGrid(grid, cfg.granularity, clusters[next + slot].cap_ms);
    };
    if (count == 1) {
      solve(0);
    } else {
      std::vector<std::jthread> workers;
      workers.reserve(count);
      for (std::size_t slot = 0; slot < count; ++slot) {
        workers.emplace_back(solve, slot);
      }
    }

    // Merge in ascending order so the cutoff matches sequential execution.
    bool stop = false;
    for (std::size_t slot = 0; slot < count; ++slot) {
      const TmaxCluster& cluster = clusters[next + slot];
      if (options.prune && best &&
          stages * cluster.floor_ms >= best->predicted_ms) {
        stop = true;
        break;
      }
      if (!batch[slot]) continue;
      PlanResult candidate =
          ScoreOnGrid(grid, cfg.granularity, cfg.stages,
                      std::move(batch[slot]->scheme), cluster.cap_ms);
      if (!best || candidate.predicted_ms < best->predicted_ms) {
        best = std::move(candidate);
      }
    }
    if (stop) break;
    next += count;
  }
  if (!best) {
    throw Infeasible("no slicing scheme is feasible under any t_max");
  }
  return *std::move(best);
}

PlanResult BruteForceOptimal(const CostModel& model, const PlanConfig& cfg) {
  ValidateConfig(cfg, model);
  const std::int64_t n = cfg.seq_len / cfg.granularity;
  if (n > kBruteForceMaxUnits) {
    throw BadInput("brute force is limited to " +
                   std::to_string(kBruteForceMaxUnits) + " units, got " +
                   std::to_string(n));
  }
  const Eigen::MatrixXd grid = LatencyGrid(model, cfg.seq_len, cfg.mode);

  // Bit b of `cuts` set means a slice boundary after unit b + 1.
  std::optional<PlanResult> best;
  const std::uint64_t compositions = std::uint64_t{1} << (n - 1);
  std::vector<double> times;
  SlicingScheme scheme;
  for (std::uint64_t cuts = 0; cuts < compositions; ++cuts) {
    scheme.lengths.clear();
    times.clear();
    std::int64_t start = 0;
    for (std::int64_t u = 1; u <= n; ++u) {
      if (u == n || (cuts >> (u - 1)) & 1U) {
        scheme.lengths.push_back((u - start) * cfg.granularity);
        times.push_back(grid(u - start, start));
        start = u;
      }
    }
    const double total = ClosedFormMakespan(times, cfg.stages);
    if (!best || total < best->predicted_ms) {
      best = PlanResult{scheme, *std::max_element(times.begin(), times.end()),
                        times, total};
    }
  }
  return *std::move(best);
}

PlanResult EvaluateScheme(const CostModel& model, const PlanConfig& cfg,
                          const SlicingScheme& scheme) {
  ValidateConfig(cfg, model);
  ValidateScheme(scheme, cfg.seq_len, cfg.granularity);
  const Eigen::MatrixXd grid = LatencyGrid(model, cfg.seq_len, cfg.mode);
  PlanResult result = ScoreOnGrid(grid, cfg.granularity, cfg.stages, scheme, 0.0);
  result.t_max_ms =
      *std::max_element(result.per_slice_ms.begin(), result.per_slice_ms.end());
  return result;
}

}  // namespace terasched
