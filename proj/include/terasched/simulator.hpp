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

#ifndef TERASCHED_SIMULATOR_HPP_
#define TERASCHED_SIMULATOR_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace terasched {

// One slice occupying one pipeline stage. Stage and slice are 1-based.
struct TimelineEvent {
  int stage = 0;
  int slice = 0;
  double start_ms = 0.0;
  double end_ms = 0.0;

  bool operator==(const TimelineEvent&) const = default;
};

// Events are ordered by stage, then slice.
struct Timeline {
  int stages = 0;
  int slices = 0;
  std::vector<TimelineEvent> events;
  double makespan_ms = 0.0;

  bool operator==(const Timeline&) const = default;
};

// Flow shop with identical per-stage durations and unbounded buffering:
//   start(i, k) = max(end(i-1, k), end(i, k-1)),  end(i, k) = start + t_i.
// Throws BadInput on an empty or non-positive duration list or stages < 1.
Timeline Simulate(std::span<const double> durations, int stages);

// sum(t) + (stages - 1) * max(t). Same preconditions as Simulate.
double ClosedFormMakespan(std::span<const double> durations, int stages);

// Gantt chart, one row per stage and one <rect class="slice"> per event.
// Output is a pure function of the timeline.
std::string TimelineSvg(const Timeline& timeline);
void RenderTimeline(const Timeline& timeline,
                    const std::filesystem::path& path);

}  // namespace terasched

#endif  // TERASCHED_SIMULATOR_HPP_
