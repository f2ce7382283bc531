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

#include "terasched/simulator.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <string_view>

#include "terasched/error.hpp"
#include "terasched/file_io.hpp"

namespace terasched {
namespace {

void CheckDurations(std::span<const double> durations, int stages) {
  if (durations.empty()) {
    throw BadInput("duration list is empty");
  }
  if (stages < 1) {
    throw BadInput("stage count must be at least 1, got " +
                   std::to_string(stages));
  }
  for (double t : durations) {
    if (!(t > 0.0)) {
      throw BadInput("slice durations must be positive");
    }
  }
}

void AppendF(std::string& out, const char* fmt, auto... args) {
  char buf[256];
  const int n = std::snprintf(buf, sizeof(buf), fmt, args...);
  out.append(buf, static_cast<std::size_t>(std::max(n, 0)));
}

}  // namespace

Timeline Simulate(std::span<const double> durations, int stages) {
  CheckDurations(durations, stages);
  const int slices = static_cast<int>(durations.size());

  Timeline tl;
  tl.stages = stages;
  tl.slices = slices;
  tl.events.reserve(static_cast<std::size_t>(stages) * slices);

  // prev_stage_end[i] is end(i, k-1) while stage k is being filled.
  std::vector<double> prev_stage_end(slices, 0.0);
  for (int k = 1; k <= stages; ++k) {
    double stage_free = 0.0;
    for (int i = 0; i < slices; ++i) {
      const double start = std::max(stage_free, prev_stage_end[i]);
      const double end = start + durations[i];
      tl.events.push_back({k, i + 1, start, end});
      stage_free = end;
      prev_stage_end[i] = end;
    }
  }
  for (const TimelineEvent& e : tl.events) {
    tl.makespan_ms = std::max(tl.makespan_ms, e.end_ms);
  }
  return tl;
}

double ClosedFormMakespan(std::span<const double> durations, int stages) {
  CheckDurations(durations, stages);
  double total = 0.0;
  double slowest = 0.0;
  for (double t : durations) {
    total += t;
    slowest = std::max(slowest, t);
  }
  return total + static_cast<double>(stages - 1) * slowest;
}

std::string TimelineSvg(const Timeline& tl) {
  constexpr double kLabelWidth = 70.0;
  constexpr double kChartWidth = 960.0;
  constexpr double kRowHeight = 18.0;
  constexpr double kRowGap = 4.0;
  constexpr double kTop = 24.0;
  static constexpr std::array<std::string_view, 8> kPalette = {
      "#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
      "#59a14f", "#edc948", "#b07aa1", "#ff9da7"};

  const double scale =
      tl.makespan_ms > 0.0 ? kChartWidth / tl.makespan_ms : 0.0;
  const double width = kLabelWidth + kChartWidth + 10.0;
  const double height = kTop + tl.stages * (kRowHeight + kRowGap) + 20.0;

  std::string out;
  AppendF(out,
          "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" "
          "height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\" "
          "font-size=\"11\">\n",
          width, height, width, height);
  AppendF(out,
          "<text x=\"%.1f\" y=\"14\">makespan %.6f ms, %d stages, %d "
          "slices</text>\n",
          kLabelWidth, tl.makespan_ms, tl.stages, tl.slices);
  for (int k = 1; k <= tl.stages; ++k) {
    const double y = kTop + (k - 1) * (kRowHeight + kRowGap);
    AppendF(out,
            "<text x=\"4\" y=\"%.1f\">stage %d</text>\n"
            "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
            "stroke=\"#ccc\"/>\n",
            y + kRowHeight - 5.0, k, kLabelWidth, y + kRowHeight,
            kLabelWidth + kChartWidth, y + kRowHeight);
  }
  for (const TimelineEvent& e : tl.events) {
    const double x = kLabelWidth + e.start_ms * scale;
    const double w = (e.end_ms - e.start_ms) * scale;
    const double y = kTop + (e.stage - 1) * (kRowHeight + kRowGap);
    const std::string_view color = kPalette[(e.slice - 1) % kPalette.size()];
    AppendF(out,
            "<rect class=\"slice\" x=\"%.3f\" y=\"%.1f\" width=\"%.3f\" "
            "height=\"%.1f\" fill=\"%.*s\" stroke=\"#333\" "
            "stroke-width=\"0.3\"><title>stage %d slice %d: %.6f-%.6f "
            "ms</title></rect>\n",
            x, y, w, kRowHeight, static_cast<int>(color.size()), color.data(),
            e.stage, e.slice, e.start_ms, e.end_ms);
  }
  out += "</svg>\n";
  return out;
}

void RenderTimeline(const Timeline& timeline,
                    const std::filesystem::path& path) {
  WriteTextFile(path, TimelineSvg(timeline));
}

}  // namespace terasched
