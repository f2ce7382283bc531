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

#ifndef TERASCHED_PLAN_IO_HPP_
#define TERASCHED_PLAN_IO_HPP_

#include <filesystem>

#include "json.hpp"
#include "terasched/batch_planner.hpp"
#include "terasched/planner.hpp"
#include "terasched/simulator.hpp"

namespace terasched {

nlohmann::json ConfigToJson(const PlanConfig& cfg);
PlanConfig ConfigFromJson(const nlohmann::json& j);

// {scheme, t_max_ms, predicted_ms, per_slice_ms, config, notation}
struct PlanDocument {
  PlanConfig config;
  PlanResult plan;
};
nlohmann::json PlanToJson(const PlanDocument& doc);
PlanDocument PlanFromJson(const nlohmann::json& j);
void SavePlan(const PlanDocument& doc, const std::filesystem::path& path);
PlanDocument LoadPlan(const std::filesystem::path& path);

// {entries:[{batch_slice, scheme, latency_ms}], total_latency_ms, batch,
//  config, notation}
struct BatchPlanDocument {
  PlanConfig config;
  std::int64_t batch = 1;
  BatchPlan plan;
};
nlohmann::json BatchPlanToJson(const BatchPlanDocument& doc);
BatchPlanDocument BatchPlanFromJson(const nlohmann::json& j);
void SaveBatchPlan(const BatchPlanDocument& doc,
                   const std::filesystem::path& path);
BatchPlanDocument LoadBatchPlan(const std::filesystem::path& path);

// {makespan_ms, stages, slices, events:[{stage, slice, start_ms, end_ms}]}
nlohmann::json TimelineToJson(const Timeline& timeline);
Timeline TimelineFromJson(const nlohmann::json& j);
void SaveTimeline(const Timeline& timeline, const std::filesystem::path& path);
Timeline LoadTimeline(const std::filesystem::path& path);

// Reads a JSON file, mapping parse errors to BadInput.
nlohmann::json LoadJsonFile(const std::filesystem::path& path);

}  // namespace terasched

#endif  // TERASCHED_PLAN_IO_HPP_
