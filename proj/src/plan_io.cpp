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

#include "terasched/plan_io.hpp"

#include <string>

#include "terasched/error.hpp"
#include "terasched/file_io.hpp"

namespace terasched {
namespace {

using nlohmann::json;

// Rewrites nlohmann exceptions as BadInput with some context.
template <typename Fn>
auto Decode(const char* what, Fn fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw BadInput(std::string("malformed ") + what + ": " + e.what());
  }
}

SlicingScheme SchemeFromJson(const json& j) {
  return SlicingScheme{j.get<std::vector<std::int64_t>>()};
}

void SaveJson(const json& j, const std::filesystem::path& path) {
  WriteTextFile(path, j.dump(2) + "\n");
}

}  // namespace

json LoadJsonFile(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw BadInput(path.string() + ": invalid JSON: " + e.what());
  }
}

json ConfigToJson(const PlanConfig& cfg) {
  return {{"stages", cfg.stages},
          {"seq_len", cfg.seq_len},
          {"granularity", cfg.granularity},
          {"epsilon", cfg.epsilon},
          {"mode", std::string(ModeName(cfg.mode))}};
}

PlanConfig ConfigFromJson(const json& j) {
  return Decode("plan config", [&] {
    PlanConfig cfg;
    cfg.stages = j.at("stages").get<int>();
    cfg.seq_len = j.at("seq_len").get<std::int64_t>();
    cfg.granularity = j.at("granularity").get<std::int64_t>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.mode = ParseMode(j.at("mode").get<std::string>());
    return cfg;
  });
}

json PlanToJson(const PlanDocument& doc) {
  const PlanResult& p = doc.plan;
  return {{"scheme", p.scheme.lengths},
          {"t_max_ms", p.t_max_ms},
          {"predicted_ms", p.predicted_ms},
          {"per_slice_ms", p.per_slice_ms},
          {"config", ConfigToJson(doc.config)},
          {"notation", FormatScheme(p.scheme)}};
}

PlanDocument PlanFromJson(const json& j) {
  return Decode("plan", [&] {
    PlanDocument doc;
    doc.config = ConfigFromJson(j.at("config"));
    doc.plan.scheme = SchemeFromJson(j.at("scheme"));
    doc.plan.t_max_ms = j.at("t_max_ms").get<double>();
    doc.plan.predicted_ms = j.at("predicted_ms").get<double>();
    doc.plan.per_slice_ms = j.at("per_slice_ms").get<std::vector<double>>();
    ValidateScheme(doc.plan.scheme, doc.config.seq_len,
                   doc.config.granularity);
    if (doc.plan.per_slice_ms.size() != doc.plan.scheme.size()) {
      throw BadInput("plan has " +
                     std::to_string(doc.plan.per_slice_ms.size()) +
                     " slice times for " +
                     std::to_string(doc.plan.scheme.size()) + " slices");
    }
    return doc;
  });
}

void SavePlan(const PlanDocument& doc, const std::filesystem::path& path) {
  SaveJson(PlanToJson(doc), path);
}

PlanDocument LoadPlan(const std::filesystem::path& path) {
  return PlanFromJson(LoadJsonFile(path));
}

json BatchPlanToJson(const BatchPlanDocument& doc) {
  json entries = json::array();
  for (const BatchEntry& e : doc.plan.entries) {
    entries.push_back({{"batch_slice", e.batch_slice},
                       {"scheme", e.scheme.lengths},
                       {"latency_ms", e.latency_ms}});
  }
  return {{"entries", entries},
          {"total_latency_ms", doc.plan.total_latency_ms},
          {"batch", doc.batch},
          {"config", ConfigToJson(doc.config)},
          {"notation", FormatBatchEntries(doc.plan.entries)}};
}

BatchPlanDocument BatchPlanFromJson(const json& j) {
  return Decode("batch plan", [&] {
    BatchPlanDocument doc;
    doc.config = ConfigFromJson(j.at("config"));
    doc.batch = j.at("batch").get<std::int64_t>();
    doc.plan.total_latency_ms = j.at("total_latency_ms").get<double>();
    std::int64_t covered = 0;
    for (const json& e : j.at("entries")) {
      BatchEntry entry;
      entry.batch_slice = e.at("batch_slice").get<std::int64_t>();
      entry.scheme = SchemeFromJson(e.at("scheme"));
      entry.latency_ms = e.value("latency_ms", 0.0);
      if (entry.batch_slice < 1) {
        throw BadInput("batch slice must be at least 1");
      }
      ValidateScheme(entry.scheme, doc.config.seq_len, doc.config.granularity);
      covered += entry.batch_slice;
      doc.plan.entries.push_back(std::move(entry));
    }
    if (covered != doc.batch) {
      throw BadInput("batch slices sum to " + std::to_string(covered) +
                     ", expected " + std::to_string(doc.batch));
    }
    return doc;
  });
}

void SaveBatchPlan(const BatchPlanDocument& doc,
                   const std::filesystem::path& path) {
  SaveJson(BatchPlanToJson(doc), path);
}

BatchPlanDocument LoadBatchPlan(const std::filesystem::path& path) {
  return BatchPlanFromJson(LoadJsonFile(path));
}

json TimelineToJson(const Timeline& tl) {
  json events = json::array();
  for (const TimelineEvent& e : tl.events) {
    events.push_back({{"stage", e.stage},
                      {"slice", e.slice},
                      {"start_ms", e.start_ms},
                      {"end_ms", e.end_ms}});
  }
  return {{"makespan_ms", tl.makespan_ms},
          {"stages", tl.stages},
          {"slices", tl.slices},
          {"events", events}};
}

Timeline TimelineFromJson(const json& j) {
  return Decode("timeline", [&] {
    Timeline tl;
    tl.makespan_ms = j.at("makespan_ms").get<double>();
    tl.stages = j.at("stages").get<int>();
    tl.slices = j.at("slices").get<int>();
    for (const json& e : j.at("events")) {
      tl.events.push_back({e.at("stage").get<int>(), e.at("slice").get<int>(),
                           e.at("start_ms").get<double>(),
                           e.at("end_ms").get<double>()});
    }
    return tl;
  });
}

void SaveTimeline(const Timeline& timeline, const std::filesystem::path& path) {
  SaveJson(TimelineToJson(timeline), path);
}

Timeline LoadTimeline(const std::filesystem::path& path) {
  return TimelineFromJson(LoadJsonFile(path));
}

}  // namespace terasched
