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

#ifndef TERASCHED_COST_MODEL_IO_HPP_
#define TERASCHED_COST_MODEL_IO_HPP_

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "terasched/cost_model.hpp"

namespace terasched {

// Measurements CSV, header `slice_len,ctx_len,latency_ms`. Errors carry the
// source name and 1-based line number. Duplicate (slice_len, ctx_len) rows
// are kept.
std::vector<Measurement> ParseMeasurementsCsv(std::istream& in,
                                              std::string_view source);
std::vector<Measurement> LoadMeasurements(const std::filesystem::path& path);
std::string MeasurementsToCsv(std::span<const Measurement> samples);

// Context-free latency CSV, header `slice_len,latency_ms`.
BaseTimeTable ParseBaseTimesCsv(std::istream& in, std::string_view source);
BaseTimeTable LoadBaseTimes(const std::filesystem::path& path);
std::string BaseTimesToCsv(const BaseTimeTable& table);

// {granularity, max_len, base_times:[{len,ms}...], ctx:{a0,a1,a2,a3},
//  bwd_ratio} plus an optional bwd_base_times array.
nlohmann::json ModelToJson(const CostModel& model);
CostModel ModelFromJson(const nlohmann::json& j);

void SaveModel(const CostModel& model, const std::filesystem::path& path);
CostModel LoadModel(const std::filesystem::path& path);

}  // namespace terasched

#endif  // TERASCHED_COST_MODEL_IO_HPP_
