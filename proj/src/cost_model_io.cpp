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

#include "terasched/cost_model_io.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "terasched/error.hpp"
#include "terasched/file_io.hpp"

namespace terasched {
namespace {

using nlohmann::json;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void RowError(std::string_view source, int line,
                           const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw BadInput(msg.str());
}

std::int64_t ParseInt(std::string_view field, std::string_view source,
                      int line, const char* name) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    RowError(source, line,
             std::string("field '") + name + "' is not an integer: '" +
                 std::string(field) + "'");
  }
  return value;
}

double ParseReal(std::string_view field, std::string_view source, int line,
                 const char* name) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    RowError(source, line,
             std::string("field '") + name + "' is not a finite number: '" +
                 std::string(field) + "'");
  }
  return value;
}

// Calls `row(fields, line_no)` for each data row after checking the header.
template <typename RowFn>
void ForEachCsvRow(std::istream& in, std::string_view source,
                   std::string_view header, std::size_t columns, RowFn row) {
  std::string line;
  int line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = Trim(line);
    if (text.empty()) continue;
    if (!seen_header) {
      if (text != header) {
        RowError(source, line_no,
                 "expected header '" + std::string(header) + "'");
      }
      seen_header = true;
      continue;
    }
    const auto fields = SplitFields(text);
    if (fields.size() != columns) {
      RowError(source, line_no,
               "expected " + std::to_string(columns) + " fields, got " +
                   std::to_string(fields.size()));
    }
    row(fields, line_no);
  }
  if (!seen_header) {
    RowError(source, line_no, "missing header '" + std::string(header) + "'");
  }
}

std::string FormatReal(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

BaseTimeTable TableFromJson(const json& arr, const char* name) {
  if (!arr.is_array()) {
    throw BadInput(std::string("model field '") + name + "' must be an array");
  }
  BaseTimeTable table;
  for (const json& entry : arr) {
    const auto len = entry.at("len").get<std::int64_t>();
    const auto ms = entry.at("ms").get<double>();
    if (!table.emplace(len, ms).second) {
      throw BadInput(std::string("model field '") + name +
                     "' repeats length " + std::to_string(len));
    }
  }
  return table;
}

json TableToJson(const BaseTimeTable& table) {
  json arr = json::array();
  for (const auto& [len, ms] : table) {
    arr.push_back({{"len", len}, {"ms", ms}});
  }
  return arr;
}

}  // namespace

std::vector<Measurement> ParseMeasurementsCsv(std::istream& in,
                                              std::string_view source) {
  std::vector<Measurement> out;
  ForEachCsvRow(
      in, source, "slice_len,ctx_len,latency_ms", 3,
      [&](const std::vector<std::string_view>& f, int line) {
        Measurement m;
        m.slice_len = ParseInt(f[0], source, line, "slice_len");
        m.ctx_len = ParseInt(f[1], source, line, "ctx_len");
        m.latency_ms = ParseReal(f[2], source, line, "latency_ms");
        if (m.slice_len < 1) RowError(source, line, "slice_len must be >= 1");
        if (m.ctx_len < 0) RowError(source, line, "ctx_len must be >= 0");
        if (!(m.latency_ms > 0.0)) {
          RowError(source, line, "latency_ms must be > 0");
        }
        out.push_back(m);
      });
  return out;
}

std::vector<Measurement> LoadMeasurements(const std::filesystem::path& path) {
  std::istringstream in(ReadTextFile(path));
  return ParseMeasurementsCsv(in, path.string());
}

std::string MeasurementsToCsv(std::span<const Measurement> samples) {
  std::ostringstream out;
  out << "slice_len,ctx_len,latency_ms\n";
  for (const Measurement& m : samples) {
    out << m.slice_len << ',' << m.ctx_len << ',' << FormatReal(m.latency_ms)
        << '\n';
  }
  return out.str();
}

BaseTimeTable ParseBaseTimesCsv(std::istream& in, std::string_view source) {
  BaseTimeTable out;
  ForEachCsvRow(in, source, "slice_len,latency_ms", 2,
                [&](const std::vector<std::string_view>& f, int line) {
                  const auto len = ParseInt(f[0], source, line, "slice_len");
                  const auto ms = ParseReal(f[1], source, line, "latency_ms");
                  if (len < 1) RowError(source, line, "slice_len must be >= 1");
                  if (!(ms > 0.0)) {
                    RowError(source, line, "latency_ms must be > 0");
                  }
                  if (!out.emplace(len, ms).second) {
                    RowError(source, line,
                             "duplicate slice_len " + std::to_string(len));
                  }
                });
  return out;
}

BaseTimeTable LoadBaseTimes(const std::filesystem::path& path) {
  std::istringstream in(ReadTextFile(path));
  return ParseBaseTimesCsv(in, path.string());
}

std::string BaseTimesToCsv(const BaseTimeTable& table) {
  std::ostringstream out;
  out << "slice_len,latency_ms\n";
  for (const auto& [len, ms] : table) {
    out << len << ',' << FormatReal(ms) << '\n';
  }
  return out.str();
}

json ModelToJson(const CostModel& model) {
  const ContextCoeffs& c = model.ctx();
  json j = {
      {"granularity", model.granularity()},
      {"max_len", model.max_len()},
      {"base_times", TableToJson(model.base_times())},
      {"ctx", {{"a0", c.a0}, {"a1", c.a1}, {"a2", c.a2}, {"a3", c.a3}}},
      {"bwd_ratio", model.bwd_ratio()},
  };
  if (auto bwd = model.bwd_base_times()) {
    j["bwd_base_times"] = TableToJson(*bwd);
  }
  return j;
}

CostModel ModelFromJson(const json& j) {
  try {
    const auto granularity = j.at("granularity").get<std::int64_t>();
    const auto max_len = j.at("max_len").get<std::int64_t>();
    const BaseTimeTable base = TableFromJson(j.at("base_times"), "base_times");
    const json& c = j.at("ctx");
    ContextCoeffs ctx{c.at("a0").get<double>(), c.at("a1").get<double>(),
                      c.at("a2").get<double>(), c.at("a3").get<double>()};
    const double bwd_ratio = j.value("bwd_ratio", 2.0);
    std::optional<BaseTimeTable> bwd;
    if (j.contains("bwd_base_times")) {
      bwd = TableFromJson(j.at("bwd_base_times"), "bwd_base_times");
    }
    CostModel model(granularity, base, ctx, bwd_ratio, bwd);
    if (model.max_len() != max_len) {
      throw BadInput("model max_len " + std::to_string(max_len) +
                     " disagrees with base_times (which end at " +
                     std::to_string(model.max_len()) + ")");
    }
    return model;
  } catch (const json::exception& e) {
    throw BadInput(std::string("malformed cost model: ") + e.what());
  }
}

void SaveModel(const CostModel& model, const std::filesystem::path& path) {
  WriteTextFile(path, ModelToJson(model).dump(2) + "\n");
}

CostModel LoadModel(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw BadInput(path.string() + ": invalid JSON: " + e.what());
  }
  return ModelFromJson(j);
}

}  // namespace terasched
