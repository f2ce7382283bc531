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

#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "terasched/cost_model_io.hpp"
#include "terasched/error.hpp"
#include "terasched/file_io.hpp"

namespace terasched {
namespace {

std::string ErrorText(auto&& fn, ErrorKind* kind = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (kind) *kind = e.kind();
    return e.what();
  }
  FAIL("expected a terasched::Error");
  return {};
}

std::vector<Measurement> Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseMeasurementsCsv(in, "m.csv");
}

TEST_CASE("measurement rows parse field for field") {
  const auto rows = Parse("slice_len,ctx_len,latency_ms\n128,0,5.1\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == Measurement{128, 0, 5.1});
}

TEST_CASE("measurement errors carry the line number") {
  CHECK(ErrorText([] { Parse("slice_len,ctx_len,latency_ms\n0,0,5.1\n"); })
            .find("m.csv:2") != std::string::npos);
  CHECK(ErrorText([] {
          Parse("slice_len,ctx_len,latency_ms\n8,0,1\n\n16,x,5.1\n");
        }).find("m.csv:4") != std::string::npos);
  CHECK(ErrorText([] { Parse("slice_len,ctx_len,latency_ms\n8,0\n"); })
            .find("expected 3 fields") != std::string::npos);
  CHECK(ErrorText([] { Parse("slice_len,ctx_len,latency_ms\n8,-8,1\n"); })
            .find("ctx_len") != std::string::npos);
  CHECK(ErrorText([] { Parse("slice_len,ctx_len,latency_ms\n8,0,-1\n"); })
            .find("latency_ms") != std::string::npos);
  CHECK(ErrorText([] { Parse("len,ms\n8,0,1\n"); }).find("header") !=
        std::string::npos);
  CHECK(ErrorText([] { Parse(""); }).find("missing header") !=
        std::string::npos);
}

TEST_CASE("duplicate measurement rows are kept") {
  const auto rows = Parse(
      "slice_len,ctx_len,latency_ms\r\n8,0,1.0\r\n8,0,1.2\r\n");
  CHECK(rows.size() == 2);
}

TEST_CASE("measurements CSV writer output parses back") {
  const std::vector<Measurement> rows{{8, 0, 1.0 / 3.0}, {16, 24, 7.25}};
  CHECK(Parse(MeasurementsToCsv(rows)) == rows);
}

TEST_CASE("base time CSV rejects duplicates") {
  std::istringstream ok("slice_len,latency_ms\n8,1.5\n16,2\n");
  const auto table = ParseBaseTimesCsv(ok, "b.csv");
  CHECK(table.at(8) == 1.5);
  CHECK(table.at(16) == 2.0);
  std::istringstream dup("slice_len,latency_ms\n8,1.5\n8,2\n");
  CHECK(ErrorText([&] { ParseBaseTimesCsv(dup, "b.csv"); })
            .find("duplicate") != std::string::npos);
}

TEST_CASE("saved models load back structurally equal") {
  const auto dir = std::filesystem::temp_directory_path() / "terasched_io_test";
  std::filesystem::create_directories(dir);

  SynthParams p;
  p.ctx = {0.1, 1.0 / 3.0, -2e-3, 1e-7};
  p.bwd_ratio = 1.75;
  const CostModel m = SynthGpuModel(p);
  SaveModel(m, dir / "model.json");
  CHECK(LoadModel(dir / "model.json") == m);

  BaseTimeTable fwd{{4, 1.1}, {8, 2.2}}, bwd{{4, 3.3}, {8, 4.4}};
  const CostModel with_bwd(4, fwd, {}, 2.0, bwd);
  SaveModel(with_bwd, dir / "bwd.json");
  const CostModel loaded = LoadModel(dir / "bwd.json");
  CHECK(loaded == with_bwd);
  CHECK(loaded.has_bwd_table());
  CHECK_FALSE(loaded == m);
}

TEST_CASE("model JSON is validated") {
  auto j = ModelToJson(SynthGpuModel({}));
  j["max_len"] = 4096;
  CHECK(ErrorText([&] { ModelFromJson(j); }).find("max_len") !=
        std::string::npos);
  j.erase("ctx");
  CHECK(ErrorText([&] { ModelFromJson(j); }).find("malformed") !=
        std::string::npos);
}

TEST_CASE("missing files report the path as an I/O error") {
  ErrorKind kind = ErrorKind::kBadInput;
  const std::string msg =
      ErrorText([] { LoadModel("/nonexistent/model.json"); }, &kind);
  CHECK(kind == ErrorKind::kIo);
  CHECK(msg.find("/nonexistent/model.json") != std::string::npos);
  ErrorText([] { WriteTextFile("/nonexistent/dir/out.txt", "x"); }, &kind);
  CHECK(kind == ErrorKind::kIo);
}

}  // namespace
}  // namespace terasched
