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

#ifndef TERASCHED_SCHEME_HPP_
#define TERASCHED_SCHEME_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace terasched {

// Ordered slice lengths (tokens) covering one sequence front to back.
struct SlicingScheme {
  std::vector<std::int64_t> lengths;

  std::int64_t total() const;
  std::size_t size() const { return lengths.size(); }

  bool operator==(const SlicingScheme&) const = default;
};

// Throws BadInput unless every length is a positive multiple of
// `granularity` and the lengths sum to `seq_len`.
void ValidateScheme(const SlicingScheme& scheme, std::int64_t seq_len,
                    std::int64_t granularity);

// `slices` equal slices of `seq_len`; throws BadInput when they would not be
// whole multiples of `granularity`.
SlicingScheme UniformScheme(std::int64_t seq_len, std::int64_t slices,
                            std::int64_t granularity);

// A run of `batch_slice` sequences sharing one token slicing.
struct BatchEntry {
  std::int64_t batch_slice = 1;
  SlicingScheme scheme;
  double latency_ms = 0.0;  // not part of the notation
};

// Run-length notation used in published slicing tables:
//   scheme:  [120] * 4 + [112] * 6 + [64]      ([a, b, c] for distinct runs)
//   batch:   [(1, [128] * 16)] * 2
// Runs of two or more equal lengths (or equal entries) collapse to `* n`;
// consecutive singletons share one bracket.
std::string FormatScheme(const SlicingScheme& scheme);
std::string FormatBatchEntries(std::span<const BatchEntry> entries);

// Accept any spacing and any mix of run forms. Throw BadInput on syntax
// errors with the offending column.
SlicingScheme ParseScheme(std::string_view text);
std::vector<BatchEntry> ParseBatchEntries(std::string_view text);

}  // namespace terasched

#endif  // TERASCHED_SCHEME_HPP_
