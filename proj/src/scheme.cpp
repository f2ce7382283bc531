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

#include "terasched/scheme.hpp"

#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

#include "terasched/error.hpp"

namespace terasched {
namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool AtEnd() {
    SkipSpace();
    return pos_ == text_.size();
  }

  bool Peek(char c) {
    SkipSpace();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool Accept(char c) {
    if (!Peek(c)) return false;
    ++pos_;
    return true;
  }

  void Expect(char c) {
    if (!Accept(c)) Fail(std::string("expected '") + c + "'");
  }

  std::int64_t Integer() {
    SkipSpace();
    std::int64_t value = 0;
    const char* begin = text_.data() + pos_;
    const auto [ptr, ec] =
        std::from_chars(begin, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == begin) Fail("expected an integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "slicing notation, column " << pos_ + 1 << ": " << what << " in '"
        << text_ << "'";
    throw BadInput(msg.str());
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::int64_t PositiveCount(Cursor& cur) {
  const std::int64_t n = cur.Integer();
  if (n < 1) cur.Fail("repeat count must be positive");
  return n;
}

// run ('+' run)*, run := '[' int (',' int)* ']' ('*' int)?
SlicingScheme ParseSchemeAt(Cursor& cur) {
  SlicingScheme scheme;
  do {
    cur.Expect('[');
    std::vector<std::int64_t> run;
    do {
      run.push_back(cur.Integer());
    } while (cur.Accept(','));
    cur.Expect(']');
    const std::int64_t repeat = cur.Accept('*') ? PositiveCount(cur) : 1;
    for (std::int64_t r = 0; r < repeat; ++r) {
      scheme.lengths.insert(scheme.lengths.end(), run.begin(), run.end());
    }
  } while (cur.Accept('+'));
  return scheme;
}

}  // namespace

std::int64_t SlicingScheme::total() const {
  return std::accumulate(lengths.begin(), lengths.end(), std::int64_t{0});
}

void ValidateScheme(const SlicingScheme& scheme, std::int64_t seq_len,
                    std::int64_t granularity) {
  if (scheme.lengths.empty()) {
    throw BadInput("slicing scheme is empty");
  }
  for (std::int64_t len : scheme.lengths) {
    if (len < 1 || len % granularity != 0) {
      throw BadInput("slice length " + std::to_string(len) +
                     " is not a positive multiple of " +
                     std::to_string(granularity));
    }
  }
  if (scheme.total() != seq_len) {
    throw BadInput("slicing scheme " + FormatScheme(scheme) + " sums to " +
                   std::to_string(scheme.total()) + ", expected " +
                   std::to_string(seq_len));
  }
}

SlicingScheme UniformScheme(std::int64_t seq_len, std::int64_t slices,
                            std::int64_t granularity) {
  if (slices < 1 || granularity < 1 || seq_len % granularity != 0 ||
      (seq_len / granularity) % slices != 0) {
    throw BadInput("cannot split " + std::to_string(seq_len) + " tokens into " +
                   std::to_string(slices) + " equal slices of granularity " +
                   std::to_string(granularity));
  }
  return SlicingScheme{
      std::vector<std::int64_t>(static_cast<std::size_t>(slices),
                                seq_len / slices)};
}

std::string FormatScheme(const SlicingScheme& scheme) {
  std::ostringstream out;
  const auto& v = scheme.lengths;
  std::vector<std::int64_t> singles;
  bool first_part = true;
  auto emit = [&](const std::string& part) {
    if (!first_part) out << " + ";
    out << part;
    first_part = false;
  };
  auto flush_singles = [&] {
    if (singles.empty()) return;
    std::ostringstream part;
    part << '[';
    for (std::size_t i = 0; i < singles.size(); ++i) {
      if (i) part << ", ";
      part << singles[i];
    }
    part << ']';
    emit(part.str());
    singles.clear();
  };
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    if (j - i >= 2) {
      flush_singles();
      emit("[" + std::to_string(v[i]) + "] * " + std::to_string(j - i));
    } else {
      singles.push_back(v[i]);
    }
    i = j;
  }
  flush_singles();
  return out.str();
}

std::string FormatBatchEntries(std::span<const BatchEntry> entries) {
  std::ostringstream out;
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    while (j < entries.size() &&
           entries[j].batch_slice == entries[i].batch_slice &&
           entries[j].scheme == entries[i].scheme) {
      ++j;
    }
    if (i) out << " + ";
    out << "[(" << entries[i].batch_slice << ", "
        << FormatScheme(entries[i].scheme) << ")]";
    if (j - i >= 2) out << " * " << (j - i);
    i = j;
  }
  return out.str();
}

SlicingScheme ParseScheme(std::string_view text) {
  Cursor cur(text);
  SlicingScheme scheme = ParseSchemeAt(cur);
  if (!cur.AtEnd()) cur.Fail("unexpected trailing text");
  return scheme;
}

// group ('+' group)*, group := '[' '(' int ',' scheme ')' ']' ('*' int)?
std::vector<BatchEntry> ParseBatchEntries(std::string_view text) {
  Cursor cur(text);
  std::vector<BatchEntry> entries;
  do {
    cur.Expect('[');
    cur.Expect('(');
    BatchEntry entry;
    entry.batch_slice = cur.Integer();
    if (entry.batch_slice < 1) cur.Fail("batch slice must be positive");
    cur.Expect(',');
    entry.scheme = ParseSchemeAt(cur);
    cur.Expect(')');
    cur.Expect(']');
    const std::int64_t repeat = cur.Accept('*') ? PositiveCount(cur) : 1;
    for (std::int64_t r = 0; r < repeat; ++r) entries.push_back(entry);
  } while (cur.Accept('+'));
  if (!cur.AtEnd()) cur.Fail("unexpected trailing text");
  return entries;
}

}  // namespace terasched
