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

#ifndef TERASCHED_ERROR_HPP_
#define TERASCHED_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace terasched {

// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kBadInput = 2,
  kInfeasible = 3,
  kIo = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error BadInput(const std::string& what) {
  return Error(ErrorKind::kBadInput, what);
}
inline Error Infeasible(const std::string& what) {
  return Error(ErrorKind::kInfeasible, what);
}
inline Error IoError(const std::string& what) {
  return Error(ErrorKind::kIo, what);
}

// Absolute tolerance for every millisecond comparison.
inline constexpr double kTimeTolerance = 1e-9;

}  // namespace terasched

#endif  // TERASCHED_ERROR_HPP_
