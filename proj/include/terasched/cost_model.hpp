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

#ifndef TERASCHED_COST_MODEL_HPP_
#define TERASCHED_COST_MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace terasched {

// Which latency the planner minimizes: forward only, or forward plus backward.
enum class Mode { kForward, kForwardBackward };

std::string_view ModeName(Mode mode);
// Accepts "fwd", "forward", "fwd+bwd" and "forward+backward".
Mode ParseMode(std::string_view text);

// One profiled sample of the slice latency: `slice_len` tokens processed on
// top of `ctx_len` tokens of preceding context.
struct Measurement {
  std::int64_t slice_len = 0;
  std::int64_t ctx_len = 0;
  double latency_ms = 0.0;

  bool operator==(const Measurement&) const = default;
};

// Linear context overhead a0 + a1*i + a2*j + a3*i*j, with i the slice length
// and j the context length (both in tokens).
struct ContextCoeffs {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  double operator()(double slice_len, double ctx_len) const {
    return a0 + a1 * slice_len + a2 * ctx_len + a3 * slice_len * ctx_len;
  }
  Eigen::Vector4d AsVector() const { return {a0, a1, a2, a3}; }
  static ContextCoeffs FromVector(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }

  bool operator==(const ContextCoeffs&) const = default;
};

// Slice length (tokens) -> latency without context (ms).
using BaseTimeTable = std::map<std::int64_t, double>;

// Empirical slice latency model:
//
//   fwd(i, j)     = base(i) + ctx(i, j)
//   fwd+bwd(i, j) = (1 + bwd_ratio) * fwd(i, j)
//
// When a per-length backward table is supplied it replaces the ratio for the
// context-free part: fwd+bwd(i, j) = fwd(i, j) + bwd_base(i) + bwd_ratio * ctx(i, j).
//
// Immutable after construction.
class CostModel {
 public:
  // Throws BadInput unless `base_times` holds a positive entry for every
  // multiple of `granularity` up to its largest key (and nothing else).
  CostModel(std::int64_t granularity, const BaseTimeTable& base_times,
            ContextCoeffs ctx, double bwd_ratio = 2.0,
            std::optional<BaseTimeTable> bwd_base_times = std::nullopt);

  std::int64_t granularity() const { return granularity_; }
  std::int64_t max_len() const { return max_len_; }
  std::int64_t max_units() const { return base_.size(); }
  const ContextCoeffs& ctx() const { return ctx_; }
  double bwd_ratio() const { return bwd_ratio_; }
  bool has_bwd_table() const { return bwd_base_.has_value(); }

  double base_ms(std::int64_t slice_len) const;
  std::optional<double> bwd_base_ms(std::int64_t slice_len) const;

  BaseTimeTable base_times() const;
  std::optional<BaseTimeTable> bwd_base_times() const;

  bool operator==(const CostModel& other) const;

 private:
  std::int64_t granularity_;
  std::int64_t max_len_;
  Eigen::VectorXd base_;  // index u-1 holds base(u * granularity)
  ContextCoeffs ctx_;
  double bwd_ratio_;
  std::optional<Eigen::VectorXd> bwd_base_;
};

// Slice latency in ms. Throws BadInput when `slice_len` is not a positive
// multiple of the granularity, when the slice overruns max_len, or when the
// model evaluates to a non-positive latency.
double Eval(const CostModel& model, std::int64_t slice_len,
            std::int64_t ctx_len, Mode mode = Mode::kForward);

// Every slice latency reachable while planning a sequence of `seq_len` tokens,
// indexed in granules: grid(i, j) = Eval(i*g, j*g) for i >= 1, i + j <= n.
// Unreachable cells hold NaN. Throws BadInput on any non-positive entry.
Eigen::MatrixXd LatencyGrid(const CostModel& model, std::int64_t seq_len,
                            Mode mode);

struct FitResult {
  ContextCoeffs coeffs;
  // max over samples of |predicted - measured| / measured, on total latency.
  double max_rel_error = 0.0;
  // Ratio of extreme singular values of the column-equilibrated design.
  double condition_number = 0.0;
};

// Least-squares fit of the context overhead on top of `base_times`,
// minimizing relative residuals sum(((measured - predicted) / measured)^2).
// Throws
// BadInput on a rank-deficient design or a slice length missing from the
// base table.
FitResult FitContext(std::span<const Measurement> samples,
                     const BaseTimeTable& base_times);

double MaxRelativeError(std::span<const Measurement> samples,
                        const BaseTimeTable& base_times,
                        const ContextCoeffs& coeffs);

// Base curve that stays flat up to a knee and grows linearly after it, the
// shape GPUs show once a slice saturates the device.
struct SynthParams {
  std::int64_t flat_until = 256;
  double flat_ms = 5.0;
  double per_token_ms = 0.02;
  ContextCoeffs ctx;
  std::int64_t granularity = 8;
  std::int64_t max_len = 2048;
  double bwd_ratio = 2.0;
};

CostModel SynthGpuModel(const SynthParams& params);

// Returns a copy whose base curves and context coefficients are multiplied
// by `factor`, so every evaluation scales by `factor` (bit-exactly when the
// factor is a power of two).
CostModel ScaleModel(const CostModel& model, double factor);

}  // namespace terasched

#endif  // TERASCHED_COST_MODEL_HPP_
