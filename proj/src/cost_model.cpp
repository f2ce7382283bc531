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

#include "terasched/cost_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "terasched/error.hpp"

namespace terasched {
namespace {

Eigen::VectorXd TableToVector(std::int64_t granularity,
                              const BaseTimeTable& table,
                              const char* what) {
  if (table.empty()) {
    throw BadInput(std::string(what) + " is empty");
  }
  const std::int64_t max_len = table.rbegin()->first;
  if (max_len % granularity != 0) {
    std::ostringstream msg;
    msg << what << ": length " << max_len << " is not a multiple of granularity "
        << granularity;
    throw BadInput(msg.str());
  }
  const std::int64_t units = max_len / granularity;
  if (static_cast<std::int64_t>(table.size()) != units) {
    std::ostringstream msg;
    msg << what << " must hold exactly one entry per multiple of "
        << granularity << " up to " << max_len << " (got " << table.size()
        << " entries, expected " << units << ")";
    throw BadInput(msg.str());
  }
  Eigen::VectorXd out(units);
  for (std::int64_t u = 1; u <= units; ++u) {
    auto it = table.find(u * granularity);
    if (it == table.end()) {
      std::ostringstream msg;
      msg << what << " is missing slice length " << u * granularity;
      throw BadInput(msg.str());
    }
    if (!(it->second > 0.0) || !std::isfinite(it->second)) {
      std::ostringstream msg;
      msg << what << "[" << it->first << "] = " << it->second
          << " must be a positive finite latency";
      throw BadInput(msg.str());
    }
    out[u - 1] = it->second;
  }
  return out;
}

BaseTimeTable VectorToTable(std::int64_t granularity, const Eigen::VectorXd& v) {
  BaseTimeTable table;
  for (Eigen::Index u = 0; u < v.size(); ++u) {
    table.emplace((u + 1) * granularity, v[u]);
  }
  return table;
}

}  // namespace

std::string_view ModeName(Mode mode) {
  return mode == Mode::kForward ? "fwd" : "fwd+bwd";
}

Mode ParseMode(std::string_view text) {
  if (text == "fwd" || text == "forward") return Mode::kForward;
  if (text == "fwd+bwd" || text == "forward+backward") {
    return Mode::kForwardBackward;
  }
  throw BadInput("unknown mode '" + std::string(text) +
                 "' (expected fwd or fwd+bwd)");
}

CostModel::CostModel(std::int64_t granularity, const BaseTimeTable& base_times,
                     ContextCoeffs ctx, double bwd_ratio,
                     std::optional<BaseTimeTable> bwd_base_times)
    : granularity_(granularity), ctx_(ctx), bwd_ratio_(bwd_ratio) {
  if (granularity_ < 1) {
    throw BadInput("granularity must be positive");
  }
  if (!(bwd_ratio_ >= 0.0) || !std::isfinite(bwd_ratio_)) {
    throw BadInput("bwd_ratio must be a finite non-negative number");
  }
  const Eigen::Vector4d coeffs = ctx_.AsVector();
  if (!coeffs.allFinite()) {
    throw BadInput("context coefficients must be finite");
  }
  base_ = TableToVector(granularity_, base_times, "base_times");
  max_len_ = base_.size() * granularity_;
  if (bwd_base_times) {
    bwd_base_ = TableToVector(granularity_, *bwd_base_times, "bwd_base_times");
    if (bwd_base_->size() != base_.size()) {
      throw BadInput("bwd_base_times must cover the same lengths as base_times");
    }
  }
}

double CostModel::base_ms(std::int64_t slice_len) const {
  return base_[slice_len / granularity_ - 1];
}

std::optional<double> CostModel::bwd_base_ms(std::int64_t slice_len) const {
  if (!bwd_base_) return std::nullopt;
  return (*bwd_base_)[slice_len / granularity_ - 1];
}

BaseTimeTable CostModel::base_times() const {
  return VectorToTable(granularity_, base_);
}

std::optional<BaseTimeTable> CostModel::bwd_base_times() const {
  if (!bwd_base_) return std::nullopt;
  return VectorToTable(granularity_, *bwd_base_);
}

bool CostModel::operator==(const CostModel& other) const {
  if (granularity_ != other.granularity_ || max_len_ != other.max_len_ ||
      !(ctx_ == other.ctx_) || bwd_ratio_ != other.bwd_ratio_ ||
      base_ != other.base_ ||
      bwd_base_.has_value() != other.bwd_base_.has_value()) {
    return false;
  }
  return !bwd_base_ || *bwd_base_ == *other.bwd_base_;
}

double Eval(const CostModel& model, std::int64_t slice_len,
            std::int64_t ctx_len, Mode mode) {
  const std::int64_t g = model.granularity();
  if (slice_len < g || slice_len % g != 0) {
    std::ostringstream msg;
    msg << "slice length " << slice_len << " is not a positive multiple of "
        << g;
    throw BadInput(msg.str());
  }
  if (ctx_len < 0) {
    throw BadInput("context length must be non-negative");
  }
  if (slice_len + ctx_len > model.max_len()) {
    std::ostringstream msg;
    msg << "slice " << slice_len << " with context " << ctx_len
        << " exceeds the model range " << model.max_len();
    throw BadInput(msg.str());
  }
  const double i = static_cast<double>(slice_len);
  const double j = static_cast<double>(ctx_len);
  const double overhead = model.ctx()(i, j);
  const double fwd = model.base_ms(slice_len) + overhead;
  double out = fwd;
  if (mode == Mode::kForwardBackward) {
    if (auto bwd_base = model.bwd_base_ms(slice_len)) {
      out = fwd + (*bwd_base + model.bwd_ratio() * overhead);
    } else {
      out = (1.0 + model.bwd_ratio()) * fwd;
    }
  }
  if (!(out > 0.0)) {
    std::ostringstream msg;
    msg << "model evaluates to non-positive latency " << out << " ms at slice "
        << slice_len << ", context " << ctx_len;
    throw BadInput(msg.str());
  }
  return out;
}

Eigen::MatrixXd LatencyGrid(const CostModel& model, std::int64_t seq_len,
                            Mode mode) {
  const std::int64_t g = model.granularity();
  if (seq_len < g || seq_len % g != 0) {
    throw BadInput("sequence length must be a positive multiple of the "
                   "granularity");
  }
  if (seq_len > model.max_len()) {
    std::ostringstream msg;
    msg << "sequence length " << seq_len << " exceeds the model range "
        << model.max_len();
    throw BadInput(msg.str());
  }
  const std::int64_t n = seq_len / g;
  Eigen::MatrixXd grid = Eigen::MatrixXd::Constant(
      n + 1, n + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::int64_t i = 1; i <= n; ++i) {
    for (std::int64_t j = 0; i + j <= n; ++j) {
      grid(i, j) = Eval(model, i * g, j * g, mode);
    }
  }
  return grid;
}

double MaxRelativeError(std::span<const Measurement> samples,
                        const BaseTimeTable& base_times,
                        const ContextCoeffs& coeffs) {
  double worst = 0.0;
  for (const Measurement& s : samples) {
    auto it = base_times.find(s.slice_len);
    if (it == base_times.end()) {
      throw BadInput("sample references slice length " +
                     std::to_string(s.slice_len) +
                     " missing from the base table");
    }
    const double predicted =
        it->second + coeffs(static_cast<double>(s.slice_len),
                            static_cast<double>(s.ctx_len));
    worst = std::max(worst, std::abs(predicted - s.latency_ms) / s.latency_ms);
  }
  return worst;
}

FitResult FitContext(std::span<const Measurement> samples,
                     const BaseTimeTable& base_times) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 4) {
    throw BadInput("rank-deficient design: need at least 4 samples, got " +
                   std::to_string(n));
  }
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd overhead(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Measurement& s = samples[r];
    auto it = base_times.find(s.slice_len);
    if (it == base_times.end()) {
      throw BadInput("sample references slice length " +
                     std::to_string(s.slice_len) +
                     " missing from the base table");
    }
    const double i = static_cast<double>(s.slice_len);
    const double j = static_cast<double>(s.ctx_len);
    design.row(r) << 1.0, i, j, i * j;
    overhead[r] = s.latency_ms - it->second;
  }

  // Rows are weighted by 1/latency so the fit minimizes relative residuals;
  // profiled latencies span orders of magnitude and their noise is
  // multiplicative. The i*j column also dwarfs the intercept, so columns are
  // equilibrated before factorizing.
  Eigen::VectorXd weight(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!(samples[r].latency_ms > 0.0)) {
      throw BadInput("sample latencies must be positive");
    }
    weight[r] = 1.0 / samples[r].latency_ms;
  }
  design = weight.asDiagonal() * design;
  overhead = overhead.cwiseProduct(weight);
  const Eigen::Vector4d scale = design.colwise().norm().transpose();
  if ((scale.array() == 0.0).any()) {
    throw BadInput("rank-deficient design: a regressor column is all zero");
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  if (qr.rank() < 4) {
    throw BadInput("rank-deficient design: the samples determine only " +
                   std::to_string(qr.rank()) +
                   " of 4 context coefficients");
  }
  const Eigen::Vector4d solution =
      qr.solve(overhead).cwiseQuotient(scale);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& sv = svd.singularValues();

  FitResult result;
  result.coeffs = ContextCoeffs::FromVector(solution);
  result.max_rel_error = MaxRelativeError(samples, base_times, result.coeffs);
  result.condition_number = sv[0] / sv[sv.size() - 1];
  return result;
}

CostModel SynthGpuModel(const SynthParams& p) {
  if (p.granularity < 1 || p.max_len < 1 || p.flat_until < 1) {
    throw BadInput("flat_until, granularity and max_len must be positive");
  }
  if (p.flat_until > p.max_len) {
    throw BadInput("flat_until must not exceed max_len");
  }
  if (!(p.flat_ms > 0.0)) {
    throw BadInput("flat_ms must be positive");
  }
  if (p.max_len % p.granularity != 0) {
    throw BadInput("max_len must be a multiple of the granularity");
  }
  BaseTimeTable base;
  for (std::int64_t len = p.granularity; len <= p.max_len;
       len += p.granularity) {
    base[len] = len <= p.flat_until
                    ? p.flat_ms
                    : p.flat_ms + p.per_token_ms *
                                      static_cast<double>(len - p.flat_until);
  }
  return CostModel(p.granularity, base, p.ctx, p.bwd_ratio);
}

CostModel ScaleModel(const CostModel& model, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw BadInput("scale factor must be positive and finite");
  }
  BaseTimeTable base = model.base_times();
  for (auto& [len, ms] : base) ms *= factor;
  std::optional<BaseTimeTable> bwd = model.bwd_base_times();
  if (bwd) {
    for (auto& [len, ms] : *bwd) ms *= factor;
  }
  const ContextCoeffs& c = model.ctx();
  ContextCoeffs scaled{c.a0 * factor, c.a1 * factor, c.a2 * factor,
                       c.a3 * factor};
  return CostModel(model.granularity(), base, scaled, model.bwd_ratio(), bwd);
}

}  // namespace terasched
