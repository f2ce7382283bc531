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

#include "terasched/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "terasched/batch_planner.hpp"
#include "terasched/cost_model_io.hpp"
#include "terasched/error.hpp"
#include "terasched/file_io.hpp"
#include "terasched/plan_io.hpp"
#include "terasched/scheme.hpp"
#include "terasched/simulator.hpp"

namespace terasched::cli {
namespace {

struct PlanFlags {
  int stages = 1;
  std::int64_t seq_len = 0;      // 0: the model's max_len
  std::int64_t granularity = 0;  // 0: the model's granularity
  double epsilon = 0.1;
  std::string mode = "fwd";

  void Register(CLI::App* cmd) {
    cmd->add_option("--stages,-K", stages, "Pipeline stages K")
        ->capture_default_str();
    cmd->add_option("--seq-len,-L", seq_len,
                    "Sequence length in tokens (default: model max_len)");
    cmd->add_option("--granularity,-g", granularity,
                    "Tokens per DP unit (default: the model's)");
    cmd->add_option("--epsilon", epsilon, "Minimum t_max spacing in ms")
        ->capture_default_str();
    cmd->add_option("--mode", mode, "fwd or fwd+bwd")->capture_default_str();
  }

  PlanConfig Resolve(const CostModel& model) const {
    PlanConfig cfg;
    cfg.stages = stages;
    cfg.seq_len = seq_len == 0 ? model.max_len() : seq_len;
    cfg.granularity = granularity == 0 ? model.granularity() : granularity;
    cfg.epsilon = epsilon;
    cfg.mode = ParseMode(mode);
    ValidateConfig(cfg, model);
    return cfg;
  }
};

std::string Real(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

template <typename T>
T ParseNumber(std::string_view text, const char* what) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw BadInput(std::string("cannot parse ") + what + " '" +
                   std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> SplitList(std::string_view text) {
  std::vector<std::string_view> parts;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view part = text.substr(0, comma);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (!part.empty()) parts.push_back(part);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return parts;
}

// "1:1.0,2:1.4"
BatchFactorTable ParseFactors(std::string_view text) {
  BatchFactorTable table;
  for (std::string_view item : SplitList(text)) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw BadInput("batch factor '" + std::string(item) +
                     "' is not of the form b:factor");
    }
    table[ParseNumber<std::int64_t>(item.substr(0, colon), "batch size")] =
        ParseNumber<double>(item.substr(colon + 1), "batch factor");
  }
  return table;
}

template <typename T>
std::vector<T> ParseList(std::string_view text, const char* what) {
  std::vector<T> out;
  for (std::string_view item : SplitList(text)) {
    out.push_back(ParseNumber<T>(item, what));
  }
  return out;
}

OptimizeOptions PlannerOptions() {
  OptimizeOptions options;
  options.threads = ThreadsFromEnv();
  return options;
}

void Emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    WriteTextFile(path, text);
  }
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string measurements;
  std::string base;
  std::string out;
  std::int64_t granularity = 8;
  double bwd_ratio = 2.0;
};

int CmdFit(const FitArgs& a, std::ostream& out) {
  const std::vector<Measurement> samples = LoadMeasurements(a.measurements);
  const BaseTimeTable base = LoadBaseTimes(a.base);
  const FitResult fit = FitContext(samples, base);
  const CostModel model(a.granularity, base, fit.coeffs, a.bwd_ratio);
  SaveModel(model, a.out);
  out << "samples: " << samples.size() << "\n"
      << "ctx: a0=" << Real(fit.coeffs.a0) << " a1=" << Real(fit.coeffs.a1)
      << " a2=" << Real(fit.coeffs.a2) << " a3=" << Real(fit.coeffs.a3) << "\n"
      << "condition number: " << Real(fit.condition_number) << "\n"
      << "max relative error: " << Real(fit.max_rel_error) << "\n";
  return kOk;
}

struct SynthArgs {
  SynthParams params;
  std::string out;
  std::string measurements_out;
  std::string base_out;
  int grid_points = 8;
  double noise = 0.0;
  std::uint64_t seed = 1;
};

int CmdSynth(const SynthArgs& a, std::ostream& out) {
  const CostModel model = SynthGpuModel(a.params);
  if (!a.out.empty()) SaveModel(model, a.out);
  if (!a.base_out.empty()) {
    WriteTextFile(a.base_out, BaseTimesToCsv(model.base_times()));
  }
  if (!a.measurements_out.empty()) {
    const auto samples = SampleGrid(model, a.grid_points, a.noise, a.seed);
    WriteTextFile(a.measurements_out, MeasurementsToCsv(samples));
  }
  if (a.out.empty()) out << ModelToJson(model).dump(2) << "\n";
  return kOk;
}

struct PlanArgs {
  std::string model;
  PlanFlags flags;
  std::string scheme;
  std::string out;
};

int CmdPlan(const PlanArgs& a, std::ostream& out) {
  const CostModel model = LoadModel(a.model);
  PlanDocument doc;
  doc.config = a.flags.Resolve(model);
  doc.plan = a.scheme.empty()
                 ? Optimize(model, doc.config, PlannerOptions())
                 : EvaluateScheme(model, doc.config, ParseScheme(a.scheme));
  const std::string json = PlanToJson(doc).dump(2) + "\n";
  Emit(json, a.out, out);
  if (!a.out.empty()) {
    out << "scheme: " << FormatScheme(doc.plan.scheme) << "\n"
        << "slices: " << doc.plan.scheme.size() << "\n"
        << "t_max_ms: " << Real(doc.plan.t_max_ms) << "\n"
        << "predicted_ms: " << Real(doc.plan.predicted_ms) << "\n";
  }
  return kOk;
}

struct SimulateArgs {
  std::string plan;
  std::string model;
  std::string scheme;
  PlanFlags flags;
  bool stages_given = false;
  std::string out;
  std::string svg;
};

int CmdSimulate(const SimulateArgs& a, std::ostream& out) {
  std::vector<double> durations;
  int stages = a.flags.stages;
  std::optional<double> predicted;
  if (!a.plan.empty()) {
    if (!a.scheme.empty()) {
      throw BadInput("give either a plan file or --scheme, not both");
    }
    const PlanDocument doc = LoadPlan(a.plan);
    durations = doc.plan.per_slice_ms;
    if (!a.stages_given) stages = doc.config.stages;
    if (stages == doc.config.stages) predicted = doc.plan.predicted_ms;
  } else {
    if (a.model.empty() || a.scheme.empty()) {
      throw BadInput("simulate needs a plan file, or --model with --scheme");
    }
    const CostModel model = LoadModel(a.model);
    const SlicingScheme scheme = ParseScheme(a.scheme);
    PlanFlags flags = a.flags;
    if (flags.seq_len == 0) flags.seq_len = scheme.total();
    const PlanConfig cfg = flags.Resolve(model);
    const PlanResult plan = EvaluateScheme(model, cfg, scheme);
    durations = plan.per_slice_ms;
    predicted = plan.predicted_ms;
  }
  if (stages < 1) {
    throw BadInput("stage count must be at least 1, got " +
                   std::to_string(stages));
  }
  const Timeline tl = Simulate(durations, stages);
  Emit(TimelineToJson(tl).dump(2) + "\n", a.out, out);
  if (!a.svg.empty()) RenderTimeline(tl, a.svg);
  if (!a.out.empty()) {
    out << "events: " << tl.events.size() << "\n"
        << "makespan_ms: " << Real(tl.makespan_ms) << "\n";
    if (predicted) out << "predicted_ms: " << Real(*predicted) << "\n";
  }
  return kOk;
}

struct SweepArgs {
  std::string model;
  PlanFlags flags;
  std::string slices;
  std::string out;
};

int CmdSweep(const SweepArgs& a, std::ostream& out) {
  const CostModel model = LoadModel(a.model);
  const PlanConfig cfg = a.flags.Resolve(model);
  std::vector<std::int64_t> counts;
  if (a.slices.empty()) {
    const std::int64_t units = cfg.seq_len / cfg.granularity;
    for (std::int64_t d = 1; d <= units; d *= 2) {
      if (units % d == 0) counts.push_back(d);
    }
  } else {
    counts = ParseList<std::int64_t>(a.slices, "slice count");
  }
  const SweepReport report = BuildSweep(model, cfg, counts, PlannerOptions());
  const std::string csv = SweepToCsv(report);
  Emit(csv, a.out, out);
  if (!a.out.empty()) out << csv;
  return kOk;
}

struct BatchArgs {
  std::string model;
  PlanFlags flags;
  std::int64_t batch = 1;
  std::string factors;
  std::string costs;
  std::string out;
};

int CmdBatchPlan(const BatchArgs& a, std::ostream& out) {
  const CostModel model = LoadModel(a.model);
  BatchPlanDocument doc;
  doc.config = a.flags.Resolve(model);
  doc.batch = a.batch;
  JointPlanOptions options;
  options.optimize = PlannerOptions();
  if (!a.factors.empty()) options.factors = ParseFactors(a.factors);
  if (!a.costs.empty()) options.cost_override = ParseList<double>(a.costs, "T_b");
  doc.plan = JointPlan(model, doc.config, a.batch, options);
  Emit(BatchPlanToJson(doc).dump(2) + "\n", a.out, out);
  if (!a.out.empty()) {
    out << FormatBatchEntries(doc.plan.entries) << "\n"
        << "total_latency_ms: " << Real(doc.plan.total_latency_ms) << "\n";
  }
  return kOk;
}

}  // namespace

int ThreadsFromEnv() {
  const char* env = std::getenv("TERASCHED_THREADS");
  if (env == nullptr) return 0;
  int value = 0;
  const std::string_view text(env);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    return 0;
  }
  return value;
}

std::vector<Measurement> SampleGrid(const CostModel& model, int points,
                                    double noise, std::uint64_t seed) {
  if (points < 2) throw BadInput("sample grid needs at least 2 points");
  if (!(noise >= 0.0) || noise >= 1.0) {
    throw BadInput("noise must lie in [0, 1)");
  }
  const std::int64_t g = model.granularity();
  const std::int64_t half = std::max<std::int64_t>(1, model.max_units() / 2);
  if (half < points) {
    throw BadInput("model range is too small for a " + std::to_string(points) +
                   "-point grid");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(1.0 - noise, 1.0 + noise);
  std::vector<Measurement> out;
  for (int a = 0; a < points; ++a) {
    const std::int64_t slice = g * (1 + a * (half - 1) / (points - 1));
    for (int b = 0; b < points; ++b) {
      const std::int64_t ctx = g * (b * half / (points - 1));
      double latency = Eval(model, slice, ctx, Mode::kForward);
      if (noise > 0.0) latency *= jitter(rng);
      out.push_back({slice, ctx, latency});
    }
  }
  return out;
}

SweepReport BuildSweep(const CostModel& model, const PlanConfig& cfg,
                       std::span<const std::int64_t> slice_counts,
                       const OptimizeOptions& options) {
  ValidateConfig(cfg, model);
  const PlanResult single =
      EvaluateScheme(model, cfg, UniformScheme(cfg.seq_len, 1, cfg.granularity));
  auto row = [&](std::string label, const PlanResult& plan) {
    SweepRow r;
    r.scheme_label = std::move(label);
    r.num_slices = static_cast<std::int64_t>(plan.scheme.size());
    r.predicted_ms = plan.predicted_ms;
    r.simulated_ms = Simulate(plan.per_slice_ms, cfg.stages).makespan_ms;
    r.speedup_vs_single_slice = single.predicted_ms / plan.predicted_ms;
    return r;
  };
  SweepReport report;
  for (std::int64_t d : slice_counts) {
    const SlicingScheme scheme = UniformScheme(cfg.seq_len, d, cfg.granularity);
    report.rows.push_back(
        row("uniform-" + std::to_string(d), EvaluateScheme(model, cfg, scheme)));
  }
  report.rows.push_back(row("dp", Optimize(model, cfg, options)));
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const SweepRow& x, const SweepRow& y) {
                     return x.num_slices < y.num_slices;
                   });
  return report;
}

std::string SweepToCsv(const SweepReport& report) {
  std::ostringstream out;
  out << "scheme_label,num_slices,predicted_ms,simulated_ms,"
         "speedup_vs_single_slice\n";
  for (const SweepRow& r : report.rows) {
    out << r.scheme_label << ',' << r.num_slices << ',' << Real(r.predicted_ms)
        << ',' << Real(r.simulated_ms) << ','
        << Real(r.speedup_vs_single_slice) << '\n';
  }
  return out.str();
}

SweepReport ParseSweepCsv(std::istream& in, std::string_view source) {
  static constexpr std::string_view kHeader =
      "scheme_label,num_slices,predicted_ms,simulated_ms,"
      "speedup_vs_single_slice";
  SweepReport report;
  std::string line;
  int line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw BadInput(std::string(source) + ":" + std::to_string(line_no) +
                     ": " + what);
    };
    if (!seen_header) {
      if (line != kHeader) fail("expected header '" + std::string(kHeader) + "'");
      seen_header = true;
      continue;
    }
    const auto fields = SplitList(line);
    if (fields.size() != 5) fail("expected 5 fields");
    try {
      report.rows.push_back(
          {std::string(fields[0]),
           ParseNumber<std::int64_t>(fields[1], "num_slices"),
           ParseNumber<double>(fields[2], "predicted_ms"),
           ParseNumber<double>(fields[3], "simulated_ms"),
           ParseNumber<double>(fields[4], "speedup_vs_single_slice")});
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  if (!seen_header) {
    throw BadInput(std::string(source) + ": missing header");
  }
  return report;
}

int Run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Token-level pipeline slicing planner"};
  app.name(args.empty() ? "terasched" : args[0]);
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the context-overhead model");
  fit_cmd->add_option("measurements", fit.measurements, "Measurements CSV")
      ->required();
  fit_cmd->add_option("base", fit.base, "Context-free latency CSV")->required();
  fit_cmd->add_option("-o,--out", fit.out, "Output model JSON")->required();
  fit_cmd->add_option("--granularity,-g", fit.granularity)->capture_default_str();
  fit_cmd->add_option("--bwd-ratio", fit.bwd_ratio)->capture_default_str();

  SynthArgs synth;
  auto* synth_cmd =
      app.add_subcommand("synth-model", "Write a synthetic GPU-like model");
  synth_cmd->add_option("-o,--out", synth.out, "Output model JSON");
  synth_cmd->add_option("--flat-until", synth.params.flat_until)
      ->capture_default_str();
  synth_cmd->add_option("--flat-ms", synth.params.flat_ms)->capture_default_str();
  synth_cmd->add_option("--per-token-ms", synth.params.per_token_ms)
      ->capture_default_str();
  synth_cmd->add_option("--a0", synth.params.ctx.a0)->capture_default_str();
  synth_cmd->add_option("--a1", synth.params.ctx.a1)->capture_default_str();
  synth_cmd->add_option("--a2", synth.params.ctx.a2)->capture_default_str();
  synth_cmd->add_option("--a3", synth.params.ctx.a3)->capture_default_str();
  synth_cmd->add_option("--granularity,-g", synth.params.granularity)
      ->capture_default_str();
  synth_cmd->add_option("--max-len", synth.params.max_len)->capture_default_str();
  synth_cmd->add_option("--bwd-ratio", synth.params.bwd_ratio)
      ->capture_default_str();
  synth_cmd->add_option("--measurements-out", synth.measurements_out,
                        "Also write grid samples as a measurements CSV");
  synth_cmd->add_option("--base-out", synth.base_out,
                        "Also write the base curve as CSV");
  synth_cmd->add_option("--grid", synth.grid_points, "Grid points per axis")
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise,
                        "Multiplicative uniform noise on samples")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Compute an optimal slicing");
  plan_cmd->add_option("model", plan.model, "Cost model JSON")->required();
  plan.flags.Register(plan_cmd);
  plan_cmd->add_option("--scheme", plan.scheme,
                       "Score this scheme instead of optimizing");
  plan_cmd->add_option("-o,--out", plan.out, "Output plan JSON");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a pipeline");
  sim_cmd->add_option("plan", sim.plan, "Plan JSON");
  sim_cmd->add_option("--model", sim.model, "Cost model JSON (with --scheme)");
  sim_cmd->add_option("--scheme", sim.scheme, "Slicing scheme notation");
  sim.flags.Register(sim_cmd);
  sim_cmd->add_option("-o,--out", sim.out, "Output timeline JSON");
  sim_cmd->add_option("--svg", sim.svg, "Output SVG Gantt chart");

  SweepArgs sweep;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Compare uniform slicings with the DP plan");
  sweep_cmd->add_option("model", sweep.model, "Cost model JSON")->required();
  sweep.flags.Register(sweep_cmd);
  sweep_cmd->add_option("--slices", sweep.slices,
                        "Comma-separated uniform slice counts");
  sweep_cmd->add_option("-o,--out", sweep.out, "Output report CSV");

  BatchArgs batch;
  auto* batch_cmd = app.add_subcommand(
      "batch-plan", "Jointly slice the batch and token dimensions");
  batch_cmd->add_option("model", batch.model, "Cost model JSON")->required();
  batch_cmd->add_option("--batch,-B", batch.batch, "Sequences per minibatch")
      ->required();
  batch.flags.Register(batch_cmd);
  batch_cmd->add_option("--batch-factors", batch.factors,
                        "Per-b latency factors, e.g. 1:1.0,2:1.4");
  batch_cmd->add_option("--batch-costs", batch.costs,
                        "Override T_1..T_B, comma-separated ms");
  batch_cmd->add_option("-o,--out", batch.out, "Output batch plan JSON");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("terasched");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadInput;
  }
  sim.stages_given = sim_cmd->get_option("--stages")->count() > 0;

  try {
    if (*fit_cmd) return CmdFit(fit, out);
    if (*synth_cmd) return CmdSynth(synth, out);
    if (*plan_cmd) return CmdPlan(plan, out);
    if (*sim_cmd) return CmdSimulate(sim, out);
    if (*sweep_cmd) return CmdSweep(sweep, out);
    if (*batch_cmd) return CmdBatchPlan(batch, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}

}  // namespace terasched::cli
