// Copyright 2026 The scenq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include "scenq/criteria.hpp"
#include "scenq/error.hpp"
#include "scenq/kin_sim.hpp"
#include "scenq/manifest.hpp"
#include "scenq/metrics_macro.hpp"
#include "scenq/metrics_micro.hpp"
#include "scenq/metrics_nano.hpp"
#include "scenq/scenario.hpp"
#include "scenq/trace.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace scenq::cli
{

namespace fs = std::filesystem;

namespace
{

struct GlobalOptions
{
  std::string out{"."};
  unsigned jobs{std::max(1u, std::thread::hardware_concurrency())};
  std::string format{"csv"};
};

void setup_logging()
{
  static bool done = false;
  if (!done) {
    auto logger = spdlog::stderr_color_mt("scenq");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    done = true;
  }
  const char * env = std::getenv("SCENQ_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError(fmt::format("cannot open '{}'", path));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string & path)
{
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception & e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

std::string sanitize(const std::string & name)
{
  std::string out = name;
  for (char & c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') {
      c = '_';
    }
  }
  return out;
}

// Collects outputs and writes the manifest at the end of a command.
class RunContext
{
public:
  RunContext(std::string command, const GlobalOptions & global)
  : out_dir_(global.out)
  {
    manifest_.command = std::move(command);
    manifest_.started = utc_timestamp();
    fs::create_directories(out_dir_);
  }

  void add_input(const std::string & path) { manifest_.inputs.push_back(path); }
  void add_config_bytes(const std::string & bytes) { config_bytes_ += bytes; }

  fs::path path(const std::string & relative) const { return out_dir_ / relative; }

  void write(const std::string & relative, const std::string & content)
  {
    const fs::path p = path(relative);
    if (p.has_parent_path()) {
      fs::create_directories(p.parent_path());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) {
      throw InputError(fmt::format("cannot write '{}'", p.string()));
    }
    out << content;
    note_output(p);
  }

  /// Outputs are recorded relative to the output directory.
  void note_output(const fs::path & p)
  {
    manifest_.outputs.push_back(p.lexically_relative(out_dir_).generic_string());
  }

  /// Manifest without timestamps, for embedding in reports.
  RunManifest provenance()
  {
    manifest_.config_hash = content_digest(config_bytes_);
    return manifest_;
  }

  void finish()
  {
    manifest_.config_hash = content_digest(config_bytes_);
    manifest_.finished = utc_timestamp();
    const fs::path p = path("manifest.json");
    std::ofstream out(p, std::ios::binary);
    out << to_json(manifest_).dump(2) << '\n';
  }

private:
  fs::path out_dir_;
  RunManifest manifest_;
  std::string config_bytes_;
};

bool is_trace_file(const fs::path & p)
{
  const auto ext = p.extension().string();
  return fs::is_regular_file(p) && (ext == ".csv" || ext == ".jsonl");
}

std::vector<fs::path> expand_trace_paths(const std::vector<std::string> & inputs)
{
  std::vector<fs::path> out;
  for (const auto & in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto & entry : fs::directory_iterator(p)) {
        if (is_trace_file(entry.path())) {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (is_trace_file(p)) {
      out.push_back(p);
    } else {
      throw InputError(fmt::format("no trace file or directory '{}'", in));
    }
  }
  if (out.empty()) {
    throw InputError("no trace files found");
  }
  return out;
}

std::vector<Trace> load_traces(const std::vector<fs::path> & paths, unsigned jobs)
{
  std::vector<Trace> traces(paths.size());
  std::vector<std::string> errors(paths.size());
  std::vector<std::thread> workers;
  std::atomic<std::size_t> next{0};
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(paths.size())));
  for (unsigned w = 0; w < n; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < paths.size(); i = next++) {
        try {
          traces[i] = load_trace_file(paths[i]);
        } catch (const std::exception & e) {
          errors[i] = e.what();
        }
      }
    });
  }
  for (auto & t : workers) {
    t.join();
  }
  for (const auto & e : errors) {
    if (!e.empty()) {
      throw InputError(e);
    }
  }
  return traces;
}

std::string csv_value(const ScalarResult & r)
{
  return r.defined ? format_number(r.value) : "";
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions
{
  std::string logical;
  std::string config;
};

int cmd_simulate(const SimulateOptions & opt, const GlobalOptions & global)
{
  const TraceFormat format = trace_format_from_string(global.format);
  const LogicalScenario logical = load_logical_scenario(opt.logical);
  kin_sim::SimConfig config = kin_sim::SimConfig::defaults();
  std::string config_bytes = read_file(opt.logical);
  if (!opt.config.empty()) {
    config = kin_sim::load_config(opt.config);
    config_bytes += read_file(opt.config);
  } else {
    config_bytes += kin_sim::to_json(config).dump();
  }
  kin_sim::check_config(config);

  RunContext ctx("simulate", global);
  ctx.add_input(opt.logical);
  if (!opt.config.empty()) {
    ctx.add_input(opt.config);
  }
  ctx.add_config_bytes(config_bytes);

  spdlog::info("simulating {} scenarios of '{}'", grid_size(logical), logical.scenario_id);
  const auto outcomes = kin_sim::simulate_batch(logical, config, global.jobs);
  const std::size_t width = std::to_string(std::max<std::size_t>(outcomes.size(), 1) - 1).size();
  const std::string ext = format == TraceFormat::csv ? ".csv" : ".jsonl";

  std::string concrete_lines;
  std::size_t collided = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto & o = outcomes[i];
    const std::string stem =
      fmt::format("{}_{:0{}}", sanitize(logical.scenario_id), i, width);
    const fs::path p = ctx.path(stem + ext);
    save_trace_file(p, o.trace, format);
    ctx.note_output(p);
    ctx.note_output(meta_path_for(p));
    concrete_lines += to_json(concrete_at(logical, i)).dump() + "\n";
    collided += o.collided ? 1 : 0;
  }
  ctx.write("scenarios/concrete.jsonl", concrete_lines);
  spdlog::info("wrote {} traces, {} with contact", outcomes.size(), collided);
  ctx.finish();
  return kExitPass;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions
{
  std::vector<std::string> traces;
  std::vector<std::string> suites;
  std::string logical;
  bool emit_plot_data{false};
};

void write_plot_data(
  RunContext & ctx, const std::vector<Trace> & traces, const EvaluationReport & report)
{
  // One CSV per (scalar metric, swept parameter).
  std::map<std::string, const Trace *> by_id;
  std::set<std::string> params;
  for (const auto & t : traces) {
    by_id[t.scenario_id] = &t;
    for (const auto & [key, value] : t.metadata) {
      if (key.rfind("param.", 0) == 0) {
        params.insert(key.substr(6));
      }
    }
  }
  std::map<std::string, std::vector<const ScalarResult *>> by_metric;
  for (const auto & s : report.scalars) {
    const auto it = s.context.find("scenario_id");
    if (it != s.context.end() && by_id.count(it->second)) {
      by_metric[s.metric_name].push_back(&s);
    }
  }
  for (const auto & [metric, results] : by_metric) {
    for (const auto & param : params) {
      std::string csv = "param_value,metric_value,scenario_id\n";
      for (const auto * r : results) {
        const std::string & id = r->context.at("scenario_id");
        const auto & md = by_id.at(id)->metadata;
        const auto it = md.find("param." + param);
        if (it == md.end()) {
          continue;
        }
        csv += fmt::format("{},{},{}\n", it->second, csv_value(*r), id);
      }
      ctx.write(fmt::format("plots/{}_vs_{}.csv", sanitize(metric), sanitize(param)), csv);
    }
  }
}

int cmd_evaluate(const EvaluateOptions & opt, const GlobalOptions & global)
{
  RunContext ctx("evaluate", global);
  std::vector<SuiteEntry> suite;
  for (const auto & path : opt.suites) {
    ctx.add_input(path);
    ctx.add_config_bytes(read_file(path));
    auto part = load_suite(path);
    std::move(part.begin(), part.end(), std::back_inserter(suite));
  }
  std::set<std::string> ids;
  for (const auto & e : suite) {
    if (!ids.insert(e.criterion.criterion_id).second) {
      throw InputError(fmt::format("duplicate criterion id '{}'", e.criterion.criterion_id));
    }
  }
  if (!opt.logical.empty()) {
    ctx.add_input(opt.logical);
    ctx.add_config_bytes(read_file(opt.logical));
    const nlohmann::json logical = to_json(load_logical_scenario(opt.logical));
    for (auto & e : suite) {
      if (e.criterion.metric.name == "parameter_coverage") {
        e.criterion.metric.params["logical"] = logical;
      }
    }
  }

  const auto paths = expand_trace_paths(opt.traces);
  for (const auto & t : opt.traces) {
    ctx.add_input(t);
  }
  spdlog::info("loading {} traces", paths.size());
  const std::vector<Trace> traces = load_traces(paths, global.jobs);

  // Cells in order of first appearance in the suite.
  std::vector<std::pair<Perspective, Level>> order;
  std::map<std::pair<Perspective, Level>, std::vector<QualityCriterion>> groups;
  for (const auto & e : suite) {
    const auto key = std::make_pair(e.perspective, e.level);
    if (!groups.count(key)) {
      order.push_back(key);
    }
    groups[key].push_back(e.criterion);
  }
  EvaluationReport report;
  for (const auto & key : order) {
    spdlog::info("evaluating {} criteria at ({}, {})", groups[key].size(), to_string(key.first), to_string(key.second));
    report.merge(evaluate_suite(groups[key], traces, key.first, key.second, global.jobs));
  }

  // Per-step series of the nanoscopic criteria.
  const auto & registry = MetricRegistry::builtin();
  for (const auto & e : suite) {
    if (e.level != Level::nanoscopic) {
      continue;
    }
    for (const auto & trace : traces) {
      const MetricSeries series = registry.series(e.criterion.metric, trace);
      std::ostringstream csv;
      write_series_csv(csv, series);
      const std::string stem =
        fmt::format("series/{}/{}", sanitize(e.criterion.criterion_id), sanitize(trace.scenario_id));
      ctx.write(stem + ".csv", csv.str());
      ctx.write(stem + ".json", series_header_json(series, e.criterion.metric.params).dump(2) + "\n");
    }
  }

  std::string scalars;
  for (const auto & s : report.scalars) {
    scalars += to_json(s).dump() + "\n";
  }
  ctx.write("scalars.jsonl", scalars);
  if (opt.emit_plot_data) {
    write_plot_data(ctx, traces, report);
  }
  const fs::path report_path = ctx.path("report.json");
  ctx.note_output(report_path);
  report.provenance = ctx.provenance();
  {
    std::ofstream out(report_path, std::ios::binary);
    out << to_json(report).dump(2) << '\n';
  }
  ctx.finish();

  for (const auto & [key, cell] : report.matrix_cells) {
    spdlog::info(
      "({}, {}): {} verdicts, pass rate {}", to_string(key.first), to_string(key.second),
      cell.verdicts.size(), cell.pass_rate ? format_number(*cell.pass_rate) : "n/a");
  }
  return report.any_fail() ? kExitFail : kExitPass;
}

// ---------------------------------------------------------------------------
// compare

struct CompareOptions
{
  std::string reference;
  std::vector<std::string> runs;
  std::vector<std::string> actors;
  double threshold{macro::kDefaultDtwThreshold};
};

int cmd_compare(const CompareOptions & opt, const GlobalOptions & global)
{
  RunContext ctx("compare", global);
  ctx.add_input(opt.reference);
  for (const auto & r : opt.runs) {
    ctx.add_input(r);
  }
  ctx.add_config_bytes(fmt::format("threshold={};actors={}", format_number(opt.threshold), fmt::join(opt.actors, ",")));
  const Trace reference = load_trace_file(opt.reference);
  const std::vector<Trace> runs = load_traces(expand_trace_paths(opt.runs), global.jobs);

  std::vector<std::string> actors = opt.actors;
  if (actors.empty()) {
    std::set<std::string> ref_ids;
    for (const auto & [id, track] : reference.tracks) {
      ref_ids.insert(id);
      actors.push_back(id);
    }
    for (const auto & run : runs) {
      std::set<std::string> ids;
      for (const auto & [id, track] : run.tracks) {
        ids.insert(id);
      }
      if (ids != ref_ids) {
        throw InputError(fmt::format(
          "run '{}' has actors [{}], reference has [{}]", run.scenario_id, fmt::join(ids, ","),
          fmt::join(ref_ids, ",")));
      }
    }
  }
  const auto report = macro::repeatability_report(reference, runs, actors, opt.threshold);
  ctx.write("repeatability.json", to_json(report).dump(2) + "\n");
  ctx.finish();
  for (const auto & e : report.entries) {
    if (!e.within_threshold) {
      spdlog::warn("{} / {}: dtw {} m exceeds {} m", e.run_id, e.actor_id, format_number(e.dtw_distance), format_number(report.threshold));
    }
  }
  return report.all_within() ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions
{
  std::string sweep;
  std::string config;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<double> step;
  std::optional<double> gap_factor;
};

struct SweepMetric
{
  MetricSpec spec;
  AggregateOp op{AggregateOp::min};
  std::string label;
};

int cmd_sweep(const SweepOptions & opt, const GlobalOptions & global)
{
  const nlohmann::json doc = read_json(opt.sweep);
  LogicalScenario logical;
  std::vector<SweepMetric> metrics;
  double gap_factor = macro::kDefaultGapFactor;
  try {
    logical = logical_from_json(doc.at("logical"));
    for (const auto & m : doc.at("metrics")) {
      SweepMetric sm;
      sm.spec.name = m.at("name").get<std::string>();
      sm.spec.actors = m.value("actors", std::vector<std::string>{});
      sm.spec.params = m.value("params", nlohmann::json::object());
      sm.op = aggregate_op_from_string(m.value("aggregate", "min"));
      sm.label = fmt::format("{}_{}", to_string(sm.op), sm.spec.name);
      if (MetricRegistry::builtin().info(sm.spec.name).arity != MetricArity::series) {
        throw InputError(fmt::format("sweep metric '{}' must be a per-step series", sm.spec.name));
      }
      metrics.push_back(std::move(sm));
    }
    gap_factor = doc.value("gap_factor", gap_factor);
  } catch (const nlohmann::json::exception & e) {
    throw InputError(fmt::format("{}: {}", opt.sweep, e.what()));
  }
  if (logical.parameters.size() != 1) {
    throw InputError("a sweep varies exactly one parameter");
  }
  auto & range = logical.parameters.front();
  range.min = opt.min.value_or(range.min);
  range.max = opt.max.value_or(range.max);
  range.step = opt.step.value_or(range.step);
  gap_factor = opt.gap_factor.value_or(gap_factor);
  check_logical(logical);
  if (metrics.empty()) {
    throw InputError("sweep lists no metrics");
  }

  kin_sim::SimConfig config = kin_sim::SimConfig::defaults();
  std::string config_bytes = to_json(logical).dump() + fmt::format("gap_factor={}", format_number(gap_factor));
  for (const auto & m : metrics) {
    config_bytes += m.label;
  }
  if (!opt.config.empty()) {
    config = kin_sim::load_config(opt.config);
    config_bytes += read_file(opt.config);
  } else {
    config_bytes += kin_sim::to_json(config).dump();
  }

  RunContext ctx("sweep", global);
  ctx.add_input(opt.sweep);
  if (!opt.config.empty()) {
    ctx.add_input(opt.config);
  }
  ctx.add_config_bytes(config_bytes);

  spdlog::info("sweeping {} over {} values", range.name, range.count());
  const auto outcomes = kin_sim::simulate_batch(logical, config, global.jobs);
  const auto & registry = MetricRegistry::builtin();

  std::vector<std::vector<SweepPoint>> points(metrics.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      ScalarResult r = micro::aggregate(registry.series(metrics[m].spec, outcomes[i].trace), metrics[m].op);
      r.context["scenario_id"] = outcomes[i].trace.scenario_id;
      points[m].push_back({range.value(i), std::move(r)});
    }
  }

  std::string table = "param_value";
  for (const auto & m : metrics) {
    table += "," + m.label;
  }
  table += "\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    table += format_number(range.value(i));
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      table += "," + csv_value(points[m][i].result);
    }
    table += "\n";
  }
  ctx.write("sweep.csv", table);

  nlohmann::json gaps{{"parameter", range.name}, {"gap_factor", gap_factor}, {"metrics", nlohmann::json::array()}};
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    std::string plot = "param_value,metric_value\n";
    for (const auto & p : points[m]) {
      plot += fmt::format("{},{}\n", format_number(p.param_value), csv_value(p.result));
    }
    ctx.write(fmt::format("plots/{}_vs_{}.csv", metrics[m].label, sanitize(range.name)), plot);

    nlohmann::json entry{{"metric", metrics[m].label}};
    try {
      nlohmann::json findings = nlohmann::json::array();
      for (const auto & f : macro::detect_result_gaps(range.name, points[m], gap_factor)) {
        findings.push_back(to_json(f));
        spdlog::info("{}: gap between {} and {}", metrics[m].label, format_number(f.left_value), format_number(f.right_value));
      }
      entry["findings"] = findings;
    } catch (const InputError & e) {
      // Too few defined points is a property of the data, not of the input.
      entry["findings"] = nlohmann::json::array();
      entry["note"] = e.what();
    }
    gaps["metrics"].push_back(entry);
  }
  ctx.write("gaps.json", gaps.dump(2) + "\n");
  ctx.finish();
  return kExitPass;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const std::vector<std::string> & inputs, const GlobalOptions & global)
{
  RunContext ctx("report", global);
  struct Counts
  {
    std::size_t pass{0};
    std::size_t fail{0};
    std::size_t score{0};
    std::size_t not_applicable{0};
  };
  std::map<std::pair<Perspective, Level>, Counts> cells;
  for (const auto & path : inputs) {
    ctx.add_input(path);
    const nlohmann::json doc = read_json(path);
    ctx.add_config_bytes(doc.dump());
    try {
      for (const auto & cell : doc.at("matrix_cells")) {
        const auto key = std::make_pair(
          perspective_from_string(cell.at("perspective").get<std::string>()),
          level_from_string(cell.at("level").get<std::string>()));
        auto & c = cells[key];
        for (const auto & v : cell.at("verdicts")) {
          const auto outcome = v.at("outcome").get<std::string>();
          if (outcome == "pass") {
            ++c.pass;
          } else if (outcome == "fail") {
            ++c.fail;
          } else if (outcome == "score") {
            ++c.score;
          } else {
            ++c.not_applicable;
          }
        }
      }
    } catch (const nlohmann::json::exception & e) {
      throw InputError(fmt::format("{}: not an evaluation report ({})", path, e.what()));
    }
  }

  std::string csv = "perspective,level,pass,fail,score,not_applicable,pass_rate\n";
  std::string text = fmt::format("{:<12} {:<12} {:>6} {:>6} {:>6} {:>6} {:>10}\n", "perspective", "level", "pass", "fail", "score", "n/a", "pass_rate");
  bool any_fail = false;
  for (const Perspective p : {Perspective::simulation, Perspective::sut, Perspective::scenario}) {
    for (const Level l : {Level::nanoscopic, Level::microscopic, Level::macroscopic}) {
      const auto it = cells.find({p, l});
      const Counts c = it == cells.end() ? Counts{} : it->second;
      const std::string rate =
        c.pass + c.fail ? format_number(static_cast<double>(c.pass) / static_cast<double>(c.pass + c.fail)) : "";
      csv += fmt::format("{},{},{},{},{},{},{}\n", to_string(p), to_string(l), c.pass, c.fail, c.score, c.not_applicable, rate);
      text += fmt::format(
        "{:<12} {:<12} {:>6} {:>6} {:>6} {:>6} {:>10}\n", to_string(p), to_string(l), c.pass, c.fail,
        c.score, c.not_applicable, rate.empty() ? "-" : rate);
      any_fail = any_fail || c.fail > 0;
    }
  }
  ctx.write("matrix.csv", csv);
  ctx.write("summary.txt", text);
  ctx.finish();
  std::cout << text;
  return any_fail ? kExitFail : kExitPass;
}

}  // namespace

int run(const std::vector<std::string> & args)
{
  setup_logging();
  CLI::App app{"scenario quality metrics and criteria"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions global;
  app.add_option("--out", global.out, "output directory")->capture_default_str();
  app.add_option("--jobs", global.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", global.format, "trace output format")
    ->check(CLI::IsMember({"csv", "jsonl"}))
    ->capture_default_str();

  SimulateOptions sim;
  auto * simulate = app.add_subcommand("simulate", "run the kinematic simulator over a logical scenario");
  simulate->add_option("--logical", sim.logical, "logical scenario JSON")->required();
  simulate->add_option("--config", sim.config, "simulator config JSON");

  EvaluateOptions eval;
  auto * evaluate = app.add_subcommand("evaluate", "evaluate criterion suites on traces");
  evaluate->add_option("--traces", eval.traces, "trace files or directories")->required();
  evaluate->add_option("--suite", eval.suites, "criterion suite JSON")->required();
  evaluate->add_option("--logical", eval.logical, "logical scenario for coverage metrics");
  evaluate->add_flag("--emit-plot-data", eval.emit_plot_data, "write parameter-vs-metric CSVs");

  CompareOptions cmp;
  auto * compare = app.add_subcommand("compare", "DTW repeatability of runs against a reference");
  compare->add_option("--reference", cmp.reference, "reference trace")->required();
  compare->add_option("runs", cmp.runs, "run traces or directories")->required();
  compare->add_option("--actors", cmp.actors, "actor ids to compare");
  compare->add_option("--threshold", cmp.threshold, "DTW threshold in m")->check(CLI::NonNegativeNumber);

  SweepOptions sw;
  double sw_min = 0.0;
  double sw_max = 0.0;
  double sw_step = 0.0;
  double sw_factor = 0.0;
  auto * sweep = app.add_subcommand("sweep", "one-parameter sweep with result-gap detection");
  sweep->add_option("--sweep", sw.sweep, "sweep definition JSON")->required();
  sweep->add_option("--config", sw.config, "simulator config JSON");
  auto * o_min = sweep->add_option("--min", sw_min, "override range minimum");
  auto * o_max = sweep->add_option("--max", sw_max, "override range maximum");
  auto * o_step = sweep->add_option("--step", sw_step, "override range step");
  auto * o_factor = sweep->add_option("--gap-factor", sw_factor, "override gap factor");

  std::vector<std::string> report_inputs;
  auto * report = app.add_subcommand("report", "summarize evaluation reports as a quality matrix");
  report->add_option("reports", report_inputs, "report.json files")->required();

  std::vector<std::string> argv_store{"scenq"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char *> argv;
  for (const auto & a : argv_store) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitInput;
  }

  try {
    if (*simulate) {
      return cmd_simulate(sim, global);
    }
    if (*evaluate) {
      return cmd_evaluate(eval, global);
    }
    if (*compare) {
      return cmd_compare(cmp, global);
    }
    if (*sweep) {
      if (*o_min) {
        sw.min = sw_min;
      }
      if (*o_max) {
        sw.max = sw_max;
      }
      if (*o_step) {
        sw.step = sw_step;
      }
      if (*o_factor) {
        sw.gap_factor = sw_factor;
      }
      return cmd_sweep(sw, global);
    }
    if (*report) {
      return cmd_report(report_inputs, global);
    }
  } catch (const std::exception & e) {
    spdlog::error("{}", e.what());
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace scenq::cli
