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

#ifndef SCENQ__CRITERIA_HPP_
#define SCENQ__CRITERIA_HPP_

#include "scenq/manifest.hpp"
#include "scenq/metrics_micro.hpp"
#include "scenq/metrics_nano.hpp"
#include "scenq/trace.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace scenq
{

enum class Comparator { lt, le, gt, ge, eq };

Comparator comparator_from_string(const std::string & text);
std::string to_string(Comparator comparator);
/// '=' uses a relative tolerance of 1e-9.
bool compare(double value, Comparator comparator, double bound);
/// Comparator with the opposite truth set (ignoring equality).
Comparator negate(Comparator comparator);

/// Reference to a registered metric plus its arguments.
struct MetricSpec
{
  std::string name;
  std::vector<std::string> actors;
  nlohmann::json params = nlohmann::json::object();
};

enum class Signal { speed, acceleration, distance_between, time, metric_value };

struct ConditionLeaf
{
  Signal signal{Signal::time};
  std::vector<std::string> actors;
  std::optional<MetricSpec> metric;  // for Signal::metric_value
  Comparator comparator{Comparator::gt};
  double bound{0.0};
  std::string unit;
};

struct ConditionNode;

enum class LogicOp { all_of, any_of };

struct ConditionBranch
{
  LogicOp op{LogicOp::all_of};
  std::vector<ConditionNode> children;
};

struct ConditionNode
{
  std::variant<ConditionLeaf, ConditionBranch> value;
};

struct StopWhenFalse
{
};
struct StopAfterElapsed
{
  double duration{0.0};
};
/// Built-in events: actor_passed_conflict (actors: [actor, other]),
/// collision (optional actor pair) and scenario_end.
struct StopOnEvent
{
  std::string name;
  std::vector<std::string> actors;
};

using StopRule = std::variant<StopWhenFalse, StopAfterElapsed, StopOnEvent>;

struct ApplicationPeriod
{
  ConditionNode start_condition;
  StopRule stop{StopWhenFalse{}};
};

struct ThresholdEvaluation
{
  Comparator comparator{Comparator::gt};
  double value{0.0};
  std::string unit;
};

struct ScaleEvaluation
{
  /// (bound, score) with strictly increasing bounds. A result takes the score
  /// of the largest bound not above it; results below the first bound take
  /// the first score.
  std::vector<std::pair<double, double>> breakpoints;
  std::string unit;
};

using Evaluation = std::variant<ThresholdEvaluation, ScaleEvaluation>;

struct QualityCriterion
{
  std::string criterion_id;
  MetricSpec metric;
  Evaluation evaluation;
  /// Empty means the whole scenario.
  std::optional<ApplicationPeriod> application_period;
  /// Reduces a per-step metric to one value per scenario.
  std::optional<AggregateOp> aggregate;
};

enum class Perspective { simulation, sut, scenario };
enum class Level { nanoscopic, microscopic, macroscopic };

std::string to_string(Perspective perspective);
std::string to_string(Level level);
Perspective perspective_from_string(const std::string & text);
Level level_from_string(const std::string & text);

enum class Outcome { pass, fail, score, not_applicable };

std::string to_string(Outcome outcome);

struct Verdict
{
  std::string criterion_id;
  std::string scenario_id;
  std::size_t scenario_index{0};
  Outcome outcome{Outcome::not_applicable};
  double score{0.0};  // meaningful for Outcome::score
  std::vector<TimeInterval> evaluated_intervals;
  std::optional<MetricResult> worst_result;
};

// ---------------------------------------------------------------------------
// Metric registry

enum class MetricArity { series, scalar, set };
enum class WorseDirection { lower, higher };

struct MetricInfo
{
  std::string name;
  std::string unit;
  MetricArity arity{MetricArity::series};
  WorseDirection worse{WorseDirection::lower};
};

/// Name to implementation map, immutable after construction.
class MetricRegistry
{
public:
  using SeriesFn = std::function<MetricSeries(const MetricSpec &, const Trace &)>;
  using ScalarFn = std::function<ScalarResult(const MetricSpec &, const Trace &)>;
  using SetFn =
    std::function<std::vector<ScalarResult>(const MetricSpec &, std::span<const Trace>)>;

  /// Registry holding every built-in metric.
  static const MetricRegistry & builtin();

  bool contains(const std::string & name) const;
  /// Throws InputError for an unknown name.
  const MetricInfo & info(const std::string & name) const;
  std::vector<std::string> names() const;

  MetricSeries series(const MetricSpec & spec, const Trace & trace) const;
  ScalarResult scalar(const MetricSpec & spec, const Trace & trace) const;
  std::vector<ScalarResult> set(const MetricSpec & spec, std::span<const Trace> traces) const;

private:
  struct Entry
  {
    MetricInfo info;
    SeriesFn series;
    ScalarFn scalar;
    SetFn set;
  };

  MetricRegistry();
  const Entry & entry(const std::string & name) const;

  std::map<std::string, Entry> entries_;
};

// ---------------------------------------------------------------------------
// Evaluation

/// Sample times used to evaluate conditions: the first actor's samples inside
/// the trace overlap.
std::vector<double> reference_times(const Trace & trace);

/// Maximal intervals where the condition holds, closed per the stop rule.
/// Edges between samples are located by linear interpolation.
std::vector<TimeInterval> active_intervals(const ApplicationPeriod & period, const Trace & trace);

/// Intervals for an optional period; the whole overlap when absent.
std::vector<TimeInterval> active_intervals(
  const std::optional<ApplicationPeriod> & period, const Trace & trace);

Verdict evaluate_criterion(
  const QualityCriterion & criterion, const MetricSeries & series, const Trace & trace);

/// Scalar results are evaluated once. With a trace, an empty application
/// period makes the verdict not_applicable.
Verdict evaluate_criterion(
  const QualityCriterion & criterion, const ScalarResult & scalar,
  const Trace * trace = nullptr);

struct MatrixCell
{
  std::vector<Verdict> verdicts;
  /// passes / (passes + fails); empty when the denominator is zero.
  std::optional<double> pass_rate;
};

struct EvaluationReport
{
  std::map<std::pair<Perspective, Level>, MatrixCell> matrix_cells;
  std::vector<ScalarResult> scalars;
  std::optional<RunManifest> provenance;

  std::size_t verdict_count() const;
  bool any_fail() const;
  void merge(EvaluationReport other);
};

/// Evaluates every criterion of the suite on the traces and files the
/// verdicts under one matrix cell. Verdicts are ordered by criterion id, then
/// scenario index, whatever `jobs` is.
EvaluationReport evaluate_suite(
  std::span<const QualityCriterion> suite, std::span<const Trace> traces,
  Perspective perspective, Level level, unsigned jobs = 1);

/// Scenario index recorded in the trace metadata, or `fallback`.
std::size_t scenario_index_of(const Trace & trace, std::size_t fallback);

// ---------------------------------------------------------------------------
// JSON

ConditionNode condition_from_json(const nlohmann::json & j);
nlohmann::json to_json(const ConditionNode & node);
ApplicationPeriod period_from_json(const nlohmann::json & j);
nlohmann::json to_json(const ApplicationPeriod & period);
QualityCriterion criterion_from_json(const nlohmann::json & j);
nlohmann::json to_json(const QualityCriterion & criterion);

/// Criterion plus its matrix placement, as read from a suite file.
struct SuiteEntry
{
  QualityCriterion criterion;
  Perspective perspective{Perspective::sut};
  Level level{Level::microscopic};
};

/// Suite file: JSON list of criterion objects. Placement defaults to the sut
/// perspective and the level implied by the metric.
std::vector<SuiteEntry> suite_from_json(const nlohmann::json & j);
std::vector<SuiteEntry> load_suite(const std::string & path);

nlohmann::json to_json(const Verdict & verdict);
nlohmann::json to_json(const EvaluationReport & report);

}  // namespace scenq

#endif  // SCENQ__CRITERIA_HPP_
