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

#ifndef SCENQ__METRICS_MACRO_HPP_
#define SCENQ__METRICS_MACRO_HPP_

#include "scenq/kin_sim.hpp"
#include "scenq/metrics_micro.hpp"
#include "scenq/scenario.hpp"
#include "scenq/trace.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace scenq
{

struct RepeatabilityEntry
{
  std::string run_id;
  std::string actor_id;
  double dtw_distance{0.0};  // m
  double per_step{0.0};      // m per reference sample
  bool within_threshold{true};
};

struct RepeatabilityReport
{
  std::string reference_id;
  std::vector<RepeatabilityEntry> entries;
  double threshold{10.0};

  bool all_within() const;
};

struct CoverageResult
{
  double overall{0.0};
  std::map<std::string, double> per_parameter;
  std::vector<std::map<std::string, double>> missing;
};

struct GapFinding
{
  std::string parameter;
  double left_value{0.0};
  double right_value{0.0};
  /// |delta metric|; empty for a defined/undefined transition.
  std::optional<double> metric_jump;
};

struct SweepPoint
{
  double param_value{0.0};
  ScalarResult result;
};

nlohmann::json to_json(const RepeatabilityReport & report);
nlohmann::json to_json(const CoverageResult & coverage);
nlohmann::json to_json(const GapFinding & finding);

namespace macro
{

inline constexpr double kDefaultDtwThreshold = 10.0;
inline constexpr double kDefaultGapFactor = 5.0;
inline constexpr std::size_t kDefaultMissingCap = 50;

/// Classic unconstrained DTW over planar positions; total cost in meters.
double dtw(const ActorTrack & track_a, const ActorTrack & track_b);
double dtw(std::span<const Vec2> a, std::span<const Vec2> b);

/// DTW of each run's actors against the reference's, reference excluded.
RepeatabilityReport repeatability_report(
  const Trace & reference, std::span<const Trace> runs, const std::vector<std::string> & actor_ids,
  double threshold = kDefaultDtwThreshold);

/// True when any actor pair's circles touch at some sample.
bool has_contact(const Trace & trace);

double collision_probability(std::span<const Trace> traces);
double collision_probability(std::span<const kin_sim::SimOutcome> outcomes);

CoverageResult parameter_coverage(
  const LogicalScenario & logical, std::span<const ConcreteScenario> executed,
  std::size_t missing_cap = kDefaultMissingCap);

/// Adjacent sweep points whose jump exceeds gap_factor times the median jump.
std::vector<GapFinding> detect_result_gaps(
  const std::string & parameter, std::span<const SweepPoint> sweep,
  double gap_factor = kDefaultGapFactor);

}  // namespace macro
}  // namespace scenq

#endif  // SCENQ__METRICS_MACRO_HPP_
