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

#include "scenq/metrics_macro.hpp"

#include "scenq/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace scenq
{

namespace
{

constexpr double kGapFloor = 1e-9;

std::vector<Vec2> positions(const ActorTrack & track)
{
  std::vector<Vec2> out;
  out.reserve(track.states.size());
  for (const auto & s : track.states) {
    out.push_back(s.position());
  }
  return out;
}

double min_contact_margin(const Trace & trace)
{
  // Smallest (center distance - radius sum) over all actor pairs.
  double margin = std::numeric_limits<double>::infinity();
  for (auto a = trace.tracks.begin(); a != trace.tracks.end(); ++a) {
    for (auto b = std::next(a); b != trace.tracks.end(); ++b) {
      const double r = a->second.radius + b->second.radius;
      for (const double t : shared_times(a->second, b->second)) {
        const double d = distance(
          state_at(a->second, t).position(), state_at(b->second, t).position());
        margin = std::min(margin, d - r);
      }
    }
  }
  return margin;
}

}  // namespace

bool RepeatabilityReport::all_within() const
{
  return std::all_of(
    entries.begin(), entries.end(), [](const auto & e) { return e.within_threshold; });
}

nlohmann::json to_json(const RepeatabilityReport & report)
{
  nlohmann::json entries = nlohmann::json::array();
  for (const auto & e : report.entries) {
    entries.push_back(
      {{"run_id", e.run_id},
       {"actor_id", e.actor_id},
       {"dtw_distance", e.dtw_distance},
       {"per_step", e.per_step},
       {"within_threshold", e.within_threshold}});
  }
  return {
    {"reference_id", report.reference_id},
    {"threshold", report.threshold},
    {"entries", entries}};
}

nlohmann::json to_json(const CoverageResult & coverage)
{
  return {
    {"overall", coverage.overall},
    {"per_parameter", coverage.per_parameter},
    {"missing", coverage.missing}};
}

nlohmann::json to_json(const GapFinding & finding)
{
  return {
    {"parameter", finding.parameter},
    {"left_value", finding.left_value},
    {"right_value", finding.right_value},
    {"metric_jump",
     finding.metric_jump ? nlohmann::json(*finding.metric_jump) : nlohmann::json(nullptr)}};
}

namespace macro
{

double dtw(std::span<const Vec2> a, std::span<const Vec2> b)
{
  if (a.empty() || b.empty()) {
    throw InputError("dtw requires non-empty tracks");
  }
  // Two-row rolling table; row i holds D(i, 0..m-1).
  const std::size_t m = b.size();
  std::vector<double> prev(m);
  std::vector<double> cur(m);
  prev[0] = distance(a[0], b[0]);
  for (std::size_t j = 1; j < m; ++j) {
    prev[j] = prev[j - 1] + distance(a[0], b[j]);
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    cur[0] = prev[0] + distance(a[i], b[0]);
    for (std::size_t j = 1; j < m; ++j) {
      cur[j] = distance(a[i], b[j]) + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double dtw(const ActorTrack & track_a, const ActorTrack & track_b)
{
  if (track_a.states.empty() || track_b.states.empty()) {
    throw InputError("dtw requires non-empty tracks");
  }
  const auto a = positions(track_a);
  const auto b = positions(track_b);
  return dtw(std::span<const Vec2>(a), std::span<const Vec2>(b));
}

RepeatabilityReport repeatability_report(
  const Trace & reference, std::span<const Trace> runs, const std::vector<std::string> & actor_ids,
  double threshold)
{
  if (!(threshold >= 0.0)) {
    throw InputError("repeatability threshold must be non-negative");
  }
  RepeatabilityReport report;
  report.reference_id = reference.scenario_id;
  report.threshold = threshold;
  for (const auto & id : actor_ids) {
    if (!reference.tracks.count(id)) {
      throw InputError(fmt::format("reference '{}' has no actor '{}'", reference.scenario_id, id));
    }
  }
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (const auto & id : actor_ids) {
      if (!runs[k].tracks.count(id)) {
        throw InputError(fmt::format("run {} ('{}') has no actor '{}'", k, runs[k].scenario_id, id));
      }
    }
  }
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (const auto & id : actor_ids) {
      const ActorTrack & ref = reference.tracks.at(id);
      RepeatabilityEntry e;
      e.run_id = fmt::format("{}:{}", runs[k].scenario_id, k);
      e.actor_id = id;
      e.dtw_distance = dtw(ref, runs[k].tracks.at(id));
      e.per_step = e.dtw_distance / static_cast<double>(ref.states.size());
      e.within_threshold = e.dtw_distance <= threshold;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

bool has_contact(const Trace & trace) { return min_contact_margin(trace) <= 0.0; }

double collision_probability(std::span<const Trace> traces)
{
  if (traces.empty()) {
    throw InputError("collision probability of an empty set");
  }
  const auto hits = std::count_if(traces.begin(), traces.end(), has_contact);
  return static_cast<double>(hits) / static_cast<double>(traces.size());
}

double collision_probability(std::span<const kin_sim::SimOutcome> outcomes)
{
  if (outcomes.empty()) {
    throw InputError("collision probability of an empty set");
  }
  std::size_t hits = 0;
  for (const auto & o : outcomes) {
    double radii = 0.0;
    for (const auto & [id, track] : o.trace.tracks) {
      radii += track.radius;
    }
    hits += o.min_distance <= radii ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

CoverageResult parameter_coverage(
  const LogicalScenario & logical, std::span<const ConcreteScenario> executed,
  std::size_t missing_cap)
{
  check_logical(logical);
  const auto & params = logical.parameters;
  std::vector<std::set<std::int64_t>> hit(params.size());
  std::set<std::size_t> points;
  for (const auto & c : executed) {
    std::size_t flat = 0;
    for (std::size_t p = 0; p < params.size(); ++p) {
      const auto it = c.bindings.find(params[p].name);
      if (it == c.bindings.end()) {
        throw InputError(
          fmt::format("scenario '{}' does not bind '{}'", c.scenario_id, params[p].name));
      }
      const std::int64_t idx = params[p].index_of(it->second);
      if (idx < 0) {
        throw InputError(fmt::format(
          "scenario '{}' binding {}={} is off the grid", c.scenario_id, params[p].name,
          format_number(it->second)));
      }
      hit[p].insert(idx);
      flat = flat * params[p].count() + static_cast<std::size_t>(idx);
    }
    points.insert(flat);
  }

  CoverageResult result;
  const std::size_t n = grid_size(logical);
  result.overall = static_cast<double>(points.size()) / static_cast<double>(n);
  for (std::size_t p = 0; p < params.size(); ++p) {
    result.per_parameter[params[p].name] =
      static_cast<double>(hit[p].size()) / static_cast<double>(params[p].count());
  }
  for (std::size_t i = 0; i < n && result.missing.size() < missing_cap; ++i) {
    if (!points.count(i)) {
      result.missing.push_back(concrete_at(logical, i).bindings);
    }
  }
  return result;
}

std::vector<GapFinding> detect_result_gaps(
  const std::string & parameter, std::span<const SweepPoint> sweep, double gap_factor)
{
  if (!(gap_factor > 1.0)) {
    throw InputError("gap_factor must exceed 1");
  }
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (!(sweep[i].param_value > sweep[i - 1].param_value)) {
      throw InputError("sweep must be strictly increasing in the parameter");
    }
  }
  const auto defined = std::count_if(
    sweep.begin(), sweep.end(), [](const SweepPoint & p) { return p.result.defined; });
  if (defined < 3) {
    throw InputError("gap detection needs at least 3 defined sweep results");
  }

  std::vector<double> deltas;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i - 1].result.defined && sweep[i].result.defined) {
      deltas.push_back(std::abs(sweep[i].result.value - sweep[i - 1].result.value));
    }
  }
  double median = 0.0;
  if (!deltas.empty()) {
    auto sorted = deltas;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  }
  const double limit = std::max(gap_factor * median, kGapFloor);

  std::vector<GapFinding> findings;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const auto & l = sweep[i - 1];
    const auto & r = sweep[i];
    if (l.result.defined != r.result.defined) {
      findings.push_back({parameter, l.param_value, r.param_value, std::nullopt});
    } else if (l.result.defined) {
      const double jump = std::abs(r.result.value - l.result.value);
      if (jump > limit) {
        findings.push_back({parameter, l.param_value, r.param_value, jump});
      }
    }
  }
  return findings;
}

}  // namespace macro
}  // namespace scenq
