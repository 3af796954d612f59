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

#include "scenq/metrics_micro.hpp"

#include "scenq/error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenq
{

namespace
{

constexpr double kParallelSine = 1e-9;

std::string join_actors(const std::vector<std::string> & ids)
{
  return fmt::format("{}", fmt::join(ids, ","));
}

}  // namespace

Vec2 EncroachmentZone::centroid() const
{
  // Area-weighted centroid of a simple polygon.
  const double a = signed_area(polygon);
  if (polygon.empty() || a == 0.0) {
    return {};
  }
  double cx = 0.0;
  double cy = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = polygon[i];
    const Vec2 q = polygon[(i + 1) % n];
    const double w = cross(p, q);
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (6.0 * a), cy / (6.0 * a)};
}

double EncroachmentZone::area() const { return std::abs(signed_area(polygon)); }

nlohmann::json to_json(const ScalarResult & result)
{
  nlohmann::json j;
  if (const auto it = result.context.find("scenario_id"); it != result.context.end()) {
    j["scenario_id"] = it->second;
  }
  j["metric_name"] = result.metric_name;
  j["value"] = result.defined ? nlohmann::json(result.value) : nlohmann::json(nullptr);
  j["unit"] = result.unit;
  j["defined"] = result.defined;
  j["context"] = result.context;
  return j;
}

ScalarResult scalar_from_json(const nlohmann::json & j)
{
  try {
    ScalarResult r;
    r.metric_name = j.at("metric_name").get<std::string>();
    r.defined = j.at("defined").get<bool>();
    if (r.defined) {
      r.value = j.at("value").get<double>();
    }
    r.unit = j.value("unit", "");
    r.context = j.value("context", std::map<std::string, std::string>{});
    if (j.contains("scenario_id")) {
      r.context["scenario_id"] = j.at("scenario_id").get<std::string>();
    }
    return r;
  } catch (const nlohmann::json::exception & e) {
    throw InputError(fmt::format("malformed scalar result: {}", e.what()));
  }
}

AggregateOp aggregate_op_from_string(const std::string & text)
{
  if (text == "min") {
    return AggregateOp::min;
  }
  if (text == "max") {
    return AggregateOp::max;
  }
  if (text == "mean") {
    return AggregateOp::mean;
  }
  throw InputError(fmt::format("unknown aggregate op '{}'", text));
}

std::string to_string(AggregateOp op)
{
  switch (op) {
    case AggregateOp::min:
      return "min";
    case AggregateOp::max:
      return "max";
    case AggregateOp::mean:
      return "mean";
  }
  return "min";
}

namespace micro
{

EncroachmentZone zone_from_paths(
  const Polyline & path_a, const Polyline & path_b, double half_width_a, double half_width_b,
  std::pair<std::string, std::string> ids)
{
  if (!(half_width_a > 0.0) || !(half_width_b > 0.0)) {
    throw InputError("encroachment zone half-widths must be positive");
  }
  const auto hit = first_crossing(path_a, path_b);
  if (!hit) {
    throw Error(fmt::format("no crossing between paths of '{}' and '{}'", ids.first, ids.second));
  }
  const double sine = std::abs(cross(hit->dir_a, hit->dir_b));
  if (sine < kParallelSine) {
    throw Error(fmt::format("no crossing between paths of '{}' and '{}'", ids.first, ids.second));
  }
  // Intersection of the two strips: P + alpha dir_a + beta dir_b with
  // |alpha| sin <= half_b and |beta| sin <= half_a.
  const Vec2 ea = hit->dir_a * (half_width_b / sine);
  const Vec2 eb = hit->dir_b * (half_width_a / sine);
  const Vec2 p = hit->point;
  EncroachmentZone zone;
  zone.polygon = {p + ea + eb, p - ea + eb, p - ea - eb, p + ea - eb};
  if (signed_area(zone.polygon) < 0.0) {
    std::reverse(zone.polygon.begin(), zone.polygon.end());
  }
  zone.derived_from = std::move(ids);
  return zone;
}

EncroachmentZone build_encroachment_zone(
  const Trace & trace, const std::string & actor_a, const std::string & actor_b, double inflation)
{
  if (inflation < 0.0) {
    throw InputError("zone inflation must be non-negative");
  }
  const ActorTrack & ta = trace.track(actor_a);
  const ActorTrack & tb = trace.track(actor_b);
  return zone_from_paths(
    traveled_path(ta), traveled_path(tb), ta.radius + inflation, tb.radius + inflation,
    {actor_a, actor_b});
}

std::vector<OccupancyInterval> occupancy(
  const Trace & trace, const std::string & actor, const EncroachmentZone & zone)
{
  const ActorTrack & track = trace.track(actor);
  const auto & st = track.states;
  // f <= 0 while the bounding circle touches the zone.
  std::vector<double> f(st.size());
  for (std::size_t i = 0; i < st.size(); ++i) {
    f[i] = signed_distance_to_convex(zone.polygon, st[i].position()) - track.radius;
  }
  const auto crossing_time = [&](std::size_t i) {
    // Root of f between samples i-1 and i.
    const double w = f[i - 1] / (f[i - 1] - f[i]);
    return st[i - 1].time + w * (st[i].time - st[i - 1].time);
  };

  std::vector<OccupancyInterval> out;
  std::optional<double> entry;
  for (std::size_t i = 0; i < st.size(); ++i) {
    const bool inside = f[i] <= 0.0;
    if (inside && !entry) {
      entry = i == 0 ? st[0].time : crossing_time(i);
    } else if (!inside && entry) {
      const double exit = crossing_time(i);
      if (exit > *entry) {
        out.push_back({actor, *entry, exit});
      }
      entry.reset();
    }
  }
  if (entry && st.back().time > *entry) {
    out.push_back({actor, *entry, st.back().time});
  }
  return out;
}

ScalarResult pet_from_intervals(
  const std::vector<OccupancyInterval> & occupancy_1,
  const std::vector<OccupancyInterval> & occupancy_2)
{
  ScalarResult r;
  r.metric_name = "pet";
  r.unit = "s";
  if (occupancy_1.empty() || occupancy_2.empty()) {
    return r;
  }
  const OccupancyInterval * first = &occupancy_1.front();
  const OccupancyInterval * second = &occupancy_2.front();
  if (second->entry_time < first->entry_time) {
    std::swap(first, second);
  }
  r.context["first_actor"] = first->actor_id;
  r.context["second_actor"] = second->actor_id;
  if (second->entry_time < first->exit_time) {
    r.context["conflict"] = "overlap";
    return r;
  }
  r.value = second->entry_time - first->exit_time;
  r.defined = true;
  return r;
}

ScalarResult pet(
  const Trace & trace, const std::string & actor_1, const std::string & actor_2,
  const EncroachmentZone & zone)
{
  ScalarResult r = pet_from_intervals(
    occupancy(trace, actor_1, zone), occupancy(trace, actor_2, zone));
  r.context["scenario_id"] = trace.scenario_id;
  r.context["actors"] = join_actors({actor_1, actor_2});
  return r;
}

ScalarResult et(const Trace & trace, const std::string & actor, const EncroachmentZone & zone)
{
  ScalarResult r;
  r.metric_name = "et";
  r.unit = "s";
  r.context["scenario_id"] = trace.scenario_id;
  r.context["actors"] = actor;
  const auto intervals = occupancy(trace, actor, zone);
  if (!intervals.empty()) {
    r.value = intervals.front().exit_time - intervals.front().entry_time;
    r.defined = true;
  }
  return r;
}

ScalarResult aggregate(
  const MetricSeries & series, AggregateOp op,
  const std::optional<std::vector<TimeInterval>> & period)
{
  if (series.results.empty()) {
    throw InputError(fmt::format("cannot aggregate empty series '{}'", series.metric_name));
  }
  ScalarResult r;
  r.metric_name = fmt::format("{}({})", to_string(op), series.metric_name);
  r.context["actors"] = join_actors(series.actor_ids);
  double acc = op == AggregateOp::min ? std::numeric_limits<double>::infinity()
               : op == AggregateOp::max ? -std::numeric_limits<double>::infinity()
                                        : 0.0;
  std::size_t n = 0;
  for (const auto & m : series.results) {
    if (!m.defined) {
      continue;
    }
    if (period && std::none_of(period->begin(), period->end(), [&](const TimeInterval & iv) {
          return iv.contains(m.time);
        })) {
      continue;
    }
    if (r.unit.empty()) {
      r.unit = m.unit;
    }
    switch (op) {
      case AggregateOp::min:
        acc = std::min(acc, m.value);
        break;
      case AggregateOp::max:
        acc = std::max(acc, m.value);
        break;
      case AggregateOp::mean:
        acc += m.value;
        break;
    }
    ++n;
  }
  if (n == 0) {
    return r;
  }
  r.value = op == AggregateOp::mean ? acc / static_cast<double>(n) : acc;
  r.defined = true;
  return r;
}

}  // namespace micro
}  // namespace scenq
