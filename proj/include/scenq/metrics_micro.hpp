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

#ifndef SCENQ__METRICS_MICRO_HPP_
#define SCENQ__METRICS_MICRO_HPP_

#include "scenq/geometry.hpp"
#include "scenq/metrics_nano.hpp"
#include "scenq/trace.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scenq
{

/// Conflict area where two paths cross. Convex, counter-clockwise.
struct EncroachmentZone
{
  std::vector<Vec2> polygon;
  std::pair<std::string, std::string> derived_from;

  Vec2 centroid() const;
  double area() const;
};

struct OccupancyInterval
{
  std::string actor_id;
  double entry_time{0.0};
  double exit_time{0.0};
};

/// A per-scenario result: MetricResult without a timestamp.
struct ScalarResult
{
  std::string metric_name;
  double value{0.0};
  std::string unit;
  bool defined{false};
  std::map<std::string, std::string> context;
};

nlohmann::json to_json(const ScalarResult & result);
ScalarResult scalar_from_json(const nlohmann::json & j);

struct TimeInterval
{
  double begin{0.0};
  double end{0.0};

  bool contains(double t, double tolerance = 1e-9) const
  {
    return t >= begin - tolerance && t <= end + tolerance;
  }
  double length() const { return end - begin; }
  bool operator==(const TimeInterval &) const = default;
};

enum class AggregateOp { min, max, mean };

AggregateOp aggregate_op_from_string(const std::string & text);
std::string to_string(AggregateOp op);

namespace micro
{

/// Parallelogram around the first crossing of both traveled paths, with
/// half-width (radius + inflation) across each path. Throws InputError when
/// the paths do not cross.
EncroachmentZone build_encroachment_zone(
  const Trace & trace, const std::string & actor_a, const std::string & actor_b,
  double inflation = 0.0);

/// Same construction from explicit paths and half-widths.
EncroachmentZone zone_from_paths(
  const Polyline & path_a, const Polyline & path_b, double half_width_a, double half_width_b,
  std::pair<std::string, std::string> ids = {});

/// Maximal intervals during which the actor's circle touches the zone, with
/// sub-sample entry and exit times.
std::vector<OccupancyInterval> occupancy(
  const Trace & trace, const std::string & actor, const EncroachmentZone & zone);

/// Post-encroachment time t2 - t1. Roles follow entry order. Overlapping
/// occupancy is undefined with context["conflict"] == "overlap".
ScalarResult pet(
  const Trace & trace, const std::string & actor_1, const std::string & actor_2,
  const EncroachmentZone & zone);

/// PET from precomputed occupancy lists of two actors.
ScalarResult pet_from_intervals(
  const std::vector<OccupancyInterval> & occupancy_1,
  const std::vector<OccupancyInterval> & occupancy_2);

/// Occupancy duration of the actor's first pass through the zone.
ScalarResult et(const Trace & trace, const std::string & actor, const EncroachmentZone & zone);

/// Aggregates the defined samples lying inside `period` (the whole series
/// when no period is given). Throws InputError for an empty series.
ScalarResult aggregate(
  const MetricSeries & series, AggregateOp op,
  const std::optional<std::vector<TimeInterval>> & period = std::nullopt);

}  // namespace micro
}  // namespace scenq

#endif  // SCENQ__METRICS_MICRO_HPP_
