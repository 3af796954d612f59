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

#ifndef SCENQ__METRICS_NANO_HPP_
#define SCENQ__METRICS_NANO_HPP_

#include "scenq/geometry.hpp"
#include "scenq/trace.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace scenq
{

/// A number and a unit at one instant. `defined` is false outside the
/// metric's application period or where it is mathematically undefined.
struct MetricResult
{
  double time{0.0};
  double value{0.0};
  std::string unit;
  bool defined{false};

  bool operator==(const MetricResult &) const = default;
};

struct MetricSeries
{
  std::string metric_name;
  std::vector<std::string> actor_ids;
  std::vector<MetricResult> results;

  std::size_t defined_count() const;
};

struct ConflictPoint
{
  Vec2 position;
  double ego_arc_length{0.0};
  double other_arc_length{0.0};
};

/// Crossing of the two actors' traveled paths. Throws InputError when the
/// paths do not cross.
ConflictPoint find_conflict_point(
  const Trace & trace, const std::string & ego, const std::string & other);

namespace nano
{

inline constexpr double kDefaultVehicleMaxAccel = 8.0;
inline constexpr double kDefaultPedestrianMaxAccel = 2.0;
inline constexpr double kWttcHorizon = 20.0;
inline constexpr double kWttcScanStep = 0.01;
inline constexpr double kWttcTolerance = 1e-4;

MetricSeries euclidean_distance(
  const Trace & trace, const std::string & actor_a, const std::string & actor_b);

/// Longitudinal gap ahead of the ego, net of both radii.
MetricSeries headway(const Trace & trace, const std::string & ego, const std::string & target);

/// Time until the bounding circles touch if both actors keep their current
/// velocity vectors. Defined only for closing actors with a positive gap.
MetricSeries ttc(const Trace & trace, const std::string & ego, const std::string & target);

/// Worst-case time-to-collision: smallest t >= 0 at which the circles may
/// touch when both actors accelerate arbitrarily within their bounds.
MetricSeries wttc(
  const Trace & trace, const std::string & ego, const std::string & target,
  double a_max_ego = kDefaultVehicleMaxAccel, double a_max_target = kDefaultPedestrianMaxAccel);

MetricSeries gap_time(
  const Trace & trace, const std::string & ego, const std::string & target,
  const ConflictPoint & conflict);

MetricSeries braking_time(const Trace & trace, const std::string & actor);
MetricSeries braking_distance(const Trace & trace, const std::string & actor);

/// Other actors within `radius` per unit area.
MetricSeries traffic_density(
  const Trace & trace, const std::string & center_actor, double radius);

// Single-instant kernels, exposed for oracles and property tests.

/// Constant-velocity contact time, or a negative value when undefined.
double ttc_instant(
  const Vec2 & relative_position, const Vec2 & relative_velocity, double contact_radius);

/// WTTC by grid scan and bisection, or a negative value when no solution
/// exists within the horizon.
double wttc_instant(
  const Vec2 & relative_position, const Vec2 & relative_velocity, double contact_radius,
  double a_max_sum);

}  // namespace nano

/// `time_s,value,defined` rows.
void write_series_csv(std::ostream & sink, const MetricSeries & series);
/// Header sidecar for the CSV above.
nlohmann::json series_header_json(const MetricSeries & series, const nlohmann::json & parameters);

}  // namespace scenq

#endif  // SCENQ__METRICS_NANO_HPP_
