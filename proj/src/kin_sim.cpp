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

#include "scenq/kin_sim.hpp"

#include "parallel.hpp"
#include "scenq/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace scenq::kin_sim
{

namespace
{

constexpr double kKmhToMps = 1.0 / 3.6;
constexpr double kSpeedFloor = 1e-3;
constexpr double kStopMargin = 0.5;
constexpr double kTurnAngleEps = 1e-6;

double required_binding(const ConcreteScenario & concrete, const char * name)
{
  const auto it = concrete.bindings.find(name);
  if (it == concrete.bindings.end()) {
    throw InputError(fmt::format(
      "scenario '{}': missing required binding '{}'", concrete.scenario_id, name));
  }
  return it->second;
}

// Route after applying the optional ego_start_x binding: the start is moved
// along the route (or back along the first segment) so that the distance to
// the first turning vertex equals ego_start_x.
Polyline effective_route(const Polyline & route, double turn_begin, std::optional<double> start)
{
  if (!start) {
    return route;
  }
  const double s0 = turn_begin - *start;
  const auto & pts = route.points();
  std::vector<Vec2> out;
  if (s0 < 0.0) {
    const Vec2 d = pts[1] - pts[0];
    const Vec2 dir = d * (1.0 / norm(d));
    out.push_back(pts[0] - dir * (-s0));
    out.insert(out.end(), pts.begin(), pts.end());
  } else {
    out.push_back(route.point_at(s0));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (route.arc_lengths()[i] > s0) {
        out.push_back(pts[i]);
      }
    }
  }
  return Polyline(std::move(out));
}

// Arc-length span of the vertices where the route changes direction.
std::pair<double, double> turn_span(const Polyline & route)
{
  const auto & pts = route.points();
  const auto & arc = route.arc_lengths();
  double begin = std::numeric_limits<double>::infinity();
  double end = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i] - pts[i - 1];
    const Vec2 b = pts[i + 1] - pts[i];
    const double turn = std::abs(std::atan2(cross(a, b), dot(a, b)));
    if (turn > kTurnAngleEps) {
      begin = std::min(begin, arc[i]);
      end = std::max(end, arc[i]);
    }
  }
  return {begin, end};
}

std::vector<Vec2> points_from_json(const nlohmann::json & j, const char * key)
{
  std::vector<Vec2> pts;
  for (const auto & p : j.at(key)) {
    pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return pts;
}

nlohmann::json points_to_json(const std::vector<Vec2> & pts)
{
  auto arr = nlohmann::json::array();
  for (const auto & p : pts) {
    arr.push_back({p.x, p.y});
  }
  return arr;
}

}  // namespace

SimConfig SimConfig::defaults()
{
  SimConfig c;
  // Approach leg, right-turn arc around the curb corner (center (7, -7),
  // radius 5.25) and a long exit leg.
  c.ego_route.push_back({1.75, -60.0});
  constexpr int arc_segments = 12;
  const Vec2 center{7.0, -7.0};
  constexpr double radius = 5.25;
  for (int k = 0; k <= arc_segments; ++k) {
    const double angle = std::numbers::pi - (std::numbers::pi / 2.0) * k / arc_segments;
    c.ego_route.push_back({center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)});
  }
  // Exact endpoints keep the lane offsets free of rounding noise.
  c.ego_route[1] = {1.75, -7.0};
  c.ego_route.back() = {7.0, -1.75};
  c.ego_route.push_back({110.0, -1.75});
  c.ped_crossing = {{10.0, -3.5}, {10.0, 3.5}};
  return c;
}

void check_config(const SimConfig & config)
{
  if (!(config.time_step > 0.0)) {
    throw InputError("config: time_step must be positive");
  }
  if (!(config.max_duration >= 1.0)) {
    throw InputError("config: max_duration must be at least 1 s");
  }
  if (!(config.street_width > 0.0)) {
    throw InputError("config: street_width must be positive");
  }
  if (!(config.comfort_decel > 0.0) || !(config.max_decel >= config.comfort_decel)) {
    throw InputError("config: need 0 < comfort_decel <= max_decel");
  }
  if (!(config.trigger_gap_time >= 0.0) || !(config.turn_speed > 0.0)) {
    throw InputError("config: trigger_gap_time must be >= 0 and turn_speed > 0");
  }
  const Polyline route(config.ego_route);
  if (route.empty() || !(route.length() > 0.0)) {
    throw InputError("config: ego_route is degenerate");
  }
  const Polyline crossing(config.ped_crossing);
  if (crossing.empty() || !(crossing.length() > 0.0)) {
    throw InputError("config: ped_crossing is degenerate");
  }
  if (std::abs(crossing.length() - config.street_width) > 1e-6) {
    throw InputError("config: ped_crossing length must equal street_width");
  }
  if (!first_crossing(route, crossing)) {
    throw InputError("config: ego_route does not cross ped_crossing");
  }
}

SimConfig config_from_json(const nlohmann::json & j)
{
  SimConfig c = SimConfig::defaults();
  try {
    c.time_step = j.value("time_step", c.time_step);
    c.max_duration = j.value("max_duration", c.max_duration);
    c.street_width = j.value("street_width", c.street_width);
    c.comfort_decel = j.value("comfort_decel", c.comfort_decel);
    c.max_decel = j.value("max_decel", c.max_decel);
    c.trigger_gap_time = j.value("trigger_gap_time", c.trigger_gap_time);
    c.turn_speed = j.value("turn_speed", c.turn_speed);
    if (j.contains("ego_route")) {
      c.ego_route = points_from_json(j, "ego_route");
    }
    if (j.contains("ped_crossing")) {
      c.ped_crossing = points_from_json(j, "ped_crossing");
    }
  } catch (const nlohmann::json::exception & e) {
    throw InputError(fmt::format("config: {}", e.what()));
  }
  check_config(c);
  return c;
}

nlohmann::json to_json(const SimConfig & config)
{
  return {
    {"time_step", config.time_step},
    {"max_duration", config.max_duration},
    {"street_width", config.street_width},
    {"ego_route", points_to_json(config.ego_route)},
    {"ped_crossing", points_to_json(config.ped_crossing)},
    {"comfort_decel", config.comfort_decel},
    {"max_decel", config.max_decel},
    {"trigger_gap_time", config.trigger_gap_time},
    {"turn_speed", config.turn_speed},
  };
}

SimConfig load_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError(fmt::format("cannot open config '{}'", path));
  }
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error & e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

SimOutcome simulate(const ConcreteScenario & concrete, const SimConfig & config)
{
  check_config(config);
  const double v_max = required_binding(concrete, "v_max") * kKmhToMps;
  const double t_cross = required_binding(concrete, "t_cross");
  const double d_start = required_binding(concrete, "d_start");
  std::optional<double> ego_start;
  if (const auto it = concrete.bindings.find("ego_start_x"); it != concrete.bindings.end()) {
    ego_start = it->second;
  }
  if (!(v_max > 0.0) || !(t_cross > 0.0) || !(d_start >= 0.0)) {
    throw InputError(fmt::format(
      "scenario '{}': need v_max > 0, t_cross > 0, d_start >= 0", concrete.scenario_id));
  }
  if (ego_start && !(*ego_start >= 0.0)) {
    throw InputError(fmt::format("scenario '{}': ego_start_x must be >= 0", concrete.scenario_id));
  }

  const Polyline base_route(config.ego_route);
  const Polyline route =
    effective_route(base_route, turn_span(base_route).first, ego_start);
  const Polyline crossing(config.ped_crossing);
  const auto [turn_begin, turn_end] = turn_span(route);
  const auto hit = first_crossing(route, crossing);
  if (!hit) {
    throw InputError(
      fmt::format("scenario '{}': ego route misses the crossing", concrete.scenario_id));
  }

  const double ego_radius = default_radius(ActorClass::vehicle);
  const double ped_radius = default_radius(ActorClass::pedestrian);
  const double contact = ego_radius + ped_radius;
  const double sin_angle = std::max(std::abs(cross(hit->dir_a, hit->dir_b)), 1e-3);
  const double band = contact / sin_angle;
  const double conflict_s = hit->arc_a;
  const double conflict_u = hit->arc_b;
  const double ego_zone_entry = conflict_s - band;
  const double ped_clear_u = conflict_u + band;
  const double ped_speed = config.street_width / t_cross;
  const double crossing_heading = crossing.heading_at(0.0);

  const double dt = config.time_step;
  const auto last_step = static_cast<std::size_t>(std::llround(config.max_duration / dt));

  ActorTrack ego{kEgoId, ActorClass::vehicle, ego_radius, {}};
  ActorTrack ped{kPedestrianId, ActorClass::pedestrian, ped_radius, {}};
  ego.states.reserve(last_step + 1);
  ped.states.reserve(last_step + 1);

  SimOutcome outcome;
  outcome.min_distance = std::numeric_limits<double>::infinity();

  double s = 0.0;
  double v = v_max;
  std::optional<std::size_t> ped_start_step;
  bool yielding = false;

  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * dt;
    double u = 0.0;
    if (ped_start_step) {
      const auto walked = static_cast<double>(i - *ped_start_step) * dt;
      u = std::min(config.street_width, ped_speed * walked);
    }
    const Vec2 ego_pos = route.point_at(s);
    const Vec2 ped_pos = crossing.point_at(u);
    const double dist = distance(ego_pos, ped_pos);

    if (!ped_start_step && dist <= d_start) {
      ped_start_step = i;
      outcome.pedestrian_start = t;
    }
    const bool ped_moving = ped_start_step && u < config.street_width;
    const double ped_v = ped_moving ? ped_speed : 0.0;

    outcome.min_distance = std::min(outcome.min_distance, dist);
    const bool collided = dist <= contact;
    const bool completed = s >= route.length();
    const bool terminal = collided || completed || i >= last_step;

    double accel = 0.0;
    if (!terminal) {
      // Target speed, with the cap on the curved part of the route.
      double a_cmd = kResumeAccel;
      const double v_target = (s >= turn_begin && s <= turn_end)
                                ? std::min(v_max, config.turn_speed)
                                : v_max;
      if (v < v_target) {
        a_cmd = std::min(kResumeAccel, (v_target - v) / dt);
      } else if (v > v_target) {
        a_cmd = -config.comfort_decel;
      } else {
        a_cmd = 0.0;
      }
      if (s < turn_begin && v > config.turn_speed) {
        const double to_turn = turn_begin - s;
        const double need = (v * v - config.turn_speed * config.turn_speed) /
                            (2.0 * config.comfort_decel);
        if (need >= to_turn - v * dt) {
          a_cmd = std::min(a_cmd, -config.comfort_decel);
        }
      }

      // Yield latch: set on a short predicted gap time (or a pedestrian
      // already inside the conflict band ahead of the ego), released once the
      // pedestrian has left the band.
      const bool ped_cleared = ped_start_step && u > ped_clear_u;
      const bool ego_before_zone = s < ego_zone_entry;
      if (yielding && (ped_cleared || !ego_before_zone)) {
        yielding = false;
      }
      if (!yielding && ped_start_step && !ped_cleared && ego_before_zone) {
        bool trigger = false;
        if (u < conflict_u) {
          const double t_ego = (conflict_s - s) / std::max(v, kSpeedFloor);
          const double t_ped = (conflict_u - u) / std::max(ped_v, kSpeedFloor);
          trigger = std::abs(t_ego - t_ped) < config.trigger_gap_time;
        } else {
          const double t_ego_zone = (ego_zone_entry - s) / std::max(v, kSpeedFloor);
          const double t_ped_clear = (ped_clear_u - u) / std::max(ped_v, kSpeedFloor);
          trigger = t_ego_zone < t_ped_clear + config.trigger_gap_time;
        }
        if (trigger) {
          yielding = true;
          if (!outcome.yield_start) {
            outcome.yield_start = t;
          }
        }
      }
      if (yielding) {
        double a_yield = -config.comfort_decel;
        const double stop_point = s + v * v / (2.0 * config.comfort_decel);
        if (stop_point > ego_zone_entry - kStopMargin) {
          a_yield = -config.max_decel;
        }
        a_cmd = std::min(a_cmd, a_yield);
      }
      a_cmd = std::clamp(a_cmd, -config.max_decel, kResumeAccel);
      const double v_next = std::clamp(v + a_cmd * dt, 0.0, v_max);
      accel = (v_next - v) / dt;
    }

    ego.states.push_back({t, ego_pos.x, ego_pos.y, route.heading_at(s), v, accel});
    ped.states.push_back({t, ped_pos.x, ped_pos.y, crossing_heading, ped_v, 0.0});

    if (terminal) {
      outcome.collided = collided;
      outcome.completed = completed;
      break;
    }
    s += v * dt;
    v = std::clamp(v + accel * dt, 0.0, v_max);
  }

  Trace & trace = outcome.trace;
  trace.scenario_id = concrete.scenario_id;
  trace.time_step = dt;
  trace.metadata["simulator"] = "scenq.kin_sim";
  trace.metadata["logical_id"] = concrete.logical_id;
  trace.metadata["index"] = std::to_string(concrete.index);
  for (const auto & [key, value] : concrete.bindings) {
    trace.metadata["param." + key] = format_number(value);
  }
  trace.tracks.emplace(ego.actor_id, std::move(ego));
  trace.tracks.emplace(ped.actor_id, std::move(ped));
  return outcome;
}

std::vector<SimOutcome> simulate_batch(
  const LogicalScenario & logical, const SimConfig & config, unsigned jobs)
{
  const std::size_t n = grid_size(logical);
  std::vector<SimOutcome> outcomes(n);
  detail::parallel_for(n, jobs, [&](std::size_t i) {
    try {
      outcomes[i] = simulate(concrete_at(logical, i), config);
    } catch (const InputError & e) {
      throw InputError(fmt::format("scenario index {}: {}", i, e.what()));
    }
  });
  return outcomes;
}

}  // namespace scenq::kin_sim
