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

#ifndef SCENQ__TESTS__SUPPORT_HPP_
#define SCENQ__TESTS__SUPPORT_HPP_

#include "scenq/geometry.hpp"
#include "scenq/kin_sim.hpp"
#include "scenq/scenario.hpp"
#include "scenq/trace.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace scenq::test
{

inline std::string data_path(const std::string & name)
{
  return std::string(SCENQ_DATA_DIR) + "/" + name;
}

/// Track sampled from `fn(t) -> state` at t0 + i * dt.
inline ActorTrack sampled_track(
  const std::string & id, ActorClass cls, std::size_t n, double dt,
  const std::function<ActorState(double)> & fn, double t0 = 0.0)
{
  ActorTrack track{id, cls, default_radius(cls), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    ActorState s = fn(t);
    s.time = t;
    track.states.push_back(s);
  }
  return track;
}

/// Constant-velocity straight-line track.
inline ActorTrack linear_track(
  const std::string & id, ActorClass cls, Vec2 p0, Vec2 velocity, std::size_t n, double dt,
  double t0 = 0.0)
{
  const double speed = norm(velocity);
  const double heading = speed > 0.0 ? std::atan2(velocity.y, velocity.x) : 0.0;
  return sampled_track(
    id, cls, n, dt,
    [&](double t) {
      const Vec2 p = p0 + velocity * (t - t0);
      return ActorState{t, p.x, p.y, heading, speed, 0.0};
    },
    t0);
}

inline Trace make_trace(std::vector<ActorTrack> tracks, double dt, const std::string & id = "t")
{
  Trace trace;
  trace.scenario_id = id;
  trace.time_step = dt;
  for (auto & t : tracks) {
    const std::string key = t.actor_id;
    trace.tracks.emplace(key, std::move(t));
  }
  return trace;
}

inline LogicalScenario intersection_logical()
{
  return {
    "intersection",
    "right turn with crossing pedestrian",
    {{"v_max", 30, 58, 2, "km/h"}, {"t_cross", 5, 9, 1, "s"}, {"d_start", 10, 24, 2, "m"}},
    {}};
}

inline ConcreteScenario concrete(
  std::map<std::string, double> bindings, const std::string & id = "c")
{
  return {id, "l", std::move(bindings), 0};
}

/// Runs the default simulator on one binding set.
inline kin_sim::SimOutcome run_sim(std::map<std::string, double> bindings)
{
  return kin_sim::simulate(concrete(std::move(bindings)), kin_sim::SimConfig::defaults());
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string & name)
{
  const auto p = std::filesystem::temp_directory_path() / ("scenq_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace scenq::test

#endif  // SCENQ__TESTS__SUPPORT_HPP_
