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

#ifndef SCENQ__KIN_SIM_HPP_
#define SCENQ__KIN_SIM_HPP_

#include "scenq/geometry.hpp"
#include "scenq/scenario.hpp"
#include "scenq/trace.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace scenq::kin_sim
{

inline constexpr const char * kEgoId = "ego";
inline constexpr const char * kPedestrianId = "ped";

/// Acceleration used to resume and to regain target speed, m/s^2.
inline constexpr double kResumeAccel = 2.0;

/// Urban right-turn intersection. All lengths in meters, times in seconds.
struct SimConfig
{
  double time_step{0.01};
  double max_duration{40.0};
  double street_width{7.0};
  /// Ego approaches northbound (+y) on x = 1.75, turns right into the
  /// eastbound lane y = -1.75 and leaves along +x.
  std::vector<Vec2> ego_route;
  /// Curb-to-curb segment perpendicular to the exit arm.
  std::vector<Vec2> ped_crossing;
  double comfort_decel{3.0};
  double max_decel{8.0};
  double trigger_gap_time{2.0};
  /// Speed cap on the curved part of the route, m/s.
  double turn_speed{4.0};

  static SimConfig defaults();
};

void check_config(const SimConfig & config);

SimConfig config_from_json(const nlohmann::json & j);
nlohmann::json to_json(const SimConfig & config);
SimConfig load_config(const std::string & path);

struct SimOutcome
{
  Trace trace;
  bool collided{false};
  double min_distance{0.0};  // center to center, m
  bool completed{false};
  /// Time the pedestrian left the curb, if it did.
  std::optional<double> pedestrian_start;
  /// Time the ego first committed to yielding, if it did.
  std::optional<double> yield_start;
};

/// Runs one concrete scenario.
///
/// Required bindings: v_max (km/h), t_cross (s), d_start (m). Optional
/// ego_start_x (m): along-route distance from the ego start to the turn
/// entry. The km/h to m/s conversion happens here and nowhere else.
SimOutcome simulate(const ConcreteScenario & concrete, const SimConfig & config);

/// One outcome per grid point in grid order. Errors name the failing index.
std::vector<SimOutcome> simulate_batch(
  const LogicalScenario & logical, const SimConfig & config, unsigned jobs = 1);

}  // namespace scenq::kin_sim

#endif  // SCENQ__KIN_SIM_HPP_
