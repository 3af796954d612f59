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

#include "scenq/error.hpp"
#include "scenq/kin_sim.hpp"
#include "scenq/metrics_micro.hpp"
#include "scenq/metrics_nano.hpp"

#include "oracles/frozen_oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace scenq
{
namespace
{

using test::linear_track;
using test::make_trace;

struct DenseOccupancy
{
  bool any{false};
  double entry{0.0};
  double exit{0.0};
};

// First contiguous occupancy found by evaluating the circle test at dt / 100.
DenseOccupancy dense_occupancy(const Trace & trace, const std::string & actor, const EncroachmentZone & zone)
{
  const auto & track = trace.track(actor);
  const double t0 = track.states.front().time;
  const double t1 = track.states.back().time;
  const double step = trace.time_step / 100.0;
  DenseOccupancy out;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = std::min(t0 + static_cast<double>(i) * step, t1);
    const bool inside = signed_distance_to_convex(zone.polygon, state_at(track, t).position()) <= track.radius;
    if (inside && !out.any) {
      out.any = true;
      out.entry = t;
    }
    if (inside) {
      out.exit = t;
    } else if (out.any) {
      break;
    }
  }
  return out;
}

OccupancyInterval interval(const std::string & id, double a, double b)
{
  return {id, a, b};
}

TEST(EncroachmentZone, PerpendicularPathsGiveRectangle)
{
  const Polyline a({{-10, 0}, {10, 0}});
  const Polyline b({{3, -10}, {3, 10}});
  const auto zone = micro::zone_from_paths(a, b, 1.0, 0.3, {"a", "b"});
  ASSERT_EQ(zone.polygon.size(), 4u);
  EXPECT_NEAR(zone.area(), 1.2, 1e-12);
  EXPECT_GT(signed_area(zone.polygon), 0.0);
  double lo_x = 1e9, hi_x = -1e9, lo_y = 1e9, hi_y = -1e9;
  for (const auto & p : zone.polygon) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  EXPECT_NEAR(hi_x - lo_x, 0.6, 1e-12);
  EXPECT_NEAR(hi_y - lo_y, 2.0, 1e-12);
  EXPECT_NEAR(zone.centroid().x, 3.0, 1e-12);
  EXPECT_NEAR(zone.centroid().y, 0.0, 1e-12);
}

TEST(EncroachmentZone, ParallelPathsHaveNoCrossing)
{
  try {
    micro::zone_from_paths(Polyline({{0, 0}, {10, 0}}), Polyline({{0, 2}, {10, 2}}), 1.0, 0.3);
    FAIL() << "expected an error";
  } catch (const Error & e) {
    EXPECT_NE(std::string(e.what()).find("no crossing"), std::string::npos) << e.what();
  }
  EXPECT_THROW(
    micro::zone_from_paths(Polyline({{-1, 0}, {1, 0}}), Polyline({{0, -1}, {0, 1}}), 0.0, 0.3), InputError);
}

TEST(EncroachmentZone, SimulatorZoneAtRouteCrossing)
{
  const auto outcome = test::run_sim({{"v_max", 40}, {"t_cross", 5}, {"d_start", 16}});
  const auto zone = micro::build_encroachment_zone(outcome.trace, "ego", "ped");
  EXPECT_NEAR(zone.centroid().x, oracle::kConflictX, 1e-3);
  EXPECT_NEAR(zone.centroid().y, oracle::kConflictY, 1e-3);
  EXPECT_EQ(zone.derived_from, (std::pair<std::string, std::string>{"ego", "ped"}));
  EXPECT_THROW(micro::build_encroachment_zone(outcome.trace, "ego", "ped", -0.1), InputError);
}

TEST(Occupancy, NeverNearAndSingleCrossing)
{
  const auto zone = micro::zone_from_paths(Polyline({{-10, 0}, {10, 0}}), Polyline({{0, -10}, {0, 10}}), 1.0, 0.3);
  const Trace far = make_trace({linear_track("a", ActorClass::vehicle, {50, 50}, {1, 0}, 20, 0.1)}, 0.1);
  EXPECT_TRUE(micro::occupancy(far, "a", zone).empty());
  const Trace pass = make_trace({linear_track("a", ActorClass::vehicle, {-10, 0}, {2, 0}, 101, 0.1)}, 0.1);
  const auto occ = micro::occupancy(pass, "a", zone);
  ASSERT_EQ(occ.size(), 1u);
  // Circle of radius 1 touches [-0.3, 0.3] from x = -1.3 to x = 1.3.
  EXPECT_NEAR(occ[0].entry_time, 8.7 / 2.0, 1e-9);
  EXPECT_NEAR(occ[0].exit_time, 11.3 / 2.0, 1e-9);
  EXPECT_EQ(occ[0].actor_id, "a");
}

TEST(Occupancy, MatchesDenseOracleOnSimulatorRuns)
{
  for (const double v : {30.0, 44.0, 58.0}) {
    for (const double t_cross : {5.0, 9.0}) {
      const auto outcome = test::run_sim({{"v_max", v}, {"t_cross", t_cross}, {"d_start", 16}});
      const auto zone = micro::build_encroachment_zone(outcome.trace, "ego", "ped");
      for (const std::string actor : {"ego", "ped"}) {
        const auto occ = micro::occupancy(outcome.trace, actor, zone);
        const auto dense = dense_occupancy(outcome.trace, actor, zone);
        ASSERT_TRUE(dense.any);
        ASSERT_FALSE(occ.empty());
        EXPECT_NEAR(occ.front().entry_time, dense.entry, outcome.trace.time_step);
        EXPECT_NEAR(occ.front().exit_time, dense.exit, outcome.trace.time_step);
      }
      const auto p = micro::pet(outcome.trace, "ego", "ped", zone);
      ASSERT_TRUE(p.defined);
      const auto de = dense_occupancy(outcome.trace, "ego", zone);
      const auto dp = dense_occupancy(outcome.trace, "ped", zone);
      const double expected = de.entry < dp.entry ? dp.entry - de.exit : de.entry - dp.exit;
      EXPECT_NEAR(p.value, expected, outcome.trace.time_step);
    }
  }
}

TEST(Pet, FromIntervals)
{
  const auto three = micro::pet_from_intervals({interval("ego", 20, 26)}, {interval("ped", 29, 33)});
  ASSERT_TRUE(three.defined);
  EXPECT_DOUBLE_EQ(three.value, 3.0);
  EXPECT_EQ(three.unit, "s");
  EXPECT_EQ(three.context.at("first_actor"), "ego");

  const auto swapped = micro::pet_from_intervals({interval("ego", 29, 33)}, {interval("ped", 20, 26)});
  EXPECT_DOUBLE_EQ(swapped.value, 3.0);
  EXPECT_EQ(swapped.context.at("first_actor"), "ped");

  const auto zero = micro::pet_from_intervals({interval("a", 1, 2)}, {interval("b", 2, 3)});
  EXPECT_TRUE(zero.defined);
  EXPECT_EQ(zero.value, 0.0);

  const auto overlap = micro::pet_from_intervals({interval("a", 1, 3)}, {interval("b", 2, 4)});
  EXPECT_FALSE(overlap.defined);
  EXPECT_EQ(overlap.context.at("conflict"), "overlap");

  EXPECT_FALSE(micro::pet_from_intervals({}, {interval("b", 2, 4)}).defined);
}

TEST(Et, FirstOccupancyDuration)
{
  const auto zone = micro::zone_from_paths(Polyline({{-10, 0}, {10, 0}}), Polyline({{0, -10}, {0, 10}}), 1.0, 0.3);
  // Entry at 10.0 s, exit at 14.5 s: 2.6 m of contact travel at 2.6 / 4.5 m/s.
  const double speed = 2.6 / 4.5;
  const Trace trace = make_trace(
    {linear_track("a", ActorClass::vehicle, {-1.3 - 10.0 * speed, 0}, {speed, 0}, 2001, 0.01)}, 0.01);
  const auto e = micro::et(trace, "a", zone);
  ASSERT_TRUE(e.defined);
  EXPECT_NEAR(e.value, 4.5, 1e-9);
  const Trace far = make_trace({linear_track("a", ActorClass::vehicle, {50, 50}, {1, 0}, 20, 0.1)}, 0.1);
  EXPECT_FALSE(micro::et(far, "a", zone).defined);
}

TEST(Aggregate, BasicCases)
{
  MetricSeries s{"euclidean_distance", {"a", "b"}, {{0, 5, "m", true}, {1, 5, "m", true}, {2, 5, "m", true}}};
  EXPECT_EQ(micro::aggregate(s, AggregateOp::min).value, 5.0);
  EXPECT_EQ(micro::aggregate(s, AggregateOp::min).metric_name, "min(euclidean_distance)");
  EXPECT_EQ(micro::aggregate(s, AggregateOp::mean).unit, "m");
  for (auto & r : s.results) {
    r.defined = false;
  }
  EXPECT_FALSE(micro::aggregate(s, AggregateOp::min).defined);
  EXPECT_THROW(micro::aggregate(MetricSeries{}, AggregateOp::min), InputError);
  EXPECT_THROW(aggregate_op_from_string("median"), InputError);
  EXPECT_EQ(aggregate_op_from_string("max"), AggregateOp::max);
}

TEST(Aggregate, MinDistanceMatchesFullScan)
{
  const auto outcome = test::run_sim({{"v_max", 54}, {"t_cross", 6}, {"d_start", 20}});
  const auto series = nano::euclidean_distance(outcome.trace, "ego", "ped");
  double lowest = 1e300;
  const auto & e = outcome.trace.track("ego").states;
  const auto & p = outcome.trace.track("ped").states;
  for (std::size_t i = 0; i < e.size(); ++i) {
    lowest = std::min(lowest, std::hypot(e[i].x - p[i].x, e[i].y - p[i].y));
  }
  EXPECT_NEAR(micro::aggregate(series, AggregateOp::min).value, lowest, 1e-12);
  EXPECT_NEAR(lowest, outcome.min_distance, 1e-9);
}

TEST(Aggregate, PeriodSplitIsConsistent)
{
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::bernoulli_distribution keep(0.8);
  for (int k = 0; k < 100; ++k) {
    MetricSeries s{"x", {"a"}, {}};
    for (int i = 0; i < 50; ++i) {
      s.results.push_back({0.1 * i, u(rng), "m", keep(rng)});
    }
    const double cut = 0.1 * (1 + rng() % 48);
    const std::vector<TimeInterval> whole{{0.0, 4.9}};
    const std::vector<TimeInterval> left{{0.0, cut}};
    const std::vector<TimeInterval> right{{cut, 4.9}};
    for (const auto op : {AggregateOp::min, AggregateOp::max}) {
      const auto w = micro::aggregate(s, op, whole);
      const auto l = micro::aggregate(s, op, left);
      const auto r = micro::aggregate(s, op, right);
      ASSERT_TRUE(w.defined);
      double combined = op == AggregateOp::min ? 1e300 : -1e300;
      for (const auto & part : {l, r}) {
        if (part.defined) {
          combined = op == AggregateOp::min ? std::min(combined, part.value) : std::max(combined, part.value);
        }
      }
      EXPECT_EQ(w.value, combined);
    }
    const auto m = micro::aggregate(s, AggregateOp::min, left);
    for (const auto & r : s.results) {
      if (r.defined && left.front().contains(r.time)) {
        EXPECT_LE(m.value, r.value);
      }
    }
  }
}

TEST(Inflation, MonotoneEffectOnPetAndEt)
{
  const auto outcome = test::run_sim({{"v_max", 48}, {"t_cross", 7}, {"d_start", 18}});
  double previous_pet = 1e300;
  double previous_et = -1.0;
  for (double inflation = 0.0; inflation <= 1.0; inflation += 0.25) {
    const auto zone = micro::build_encroachment_zone(outcome.trace, "ego", "ped", inflation);
    const auto p = micro::pet(outcome.trace, "ego", "ped", zone);
    const auto e = micro::et(outcome.trace, "ped", zone);
    ASSERT_TRUE(p.defined);
    ASSERT_TRUE(e.defined);
    EXPECT_GE(p.value, 0.0);
    EXPECT_LE(p.value, previous_pet + 1e-12);
    EXPECT_GE(e.value, previous_et - 1e-12);
    previous_pet = p.value;
    previous_et = e.value;
  }
}

TEST(ScalarJson, RoundTrip)
{
  ScalarResult r{"pet", 2.5, "s", true, {{"scenario_id", "x#1"}, {"first_actor", "ego"}}};
  const auto j = to_json(r);
  EXPECT_EQ(j.at("scenario_id"), "x#1");
  const auto back = scalar_from_json(j);
  EXPECT_EQ(back.value, 2.5);
  EXPECT_EQ(back.context, r.context);
  r.defined = false;
  EXPECT_TRUE(to_json(r).at("value").is_null());
}

}  // namespace
}  // namespace scenq
