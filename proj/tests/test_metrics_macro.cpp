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
#include "scenq/metrics_macro.hpp"

#include "oracles/frozen_oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <random>

namespace scenq
{
namespace
{

using test::linear_track;
using test::make_trace;

// Minimum cost over every monotone warp path, by plain recursion.
double dtw_exhaustive(const std::vector<Vec2> & a, const std::vector<Vec2> & b)
{
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double cost) {
    cost += distance(a[i], b[j]);
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = std::min(best, cost);
      return;
    }
    if (i + 1 < a.size()) {
      walk(i + 1, j, cost);
    }
    if (j + 1 < b.size()) {
      walk(i, j + 1, cost);
    }
    if (i + 1 < a.size() && j + 1 < b.size()) {
      walk(i + 1, j + 1, cost);
    }
  };
  walk(0, 0, 0.0);
  return best;
}

std::vector<Vec2> random_points(std::mt19937 & rng, std::size_t n)
{
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({u(rng), u(rng)});
  }
  return out;
}

Trace pair_at(double gap, const std::string & id)
{
  return make_trace(
    {linear_track("ego", ActorClass::vehicle, {0, 0}, {0, 0}, 3, 0.1),
     linear_track("ped", ActorClass::pedestrian, {gap, 0}, {0, 0}, 3, 0.1)},
    0.1, id);
}

ScalarResult scalar(double v, bool defined = true)
{
  return {"min(wttc)", v, "s", defined, {}};
}

std::vector<SweepPoint> sweep_of(const std::vector<double> & values)
{
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back({38.0 + static_cast<double>(i), scalar(values[i], !std::isnan(values[i]))});
  }
  return out;
}

TEST(Dtw, IdentityAndOffset)
{
  std::vector<Vec2> a;
  std::vector<Vec2> b;
  for (int i = 0; i < 2000; ++i) {
    a.push_back({0.1 * i, 0.0});
    b.push_back({0.1 * i, 0.005});
  }
  EXPECT_EQ(macro::dtw(a, a), 0.0);
  EXPECT_NEAR(macro::dtw(a, b), oracle::kDtwOffset2000, 1e-9);
  EXPECT_THROW(macro::dtw(std::span<const Vec2>{}, b), InputError);
}

TEST(Dtw, SymmetricAndNonNegative)
{
  std::mt19937 rng(1);
  for (int k = 0; k < 50; ++k) {
    const auto a = random_points(rng, 5 + rng() % 30);
    const auto b = random_points(rng, 5 + rng() % 30);
    const double ab = macro::dtw(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_DOUBLE_EQ(ab, macro::dtw(b, a));
  }
}

TEST(Dtw, MatchesExhaustiveEnumeration)
{
  std::mt19937 rng(4);
  for (int k = 0; k < 100; ++k) {
    const auto a = random_points(rng, 1 + rng() % 6);
    const auto b = random_points(rng, 1 + rng() % 6);
    EXPECT_NEAR(macro::dtw(a, b), dtw_exhaustive(a, b), 1e-9);
  }
}

TEST(Repeatability, DeterministicRunsAreIdentical)
{
  const auto reference = test::run_sim({{"v_max", 36}, {"t_cross", 6}, {"d_start", 14}});
  std::vector<Trace> runs;
  for (int k = 0; k < 10; ++k) {
    runs.push_back(test::run_sim({{"v_max", 36}, {"t_cross", 6}, {"d_start", 14}}).trace);
  }
  const auto report = macro::repeatability_report(reference.trace, runs, {"ego", "ped"});
  ASSERT_EQ(report.entries.size(), 20u);
  EXPECT_TRUE(report.all_within());
  for (const auto & e : report.entries) {
    EXPECT_EQ(e.dtw_distance, 0.0);
    EXPECT_LE(e.per_step, 1e-9);
  }
  EXPECT_DOUBLE_EQ(report.threshold, 10.0);
  EXPECT_TRUE(macro::repeatability_report(reference.trace, {}, {"ego"}).entries.empty());
}

TEST(Repeatability, DriftingRunExceedsThreshold)
{
  const std::size_t n = 2000;
  const Trace reference = make_trace({linear_track("ego", ActorClass::vehicle, {0, 0}, {5, 0}, n, 0.01)}, 0.01, "ref");
  Trace drifted = reference;
  drifted.scenario_id = "drift";
  for (auto & s : drifted.tracks.at("ego").states) {
    s.y += 0.02;
  }
  const std::vector<Trace> runs{reference, drifted};
  const auto report = macro::repeatability_report(reference, runs, {"ego"});
  ASSERT_EQ(report.entries.size(), 2u);
  EXPECT_TRUE(report.entries[0].within_threshold);
  EXPECT_FALSE(report.entries[1].within_threshold);
  EXPECT_NEAR(report.entries[1].dtw_distance, 0.02 * n, 0.2 * 0.02 * n);
  EXPECT_NEAR(report.entries[1].per_step, report.entries[1].dtw_distance / n, 1e-12);
  EXPECT_FALSE(report.all_within());
  EXPECT_THROW(macro::repeatability_report(reference, runs, {"ped"}), InputError);
}

TEST(CollisionProbability, CountsContacts)
{
  std::vector<Trace> traces;
  for (int i = 0; i < 600; ++i) {
    traces.push_back(pair_at(i < 3 ? 1.0 : 20.0, "s#" + std::to_string(i)));
  }
  EXPECT_DOUBLE_EQ(macro::collision_probability(traces), 0.005);
  std::shuffle(traces.begin(), traces.end(), std::mt19937(9));
  EXPECT_DOUBLE_EQ(macro::collision_probability(traces), 0.005);
  const std::vector<Trace> none{pair_at(20, "a"), pair_at(30, "b")};
  EXPECT_EQ(macro::collision_probability(none), 0.0);
  EXPECT_THROW(macro::collision_probability(std::span<const Trace>{}), InputError);
  // Touching counts as contact.
  EXPECT_TRUE(macro::has_contact(pair_at(1.3, "t")));
}

TEST(CollisionProbability, AgreesWithValidation)
{
  for (double gap = 0.5; gap < 3.0; gap += 0.1) {
    const Trace t = pair_at(gap, "g");
    EXPECT_EQ(macro::has_contact(t), validate_trace(t).count("collision") > 0) << gap;
  }
  const auto outcome = test::run_sim({{"v_max", 58}, {"t_cross", 9}, {"d_start", 10}});
  EXPECT_EQ(macro::has_contact(outcome.trace), outcome.collided);
  const std::vector<kin_sim::SimOutcome> outcomes{outcome};
  EXPECT_EQ(macro::collision_probability(outcomes), outcome.collided ? 1.0 : 0.0);
}

TEST(Coverage, FullEmptyAndHalf)
{
  const auto logical = test::intersection_logical();
  const auto grid = concretize(logical);
  const auto full = macro::parameter_coverage(logical, grid);
  EXPECT_EQ(full.overall, 1.0);
  for (const auto & [name, f] : full.per_parameter) {
    EXPECT_EQ(f, 1.0) << name;
  }
  EXPECT_TRUE(full.missing.empty());

  const auto empty = macro::parameter_coverage(logical, {});
  EXPECT_EQ(empty.overall, 0.0);
  EXPECT_EQ(empty.per_parameter.at("t_cross"), 0.0);
  EXPECT_EQ(empty.missing.size(), macro::kDefaultMissingCap);
  EXPECT_EQ(macro::parameter_coverage(logical, {}, 5).missing.size(), 5u);

  std::vector<ConcreteScenario> half;
  for (const auto & c : grid) {
    if (c.bindings.at("v_max") < 45) {
      half.push_back(c);
    }
  }
  ASSERT_EQ(half.size(), oracle::kHalfCoverageExecuted);
  const auto h = macro::parameter_coverage(logical, half);
  EXPECT_NEAR(h.per_parameter.at("v_max"), oracle::kHalfCoverageVmaxFraction, 1e-12);
  EXPECT_NEAR(h.overall, oracle::kHalfCoverageOverall, 1e-12);
  EXPECT_EQ(h.per_parameter.at("d_start"), 1.0);
}

TEST(Coverage, DuplicatesPermutationAndOffGrid)
{
  const auto logical = test::intersection_logical();
  auto some = concretize(logical);
  some.resize(100);
  const auto base = macro::parameter_coverage(logical, some);
  auto doubled = some;
  doubled.insert(doubled.end(), some.begin(), some.end());
  std::shuffle(doubled.begin(), doubled.end(), std::mt19937(3));
  const auto again = macro::parameter_coverage(logical, doubled);
  EXPECT_EQ(again.overall, base.overall);
  EXPECT_EQ(again.per_parameter, base.per_parameter);

  auto stray = some;
  stray.push_back(test::concrete({{"v_max", 31}, {"t_cross", 5}, {"d_start", 10}}));
  try {
    macro::parameter_coverage(logical, stray);
    FAIL() << "expected InputError";
  } catch (const InputError & e) {
    EXPECT_NE(std::string(e.what()).find("v_max"), std::string::npos) << e.what();
  }
}

TEST(Coverage, MonotoneUnderAdditions)
{
  const auto logical = test::intersection_logical();
  auto grid = concretize(logical);
  std::shuffle(grid.begin(), grid.end(), std::mt19937(8));
  std::vector<ConcreteScenario> executed;
  CoverageResult previous = macro::parameter_coverage(logical, executed);
  for (std::size_t i = 0; i < 120; ++i) {
    executed.push_back(grid[i]);
    const auto now = macro::parameter_coverage(logical, executed);
    EXPECT_GE(now.overall, previous.overall);
    for (const auto & [name, f] : now.per_parameter) {
      EXPECT_GE(f, previous.per_parameter.at(name));
    }
    previous = now;
  }
}

TEST(ResultGaps, ConstantAndStep)
{
  EXPECT_TRUE(macro::detect_result_gaps("x", sweep_of({2, 2, 2, 2, 2, 2})).empty());
  const auto step = macro::detect_result_gaps("x", sweep_of({1, 1, 1, 1, 4, 4, 4}));
  ASSERT_EQ(step.size(), 1u);
  EXPECT_EQ(step[0].left_value, 41.0);
  EXPECT_EQ(step[0].right_value, 42.0);
  EXPECT_NEAR(step[0].metric_jump.value_or(-1), 3.0, 1e-12);
  EXPECT_EQ(step[0].parameter, "x");

  // A jump on a sloped background is still found.
  const auto ramp = macro::detect_result_gaps("x", sweep_of({0.1, 0.2, 0.3, 0.4, 2.0, 2.1, 2.2}));
  ASSERT_EQ(ramp.size(), 1u);
  EXPECT_EQ(ramp[0].left_value, 41.0);
}

TEST(ResultGaps, DefinedUndefinedTransition)
{
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto found = macro::detect_result_gaps("x", sweep_of({1, 1, 1, nan, nan, 1, 1}));
  ASSERT_EQ(found.size(), 2u);
  EXPECT_FALSE(found[0].metric_jump.has_value());
  EXPECT_EQ(found[0].left_value, 40.0);
  EXPECT_EQ(found[1].right_value, 43.0);
  EXPECT_TRUE(to_json(found[0]).at("metric_jump").is_null());
}

TEST(ResultGaps, RejectsBadInput)
{
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(macro::detect_result_gaps("x", sweep_of({1, 2})), InputError);
  EXPECT_THROW(macro::detect_result_gaps("x", sweep_of({1, nan, nan, 2})), InputError);
  EXPECT_THROW(macro::detect_result_gaps("x", sweep_of({1, 2, 3}), 1.0), InputError);
  auto unsorted = sweep_of({1, 2, 3, 4});
  std::swap(unsorted[0], unsorted[1]);
  EXPECT_THROW(macro::detect_result_gaps("x", unsorted), InputError);
}

TEST(MacroJson, Shapes)
{
  const auto coverage = macro::parameter_coverage(test::intersection_logical(), {}, 2);
  const auto j = to_json(coverage);
  EXPECT_EQ(j.at("overall"), 0.0);
  EXPECT_EQ(j.at("missing").size(), 2u);
  RepeatabilityReport r{"ref", {{"ref:0", "ego", 1.0, 0.5, true}}, 10.0};
  EXPECT_EQ(to_json(r).at("entries").at(0).at("run_id"), "ref:0");
}

}  // namespace
}  // namespace scenq
