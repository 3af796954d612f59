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

#include "scenq/metrics_nano.hpp"

#include "scenq/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace scenq
{

namespace
{

constexpr double kClosingEps = 1e-6;
constexpr double kBrakingEps = 1e-6;
constexpr double kGapSpeedFloor = 1e-3;

// Cumulative traveled arc length per sample, for O(log n) lookups.
class ArcIndex
{
public:
  explicit ArcIndex(const ActorTrack & track) : track_(track)
  {
    arcs_.reserve(track.states.size());
    double s = 0.0;
    for (std::size_t i = 0; i < track.states.size(); ++i) {
      if (i > 0) {
        s += distance(track.states[i - 1].position(), track.states[i].position());
      }
      arcs_.push_back(s);
    }
  }

  double at(double t) const
  {
    const auto & st = track_.states;
    const auto it = std::lower_bound(
      st.begin(), st.end(), t, [](const ActorState & a, double v) { return a.time < v; });
    if (it == st.end()) {
      return arcs_.back();
    }
    const auto i = static_cast<std::size_t>(it - st.begin());
    if (it->time == t || i == 0) {
      return arcs_[i];
    }
    const double w = (t - st[i - 1].time) / (st[i].time - st[i - 1].time);
    return arcs_[i - 1] + w * (arcs_[i] - arcs_[i - 1]);
  }

private:
  const ActorTrack & track_;
  std::vector<double> arcs_;
};

MetricSeries make_series(std::string name, std::vector<std::string> actors)
{
  MetricSeries series;
  series.metric_name = std::move(name);
  series.actor_ids = std::move(actors);
  return series;
}

// Applies `fn(state_a, state_b) -> optional value` on the shared grid.
template <typename Fn>
MetricSeries pairwise(
  const Trace & trace, const std::string & a, const std::string & b, std::string name,
  const std::string & unit, Fn && fn)
{
  const ActorTrack & ta = trace.track(a);
  const ActorTrack & tb = trace.track(b);
  MetricSeries series = make_series(std::move(name), {a, b});
  for (const double t : shared_times(ta, tb)) {
    const ActorState sa = state_at(ta, t);
    const ActorState sb = state_at(tb, t);
    const std::optional<double> v = fn(sa, sb);
    series.results.push_back({t, v.value_or(0.0), unit, v.has_value()});
  }
  return series;
}

}  // namespace

std::size_t MetricSeries::defined_count() const
{
  return static_cast<std::size_t>(
    std::count_if(results.begin(), results.end(), [](const auto & r) { return r.defined; }));
}

ConflictPoint find_conflict_point(
  const Trace & trace, const std::string & ego, const std::string & other)
{
  const auto hit = first_crossing(traveled_path(trace.track(ego)), traveled_path(trace.track(other)));
  if (!hit) {
    throw InputError(fmt::format("paths of '{}' and '{}' do not cross", ego, other));
  }
  return {hit->point, hit->arc_a, hit->arc_b};
}

namespace nano
{

double ttc_instant(
  const Vec2 & relative_position, const Vec2 & relative_velocity, double contact_radius)
{
  const double range = norm(relative_position);
  const double gap = range - contact_radius;
  if (!(gap > 0.0)) {
    return -1.0;
  }
  const double closing = -dot(relative_position, relative_velocity) / range;
  if (!(closing > kClosingEps)) {
    return -1.0;
  }
  // |p + v t| = R  ->  a t^2 + b t + c = 0 with c > 0 and b < 0.
  const double a = dot(relative_velocity, relative_velocity);
  const double b = 2.0 * dot(relative_position, relative_velocity);
  const double c = range * range - contact_radius * contact_radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    return -1.0;  // passes by without contact
  }
  return 2.0 * c / (-b + std::sqrt(disc));
}

double wttc_instant(
  const Vec2 & relative_position, const Vec2 & relative_velocity, double contact_radius,
  double a_max_sum)
{
  const auto reachable = [&](double t) {
    return norm(relative_position + relative_velocity * t) <=
           contact_radius + 0.5 * a_max_sum * t * t;
  };
  if (reachable(0.0)) {
    return 0.0;
  }
  const auto steps = static_cast<int>(std::llround(kWttcHorizon / kWttcScanStep));
  for (int k = 1; k <= steps; ++k) {
    const double hi_t = k * kWttcScanStep;
    if (!reachable(hi_t)) {
      continue;
    }
    double lo = hi_t - kWttcScanStep;
    double hi = hi_t;
    while (hi - lo > kWttcTolerance) {
      const double mid = 0.5 * (lo + hi);
      (reachable(mid) ? hi : lo) = mid;
    }
    // Lower end of the bracket: never later than the true root.
    return lo;
  }
  return -1.0;
}

MetricSeries euclidean_distance(
  const Trace & trace, const std::string & actor_a, const std::string & actor_b)
{
  return pairwise(
    trace, actor_a, actor_b, "euclidean_distance", "m",
    [](const ActorState & a, const ActorState & b) -> std::optional<double> {
      return distance(a.position(), b.position());
    });
}

MetricSeries headway(const Trace & trace, const std::string & ego, const std::string & target)
{
  const double radii = trace.track(ego).radius + trace.track(target).radius;
  return pairwise(
    trace, ego, target, "headway", "m",
    [radii](const ActorState & e, const ActorState & o) -> std::optional<double> {
      const Vec2 forward{std::cos(e.heading), std::sin(e.heading)};
      const double along = dot(o.position() - e.position(), forward);
      if (!(along > 1e-12)) {
        return std::nullopt;
      }
      return along - radii;
    });
}

MetricSeries ttc(const Trace & trace, const std::string & ego, const std::string & target)
{
  const double radii = trace.track(ego).radius + trace.track(target).radius;
  return pairwise(
    trace, ego, target, "ttc", "s",
    [radii](const ActorState & e, const ActorState & o) -> std::optional<double> {
      const double t = ttc_instant(o.position() - e.position(), o.velocity() - e.velocity(), radii);
      if (t < 0.0) {
        return std::nullopt;
      }
      return t;
    });
}

MetricSeries wttc(
  const Trace & trace, const std::string & ego, const std::string & target, double a_max_ego,
  double a_max_target)
{
  if (!(a_max_ego >= 0.0) || !(a_max_target >= 0.0)) {
    throw InputError("wttc: maximum accelerations must be >= 0");
  }
  const double radii = trace.track(ego).radius + trace.track(target).radius;
  const double a_sum = a_max_ego + a_max_target;
  return pairwise(
    trace, ego, target, "wttc", "s",
    [radii, a_sum](const ActorState & e, const ActorState & o) -> std::optional<double> {
      const double t =
        wttc_instant(o.position() - e.position(), o.velocity() - e.velocity(), radii, a_sum);
      if (t < 0.0) {
        return std::nullopt;
      }
      return t;
    });
}

MetricSeries gap_time(
  const Trace & trace, const std::string & ego, const std::string & target,
  const ConflictPoint & conflict)
{
  const ActorTrack & te = trace.track(ego);
  const ActorTrack & tt = trace.track(target);
  const ArcIndex arc_e(te);
  const ArcIndex arc_t(tt);
  const auto times = shared_times(te, tt);
  if (arc_e.at(times.front()) >= conflict.ego_arc_length ||
      arc_t.at(times.front()) >= conflict.other_arc_length) {
    throw InputError(
      fmt::format("gap_time: conflict point is not ahead of '{}' and '{}'", ego, target));
  }
  MetricSeries series = make_series("gap_time", {ego, target});
  bool passed = false;
  for (const double t : times) {
    const double rem_e = conflict.ego_arc_length - arc_e.at(t);
    const double rem_t = conflict.other_arc_length - arc_t.at(t);
    passed = passed || rem_e <= 0.0 || rem_t <= 0.0;
    if (passed) {
      series.results.push_back({t, 0.0, "s", false});
      continue;
    }
    const double t_e = rem_e / std::max(state_at(te, t).speed, kGapSpeedFloor);
    const double t_t = rem_t / std::max(state_at(tt, t).speed, kGapSpeedFloor);
    series.results.push_back({t, std::abs(t_e - t_t), "s", true});
  }
  return series;
}

MetricSeries braking_time(const Trace & trace, const std::string & actor)
{
  const ActorTrack & track = trace.track(actor);
  MetricSeries series = make_series("braking_time", {actor});
  for (const auto & s : track.states) {
    if (s.acceleration < -kBrakingEps) {
      series.results.push_back({s.time, s.speed / std::abs(s.acceleration), "s", true});
    } else {
      series.results.push_back({s.time, 0.0, "s", false});
    }
  }
  return series;
}

MetricSeries braking_distance(const Trace & trace, const std::string & actor)
{
  const ActorTrack & track = trace.track(actor);
  MetricSeries series = make_series("braking_distance", {actor});
  for (const auto & s : track.states) {
    if (s.acceleration < -kBrakingEps) {
      series.results.push_back(
        {s.time, s.speed * s.speed / (2.0 * std::abs(s.acceleration)), "m", true});
    } else {
      series.results.push_back({s.time, 0.0, "m", false});
    }
  }
  return series;
}

MetricSeries traffic_density(
  const Trace & trace, const std::string & center_actor, double radius)
{
  if (!(radius > 0.0)) {
    throw InputError("traffic_density: radius must be positive");
  }
  const ActorTrack & center = trace.track(center_actor);
  const double area = std::numbers::pi * radius * radius;
  MetricSeries series = make_series("traffic_density", {center_actor});
  for (const auto & s : center.states) {
    std::size_t count = 0;
    for (const auto & [id, other] : trace.tracks) {
      if (id == center_actor || s.time < other.first_time() || s.time > other.last_time()) {
        continue;
      }
      if (distance(s.position(), state_at(other, s.time).position()) <= radius) {
        ++count;
      }
    }
    series.results.push_back({s.time, static_cast<double>(count) / area, "1/m^2", true});
  }
  return series;
}

}  // namespace nano

void write_series_csv(std::ostream & sink, const MetricSeries & series)
{
  sink << "time_s,value,defined\n";
  for (const auto & r : series.results) {
    sink << format_number(r.time) << ',';
    if (r.defined) {
      sink << format_number(r.value);
    }
    sink << ',' << (r.defined ? 1 : 0) << '\n';
  }
}

nlohmann::json series_header_json(const MetricSeries & series, const nlohmann::json & parameters)
{
  std::string unit;
  for (const auto & r : series.results) {
    if (r.defined) {
      unit = r.unit;
      break;
    }
  }
  if (unit.empty() && !series.results.empty()) {
    unit = series.results.front().unit;
  }
  return {
    {"metric_name", series.metric_name},
    {"unit", unit},
    {"actor_ids", series.actor_ids},
    {"parameters", parameters},
  };
}

}  // namespace scenq
