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

#include "scenq/criteria.hpp"

#include "parallel.hpp"
#include "scenq/error.hpp"
#include "scenq/metrics_macro.hpp"
#include "scenq/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace scenq
{

namespace
{

constexpr double kEqTolerance = 1e-9;
constexpr double kContainTolerance = 1e-9;

const std::vector<std::string> & need_actors(const MetricSpec & spec, std::size_t n)
{
  if (spec.actors.size() < n) {
    throw InputError(fmt::format(
      "metric '{}' needs {} actor id(s), got {}", spec.name, n, spec.actors.size()));
  }
  return spec.actors;
}

double param_or(const MetricSpec & spec, const char * key, double fallback)
{
  if (!spec.params.is_object() || !spec.params.contains(key)) {
    return fallback;
  }
  const auto & v = spec.params.at(key);
  if (!v.is_number()) {
    throw InputError(fmt::format("metric '{}' parameter '{}' must be a number", spec.name, key));
  }
  return v.get<double>();
}

double default_max_accel(const ActorTrack & track)
{
  return track.actor_class == ActorClass::pedestrian ? nano::kDefaultPedestrianMaxAccel
                                                     : nano::kDefaultVehicleMaxAccel;
}

std::optional<double> parse_double(const std::string & text)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

ScalarResult undefined_scalar(const std::string & name, const std::string & unit)
{
  ScalarResult r;
  r.metric_name = name;
  r.unit = unit;
  return r;
}

ConcreteScenario concrete_from_trace(const Trace & trace, std::size_t fallback_index)
{
  ConcreteScenario c;
  c.scenario_id = trace.scenario_id;
  c.logical_id = trace.metadata.count("logical_id") ? trace.metadata.at("logical_id") : "";
  c.index = scenario_index_of(trace, fallback_index);
  for (const auto & [key, value] : trace.metadata) {
    if (key.rfind("param.", 0) == 0) {
      const auto v = parse_double(value);
      if (!v) {
        throw InputError(
          fmt::format("trace '{}' parameter '{}' is not numeric", trace.scenario_id, key));
      }
      c.bindings[key.substr(6)] = *v;
    }
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Comparators and enums

Comparator comparator_from_string(const std::string & text)
{
  static const std::map<std::string, Comparator> table{
    {"<", Comparator::lt},   {"lt", Comparator::lt},  {"<=", Comparator::le},
    {"le", Comparator::le},  {"≤", Comparator::le},   {">", Comparator::gt},
    {"gt", Comparator::gt},  {">=", Comparator::ge},  {"ge", Comparator::ge},
    {"≥", Comparator::ge},   {"=", Comparator::eq},   {"==", Comparator::eq},
    {"eq", Comparator::eq}};
  const auto it = table.find(text);
  if (it == table.end()) {
    throw InputError(fmt::format("unknown comparator '{}'", text));
  }
  return it->second;
}

std::string to_string(Comparator comparator)
{
  switch (comparator) {
    case Comparator::lt:
      return "<";
    case Comparator::le:
      return "<=";
    case Comparator::gt:
      return ">";
    case Comparator::ge:
      return ">=";
    case Comparator::eq:
      return "=";
  }
  return "=";
}

bool compare(double value, Comparator comparator, double bound)
{
  switch (comparator) {
    case Comparator::lt:
      return value < bound;
    case Comparator::le:
      return value <= bound;
    case Comparator::gt:
      return value > bound;
    case Comparator::ge:
      return value >= bound;
    case Comparator::eq:
      return std::abs(value - bound) <=
             kEqTolerance * std::max(std::abs(value), std::abs(bound));
  }
  return false;
}

Comparator negate(Comparator comparator)
{
  switch (comparator) {
    case Comparator::lt:
      return Comparator::ge;
    case Comparator::le:
      return Comparator::gt;
    case Comparator::gt:
      return Comparator::le;
    case Comparator::ge:
      return Comparator::lt;
    case Comparator::eq:
      return Comparator::eq;
  }
  return comparator;
}

std::string to_string(Perspective perspective)
{
  switch (perspective) {
    case Perspective::simulation:
      return "simulation";
    case Perspective::sut:
      return "sut";
    case Perspective::scenario:
      return "scenario";
  }
  return "sut";
}

std::string to_string(Level level)
{
  switch (level) {
    case Level::nanoscopic:
      return "nanoscopic";
    case Level::microscopic:
      return "microscopic";
    case Level::macroscopic:
      return "macroscopic";
  }
  return "microscopic";
}

Perspective perspective_from_string(const std::string & text)
{
  if (text == "simulation") {
    return Perspective::simulation;
  }
  if (text == "sut") {
    return Perspective::sut;
  }
  if (text == "scenario") {
    return Perspective::scenario;
  }
  throw InputError(fmt::format("unknown perspective '{}'", text));
}

Level level_from_string(const std::string & text)
{
  if (text == "nanoscopic" || text == "nano") {
    return Level::nanoscopic;
  }
  if (text == "microscopic" || text == "micro") {
    return Level::microscopic;
  }
  if (text == "macroscopic" || text == "macro") {
    return Level::macroscopic;
  }
  throw InputError(fmt::format("unknown level '{}'", text));
}

std::string to_string(Outcome outcome)
{
  switch (outcome) {
    case Outcome::pass:
      return "pass";
    case Outcome::fail:
      return "fail";
    case Outcome::score:
      return "score";
    case Outcome::not_applicable:
      return "not_applicable";
  }
  return "not_applicable";
}

std::size_t scenario_index_of(const Trace & trace, std::size_t fallback)
{
  const auto it = trace.metadata.find("index");
  if (it == trace.metadata.end()) {
    return fallback;
  }
  std::size_t v = 0;
  const auto & s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() ? v : fallback;
}

// ---------------------------------------------------------------------------
// Registry

MetricRegistry::MetricRegistry()
{
  const auto add_series = [this](MetricInfo info, SeriesFn fn) {
    info.arity = MetricArity::series;
    entries_[info.name] = Entry{info, std::move(fn), nullptr, nullptr};
  };
  const auto add_scalar = [this](MetricInfo info, ScalarFn fn) {
    info.arity = MetricArity::scalar;
    entries_[info.name] = Entry{info, nullptr, std::move(fn), nullptr};
  };
  const auto add_set = [this](MetricInfo info, SetFn fn) {
    info.arity = MetricArity::set;
    entries_[info.name] = Entry{info, nullptr, nullptr, std::move(fn)};
  };
  using W = WorseDirection;

  add_series({"euclidean_distance", "m", {}, W::lower}, [](const auto & spec, const auto & trace) {
    const auto & a = need_actors(spec, 2);
    return nano::euclidean_distance(trace, a[0], a[1]);
  });
  add_series({"headway", "m", {}, W::lower}, [](const auto & spec, const auto & trace) {
    const auto & a = need_actors(spec, 2);
    return nano::headway(trace, a[0], a[1]);
  });
  add_series({"ttc", "s", {}, W::lower}, [](const auto & spec, const auto & trace) {
    const auto & a = need_actors(spec, 2);
    return nano::ttc(trace, a[0], a[1]);
  });
  add_series({"wttc", "s", {}, W::lower}, [](const auto & spec, const Trace & trace) {
    const auto & a = need_actors(spec, 2);
    const double ae = param_or(spec, "a_max_ego", default_max_accel(trace.track(a[0])));
    const double at = param_or(spec, "a_max_target", default_max_accel(trace.track(a[1])));
    return nano::wttc(trace, a[0], a[1], ae, at);
  });
  add_series({"gap_time", "s", {}, W::lower}, [](const auto & spec, const Trace & trace) {
    const auto & a = need_actors(spec, 2);
    return nano::gap_time(trace, a[0], a[1], find_conflict_point(trace, a[0], a[1]));
  });
  add_series({"braking_time", "s", {}, W::higher}, [](const auto & spec, const auto & trace) {
    return nano::braking_time(trace, need_actors(spec, 1)[0]);
  });
  add_series({"braking_distance", "m", {}, W::higher}, [](const auto & spec, const auto & trace) {
    return nano::braking_distance(trace, need_actors(spec, 1)[0]);
  });
  add_series({"traffic_density", "1/m^2", {}, W::higher}, [](const auto & spec, const auto & trace) {
    return nano::traffic_density(trace, need_actors(spec, 1)[0], param_or(spec, "radius", 50.0));
  });

  add_scalar({"pet", "s", {}, W::lower}, [](const auto & spec, const Trace & trace) {
    const auto & a = need_actors(spec, 2);
    try {
      return micro::pet(
        trace, a[0], a[1], micro::build_encroachment_zone(trace, a[0], a[1], param_or(spec, "inflation", 0.0)));
    } catch (const InputError &) {
      throw;
    } catch (const Error &) {
      ScalarResult r = undefined_scalar("pet", "s");
      r.context = {{"scenario_id", trace.scenario_id}, {"conflict", "no_crossing"}};
      return r;
    }
  });
  add_scalar({"et", "s", {}, W::higher}, [](const auto & spec, const Trace & trace) {
    const auto & a = need_actors(spec, 2);
    try {
      return micro::et(
        trace, a[0], micro::build_encroachment_zone(trace, a[0], a[1], param_or(spec, "inflation", 0.0)));
    } catch (const InputError &) {
      throw;
    } catch (const Error &) {
      ScalarResult r = undefined_scalar("et", "s");
      r.context = {{"scenario_id", trace.scenario_id}, {"conflict", "no_crossing"}};
      return r;
    }
  });

  add_set({"collision_probability", "1", {}, W::higher}, [](const auto &, std::span<const Trace> traces) {
    ScalarResult r;
    r.metric_name = "collision_probability";
    r.unit = "1";
    r.value = macro::collision_probability(traces);
    r.defined = true;
    r.context = {{"scenario_id", "set"}, {"scenarios", std::to_string(traces.size())}};
    return std::vector<ScalarResult>{r};
  });
  add_set({"dtw", "m", {}, W::higher}, [](const MetricSpec & spec, std::span<const Trace> traces) {
    if (traces.empty()) {
      throw InputError("dtw needs a reference trace");
    }
    std::vector<std::string> actors = spec.actors;
    if (actors.empty()) {
      for (const auto & [id, track] : traces.front().tracks) {
        actors.push_back(id);
      }
    }
    const auto report = macro::repeatability_report(
      traces.front(), traces.subspan(1), actors, param_or(spec, "threshold", macro::kDefaultDtwThreshold));
    std::vector<ScalarResult> out;
    for (const auto & e : report.entries) {
      ScalarResult r;
      r.metric_name = "dtw";
      r.unit = "m";
      r.value = e.dtw_distance;
      r.defined = true;
      r.context = {
        {"scenario_id", e.run_id},
        {"reference_id", report.reference_id},
        {"actors", e.actor_id},
        {"per_step", format_number(e.per_step)}};
      out.push_back(std::move(r));
    }
    return out;
  });
  add_set({"parameter_coverage", "1", {}, W::lower}, [](const MetricSpec & spec, std::span<const Trace> traces) {
    if (!spec.params.is_object() || !spec.params.contains("logical")) {
      throw InputError("parameter_coverage needs the logical scenario");
    }
    const LogicalScenario logical = logical_from_json(spec.params.at("logical"));
    std::vector<ConcreteScenario> executed;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      executed.push_back(concrete_from_trace(traces[i], i));
    }
    const auto cov = macro::parameter_coverage(logical, executed);
    ScalarResult r;
    r.metric_name = "parameter_coverage";
    r.unit = "1";
    r.value = cov.overall;
    r.defined = true;
    r.context["scenario_id"] = logical.scenario_id;
    for (const auto & [name, frac] : cov.per_parameter) {
      r.context["coverage." + name] = format_number(frac);
    }
    return std::vector<ScalarResult>{r};
  });
}

const MetricRegistry & MetricRegistry::builtin()
{
  static const MetricRegistry registry;
  return registry;
}

bool MetricRegistry::contains(const std::string & name) const { return entries_.count(name) > 0; }

const MetricRegistry::Entry & MetricRegistry::entry(const std::string & name) const
{
  const auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw InputError(fmt::format("unknown metric '{}'", name));
  }
  return it->second;
}

const MetricInfo & MetricRegistry::info(const std::string & name) const { return entry(name).info; }

std::vector<std::string> MetricRegistry::names() const
{
  std::vector<std::string> out;
  for (const auto & [name, e] : entries_) {
    out.push_back(name);
  }
  return out;
}

MetricSeries MetricRegistry::series(const MetricSpec & spec, const Trace & trace) const
{
  const Entry & e = entry(spec.name);
  if (!e.series) {
    throw InputError(fmt::format("metric '{}' is not a per-step series", spec.name));
  }
  return e.series(spec, trace);
}

ScalarResult MetricRegistry::scalar(const MetricSpec & spec, const Trace & trace) const
{
  const Entry & e = entry(spec.name);
  if (!e.scalar) {
    throw InputError(fmt::format("metric '{}' is not a per-scenario scalar", spec.name));
  }
  return e.scalar(spec, trace);
}

std::vector<ScalarResult> MetricRegistry::set(
  const MetricSpec & spec, std::span<const Trace> traces) const
{
  const Entry & e = entry(spec.name);
  if (!e.set) {
    throw InputError(fmt::format("metric '{}' is not a scenario-set metric", spec.name));
  }
  return e.set(spec, traces);
}

// ---------------------------------------------------------------------------
// Application periods

std::vector<double> reference_times(const Trace & trace)
{
  if (trace.tracks.empty()) {
    throw InputError(fmt::format("trace '{}' has no actors", trace.scenario_id));
  }
  const auto [lo, hi] = trace.overlap();
  std::vector<double> times;
  for (const auto & s : trace.tracks.begin()->second.states) {
    if (s.time >= lo && s.time <= hi) {
      times.push_back(s.time);
    }
  }
  if (times.empty()) {
    throw InputError(fmt::format("trace '{}' has no samples in its overlap", trace.scenario_id));
  }
  return times;
}

namespace
{

std::string signal_unit(Signal signal)
{
  switch (signal) {
    case Signal::speed:
      return "m/s";
    case Signal::acceleration:
      return "m/s^2";
    case Signal::distance_between:
      return "m";
    case Signal::time:
      return "s";
    case Signal::metric_value:
      return "";
  }
  return "";
}

std::optional<double> series_value_at(const MetricSeries & series, double t)
{
  const auto & r = series.results;
  const auto it = std::lower_bound(
    r.begin(), r.end(), t, [](const MetricResult & m, double v) { return m.time < v; });
  if (it != r.end() && it->time == t) {
    return it->defined ? std::optional<double>(it->value) : std::nullopt;
  }
  if (it == r.begin() || it == r.end()) {
    return std::nullopt;
  }
  const auto & b = *it;
  const auto & a = *std::prev(it);
  if (!a.defined || !b.defined) {
    return std::nullopt;
  }
  const double w = (t - a.time) / (b.time - a.time);
  return a.value + w * (b.value - a.value);
}

// Flattened condition tree with per-sample leaf values.
class ConditionSampler
{
public:
  ConditionSampler(const ConditionNode & root, const Trace & trace, std::vector<double> times)
  : trace_(trace), times_(std::move(times))
  {
    root_ = add(root);
  }

  const std::vector<double> & times() const { return times_; }

  bool truth_at_sample(std::size_t i) const
  {
    std::vector<bool> leaf(leaves_.size());
    for (std::size_t k = 0; k < leaves_.size(); ++k) {
      leaf[k] = leaf_truth(k, i);
    }
    return eval(root_, leaf);
  }

  // Time in (t[i-1], t[i]] where the root takes its value at sample i,
  // assuming every leaf signal is linear between the samples.
  double edge_time(std::size_t i) const
  {
    const double t0 = times_[i - 1];
    const double t1 = times_[i];
    std::vector<bool> leaf(leaves_.size());
    std::vector<std::pair<double, std::size_t>> flips;
    for (std::size_t k = 0; k < leaves_.size(); ++k) {
      leaf[k] = leaf_truth(k, i - 1);
      if (leaf[k] != leaf_truth(k, i)) {
        flips.emplace_back(leaf_flip_time(k, i), k);
      }
    }
    std::sort(flips.begin(), flips.end());
    const bool target = eval(root_, [&] {
      std::vector<bool> end(leaves_.size());
      for (std::size_t k = 0; k < leaves_.size(); ++k) {
        end[k] = leaf_truth(k, i);
      }
      return end;
    }());
    for (std::size_t f = 0; f < flips.size();) {
      const double tf = flips[f].first;
      for (; f < flips.size() && flips[f].first == tf; ++f) {
        leaf[flips[f].second] = !leaf[flips[f].second];
      }
      if (eval(root_, leaf) == target) {
        return std::clamp(tf, t0, t1);
      }
    }
    return t1;
  }

private:
  struct Leaf
  {
    ConditionLeaf def;
    std::vector<std::optional<double>> values;
  };
  struct Node
  {
    bool is_leaf{true};
    std::size_t leaf{0};
    LogicOp op{LogicOp::all_of};
    std::vector<std::size_t> children;
  };

  std::size_t add(const ConditionNode & node)
  {
    Node n;
    if (const auto * leaf = std::get_if<ConditionLeaf>(&node.value)) {
      n.leaf = leaves_.size();
      leaves_.push_back({*leaf, sample(*leaf)});
    } else {
      const auto & branch = std::get<ConditionBranch>(node.value);
      if (branch.children.size() < 2) {
        throw InputError("condition branches need at least two children");
      }
      n.is_leaf = false;
      n.op = branch.op;
      for (const auto & child : branch.children) {
        n.children.push_back(add(child));
      }
    }
    nodes_.push_back(n);
    return nodes_.size() - 1;
  }

  std::vector<std::optional<double>> sample(const ConditionLeaf & leaf) const
  {
    std::string unit = signal_unit(leaf.signal);
    std::optional<MetricSeries> series;
    if (leaf.signal == Signal::metric_value) {
      if (!leaf.metric) {
        throw InputError("metric_value condition without a metric");
      }
      unit = MetricRegistry::builtin().info(leaf.metric->name).unit;
      series = MetricRegistry::builtin().series(*leaf.metric, trace_);
    }
    if (!leaf.unit.empty() && leaf.unit != unit) {
      throw InputError(fmt::format("condition unit '{}' does not match signal unit '{}'", leaf.unit, unit));
    }
    const auto actor = [&](std::size_t k) -> const ActorTrack & {
      if (leaf.actors.size() <= k) {
        throw InputError("condition signal is missing an actor reference");
      }
      return trace_.track(leaf.actors[k]);
    };
    std::vector<std::optional<double>> out;
    out.reserve(times_.size());
    for (const double t : times_) {
      switch (leaf.signal) {
        case Signal::speed:
          out.push_back(state_at(actor(0), t).speed);
          break;
        case Signal::acceleration:
          out.push_back(state_at(actor(0), t).acceleration);
          break;
        case Signal::distance_between:
          out.push_back(distance(state_at(actor(0), t).position(), state_at(actor(1), t).position()));
          break;
        case Signal::time:
          out.push_back(t);
          break;
        case Signal::metric_value:
          out.push_back(series_value_at(*series, t));
          break;
      }
    }
    return out;
  }

  bool leaf_truth(std::size_t k, std::size_t i) const
  {
    const Leaf & l = leaves_[k];
    return l.values[i] && compare(*l.values[i], l.def.comparator, l.def.bound);
  }

  double leaf_flip_time(std::size_t k, std::size_t i) const
  {
    const Leaf & l = leaves_[k];
    const auto & v0 = l.values[i - 1];
    const auto & v1 = l.values[i];
    if (!v0 || !v1 || l.def.comparator == Comparator::eq) {
      return times_[i];
    }
    const double g0 = *v0 - l.def.bound;
    const double g1 = *v1 - l.def.bound;
    if (g0 == g1) {
      return times_[i];
    }
    const double w = std::clamp(g0 / (g0 - g1), 0.0, 1.0);
    return times_[i - 1] + w * (times_[i] - times_[i - 1]);
  }

  bool eval(std::size_t node, const std::vector<bool> & leaf) const
  {
    const Node & n = nodes_[node];
    if (n.is_leaf) {
      return leaf[n.leaf];
    }
    if (n.op == LogicOp::all_of) {
      return std::all_of(n.children.begin(), n.children.end(), [&](auto c) { return eval(c, leaf); });
    }
    return std::any_of(n.children.begin(), n.children.end(), [&](auto c) { return eval(c, leaf); });
  }

  const Trace & trace_;
  std::vector<double> times_;
  std::vector<Leaf> leaves_;
  std::vector<Node> nodes_;
  std::size_t root_{0};
};

std::optional<double> passed_conflict_time(const Trace & trace, const std::vector<std::string> & actors)
{
  if (actors.size() < 2) {
    throw InputError("event 'actor_passed_conflict' needs [actor, other]");
  }
  const ActorTrack & track = trace.track(actors[0]);
  trace.track(actors[1]);
  ConflictPoint conflict;
  try {
    conflict = find_conflict_point(trace, actors[0], actors[1]);
  } catch (const InputError &) {
    return std::nullopt;  // paths never cross
  }
  const auto & st = track.states;
  double arc = 0.0;
  for (std::size_t i = 1; i < st.size(); ++i) {
    const double seg = distance(st[i - 1].position(), st[i].position());
    if (arc + seg >= conflict.ego_arc_length && seg > 0.0) {
      const double w = std::clamp((conflict.ego_arc_length - arc) / seg, 0.0, 1.0);
      return st[i - 1].time + w * (st[i].time - st[i - 1].time);
    }
    arc += seg;
  }
  return std::nullopt;
}

std::optional<double> collision_time(const Trace & trace, const std::vector<std::string> & actors)
{
  std::vector<std::pair<const ActorTrack *, const ActorTrack *>> pairs;
  if (actors.empty()) {
    for (auto a = trace.tracks.begin(); a != trace.tracks.end(); ++a) {
      for (auto b = std::next(a); b != trace.tracks.end(); ++b) {
        pairs.emplace_back(&a->second, &b->second);
      }
    }
  } else if (actors.size() == 2) {
    pairs.emplace_back(&trace.track(actors[0]), &trace.track(actors[1]));
  } else {
    throw InputError("event 'collision' takes no actors or an actor pair");
  }
  std::optional<double> first;
  for (const auto & [a, b] : pairs) {
    const double r = a->radius + b->radius;
    double prev_t = 0.0;
    double prev_m = 0.0;
    bool have_prev = false;
    for (const double t : shared_times(*a, *b)) {
      const double m = distance(state_at(*a, t).position(), state_at(*b, t).position()) - r;
      if (m <= 0.0) {
        double hit = t;
        if (have_prev && prev_m > 0.0) {
          hit = prev_t + prev_m / (prev_m - m) * (t - prev_t);
        }
        first = first ? std::min(*first, hit) : hit;
        break;
      }
      prev_t = t;
      prev_m = m;
      have_prev = true;
    }
  }
  return first;
}

std::optional<double> event_time(const StopOnEvent & event, const Trace & trace)
{
  if (event.name == "actor_passed_conflict") {
    return passed_conflict_time(trace, event.actors);
  }
  if (event.name == "collision") {
    return collision_time(trace, event.actors);
  }
  if (event.name == "scenario_end") {
    return trace.overlap().second;
  }
  throw InputError(fmt::format("unknown event '{}'", event.name));
}

}  // namespace

std::vector<TimeInterval> active_intervals(const ApplicationPeriod & period, const Trace & trace)
{
  ConditionSampler sampler(period.start_condition, trace, reference_times(trace));
  const auto & t = sampler.times();
  const double t_end = t.back();

  // Rising and falling edges of the start condition.
  std::vector<TimeInterval> held;
  bool is_open = false;
  double open_at = 0.0;
  bool prev = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const bool now = sampler.truth_at_sample(i);
    if (i == 0) {
      is_open = now;
      open_at = t[0];
    } else if (now != prev) {
      const double edge = sampler.edge_time(i);
      if (now) {
        is_open = true;
        open_at = edge;
      } else {
        held.push_back({open_at, edge});
        is_open = false;
      }
    }
    prev = now;
  }
  if (is_open) {
    held.push_back({open_at, t_end});
  }

  if (std::holds_alternative<StopWhenFalse>(period.stop)) {
    return held;
  }

  std::vector<TimeInterval> out;
  double busy_until = -std::numeric_limits<double>::infinity();
  if (const auto * elapsed = std::get_if<StopAfterElapsed>(&period.stop)) {
    if (!(elapsed->duration > 0.0)) {
      throw InputError("elapsed stop rule needs a positive duration");
    }
    for (const auto & h : held) {
      if (h.begin < busy_until) {
        continue;  // still inside the previous window
      }
      out.push_back({h.begin, std::min(h.begin + elapsed->duration, t_end)});
      busy_until = out.back().end;
    }
    return out;
  }

  // A one-shot event that already happened closes nothing new.
  const auto te = event_time(std::get<StopOnEvent>(period.stop), trace);
  for (const auto & h : held) {
    if (h.begin < busy_until) {
      continue;
    }
    const double end = te ? *te : t_end;
    if (end > h.begin) {
      out.push_back({h.begin, std::min(end, t_end)});
      busy_until = out.back().end;
    }
  }
  return out;
}

std::vector<TimeInterval> active_intervals(
  const std::optional<ApplicationPeriod> & period, const Trace & trace)
{
  if (period) {
    return active_intervals(*period, trace);
  }
  const auto [lo, hi] = trace.overlap();
  return {{lo, hi}};
}

// ---------------------------------------------------------------------------
// Verdicts

namespace
{

void check_unit(const QualityCriterion & criterion, const std::string & metric_unit)
{
  const std::string & unit = std::visit([](const auto & e) -> const std::string & { return e.unit; }, criterion.evaluation);
  if (!unit.empty() && !metric_unit.empty() && unit != metric_unit) {
    throw InputError(fmt::format(
      "criterion '{}' uses unit '{}' but metric '{}' is in '{}'", criterion.criterion_id, unit,
      criterion.metric.name, metric_unit));
  }
}

double scale_score(const ScaleEvaluation & scale, double value)
{
  if (scale.breakpoints.empty()) {
    throw InputError("evaluation scale without breakpoints");
  }
  double score = scale.breakpoints.front().second;
  for (const auto & [bound, s] : scale.breakpoints) {
    if (value >= bound) {
      score = s;
    }
  }
  return score;
}

// Fills outcome/score/worst_result from the defined results in scope.
void judge(
  Verdict & verdict, const QualityCriterion & criterion, const std::vector<MetricResult> & results)
{
  if (results.empty()) {
    verdict.outcome = Outcome::not_applicable;
    return;
  }
  if (const auto * th = std::get_if<ThresholdEvaluation>(&criterion.evaluation)) {
    // The result closest to violating, or the worst violation.
    const auto badness = [&](const MetricResult & r) {
      switch (th->comparator) {
        case Comparator::gt:
        case Comparator::ge:
          return -r.value;
        case Comparator::lt:
        case Comparator::le:
          return r.value;
        case Comparator::eq:
          return std::abs(r.value - th->value);
      }
      return 0.0;
    };
    const auto worst = std::max_element(
      results.begin(), results.end(),
      [&](const auto & a, const auto & b) { return badness(a) < badness(b); });
    const bool ok = std::all_of(results.begin(), results.end(), [&](const MetricResult & r) {
      return compare(r.value, th->comparator, th->value);
    });
    verdict.outcome = ok ? Outcome::pass : Outcome::fail;
    verdict.worst_result = *worst;
    return;
  }
  const auto & scale = std::get<ScaleEvaluation>(criterion.evaluation);
  const bool lower_worse =
    MetricRegistry::builtin().contains(criterion.metric.name)
      ? MetricRegistry::builtin().info(criterion.metric.name).worse == WorseDirection::lower
      : true;
  const auto worst = std::min_element(
    results.begin(), results.end(), [&](const auto & a, const auto & b) {
      return lower_worse ? a.value < b.value : a.value > b.value;
    });
  verdict.outcome = Outcome::score;
  verdict.score = scale_score(scale, worst->value);
  verdict.worst_result = *worst;
}

MetricResult as_result(const ScalarResult & scalar)
{
  return {std::numeric_limits<double>::quiet_NaN(), scalar.value, scalar.unit, scalar.defined};
}

}  // namespace

Verdict evaluate_criterion(
  const QualityCriterion & criterion, const MetricSeries & series, const Trace & trace)
{
  if (!series.results.empty()) {
    check_unit(criterion, series.results.front().unit);
  }
  Verdict v;
  v.criterion_id = criterion.criterion_id;
  v.scenario_id = trace.scenario_id;
  v.scenario_index = scenario_index_of(trace, 0);
  v.evaluated_intervals = active_intervals(criterion.application_period, trace);
  if (v.evaluated_intervals.empty()) {
    return v;
  }
  if (criterion.aggregate) {
    ScalarResult agg = micro::aggregate(series, *criterion.aggregate, v.evaluated_intervals);
    std::vector<MetricResult> in_scope;
    if (agg.defined) {
      in_scope.push_back(as_result(agg));
    }
    judge(v, criterion, in_scope);
    return v;
  }
  std::vector<MetricResult> in_scope;
  for (const auto & r : series.results) {
    if (r.defined && std::any_of(v.evaluated_intervals.begin(), v.evaluated_intervals.end(), [&](const TimeInterval & iv) {
          return iv.contains(r.time, kContainTolerance);
        })) {
      in_scope.push_back(r);
    }
  }
  judge(v, criterion, in_scope);
  return v;
}

Verdict evaluate_criterion(
  const QualityCriterion & criterion, const ScalarResult & scalar, const Trace * trace)
{
  check_unit(criterion, scalar.unit);
  Verdict v;
  v.criterion_id = criterion.criterion_id;
  if (const auto it = scalar.context.find("scenario_id"); it != scalar.context.end()) {
    v.scenario_id = it->second;
  } else if (trace) {
    v.scenario_id = trace->scenario_id;
  }
  if (trace) {
    v.scenario_index = scenario_index_of(*trace, 0);
    v.evaluated_intervals = active_intervals(criterion.application_period, *trace);
    if (v.evaluated_intervals.empty()) {
      return v;
    }
  }
  std::vector<MetricResult> in_scope;
  if (scalar.defined) {
    in_scope.push_back(as_result(scalar));
  }
  judge(v, criterion, in_scope);
  return v;
}

// ---------------------------------------------------------------------------
// Suites and reports

namespace
{

std::optional<double> pass_rate_of(const std::vector<Verdict> & verdicts)
{
  std::size_t pass = 0;
  std::size_t fail = 0;
  for (const auto & v : verdicts) {
    pass += v.outcome == Outcome::pass ? 1 : 0;
    fail += v.outcome == Outcome::fail ? 1 : 0;
  }
  if (pass + fail == 0) {
    return std::nullopt;
  }
  return static_cast<double>(pass) / static_cast<double>(pass + fail);
}

void finalize(MatrixCell & cell)
{
  std::stable_sort(cell.verdicts.begin(), cell.verdicts.end(), [](const auto & a, const auto & b) {
    return std::tie(a.criterion_id, a.scenario_index) < std::tie(b.criterion_id, b.scenario_index);
  });
  cell.pass_rate = pass_rate_of(cell.verdicts);
}

void check_arity(const QualityCriterion & c, const MetricInfo & info, Level level)
{
  bool ok = false;
  switch (level) {
    case Level::nanoscopic:
      ok = info.arity == MetricArity::series && !c.aggregate;
      break;
    case Level::microscopic:
      ok = info.arity == MetricArity::scalar || (info.arity == MetricArity::series && c.aggregate);
      break;
    case Level::macroscopic:
      ok = info.arity == MetricArity::set;
      break;
  }
  if (!ok) {
    throw InputError(fmt::format(
      "criterion '{}': metric '{}' does not fit the {} level", c.criterion_id, info.name,
      to_string(level)));
  }
  if (level == Level::macroscopic && c.application_period) {
    throw InputError(fmt::format(
      "criterion '{}': application periods need a single trace", c.criterion_id));
  }
}

}  // namespace

std::size_t EvaluationReport::verdict_count() const
{
  std::size_t n = 0;
  for (const auto & [key, cell] : matrix_cells) {
    n += cell.verdicts.size();
  }
  return n;
}

bool EvaluationReport::any_fail() const
{
  for (const auto & [key, cell] : matrix_cells) {
    for (const auto & v : cell.verdicts) {
      if (v.outcome == Outcome::fail) {
        return true;
      }
    }
  }
  return false;
}

void EvaluationReport::merge(EvaluationReport other)
{
  for (auto & [key, cell] : other.matrix_cells) {
    auto & mine = matrix_cells[key];
    std::move(cell.verdicts.begin(), cell.verdicts.end(), std::back_inserter(mine.verdicts));
    finalize(mine);
  }
  std::move(other.scalars.begin(), other.scalars.end(), std::back_inserter(scalars));
  if (!provenance && other.provenance) {
    provenance = std::move(other.provenance);
  }
}

EvaluationReport evaluate_suite(
  std::span<const QualityCriterion> suite, std::span<const Trace> traces,
  Perspective perspective, Level level, unsigned jobs)
{
  EvaluationReport report;
  if (suite.empty()) {
    return report;
  }
  const auto & registry = MetricRegistry::builtin();
  for (const auto & c : suite) {
    check_arity(c, registry.info(c.metric.name), level);
  }
  MatrixCell & cell = report.matrix_cells[{perspective, level}];

  for (const auto & c : suite) {
    if (level == Level::macroscopic) {
      const auto results = registry.set(c.metric, traces);
      for (std::size_t k = 0; k < results.size(); ++k) {
        Verdict v = evaluate_criterion(c, results[k], nullptr);
        v.scenario_index = k;
        cell.verdicts.push_back(std::move(v));
        report.scalars.push_back(results[k]);
      }
      continue;
    }
    std::vector<Verdict> verdicts(traces.size());
    std::vector<std::optional<ScalarResult>> scalars(traces.size());
    detail::parallel_for(traces.size(), jobs, [&](std::size_t k) {
      const Trace & trace = traces[k];
      if (registry.info(c.metric.name).arity == MetricArity::scalar) {
        ScalarResult s = registry.scalar(c.metric, trace);
        s.context["scenario_id"] = trace.scenario_id;
        verdicts[k] = evaluate_criterion(c, s, &trace);
        scalars[k] = std::move(s);
      } else {
        const MetricSeries series = registry.series(c.metric, trace);
        verdicts[k] = evaluate_criterion(c, series, trace);
        if (c.aggregate) {
          ScalarResult s = micro::aggregate(series, *c.aggregate, verdicts[k].evaluated_intervals.empty()
            ? std::optional<std::vector<TimeInterval>>(std::vector<TimeInterval>{})
            : std::optional<std::vector<TimeInterval>>(verdicts[k].evaluated_intervals));
          s.context["scenario_id"] = trace.scenario_id;
          scalars[k] = std::move(s);
        }
      }
      verdicts[k].scenario_index = scenario_index_of(trace, k);
    });
    std::move(verdicts.begin(), verdicts.end(), std::back_inserter(cell.verdicts));
    for (auto & s : scalars) {
      if (s) {
        report.scalars.push_back(std::move(*s));
      }
    }
  }
  finalize(cell);
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace
{

Signal signal_from_string(const std::string & text)
{
  static const std::map<std::string, Signal> table{
    {"speed", Signal::speed},
    {"acceleration", Signal::acceleration},
    {"distance_between", Signal::distance_between},
    {"time", Signal::time},
    {"metric_value", Signal::metric_value}};
  const auto it = table.find(text);
  if (it == table.end()) {
    throw InputError(fmt::format("unknown condition signal '{}'", text));
  }
  return it->second;
}

std::string to_string(Signal signal)
{
  switch (signal) {
    case Signal::speed:
      return "speed";
    case Signal::acceleration:
      return "acceleration";
    case Signal::distance_between:
      return "distance_between";
    case Signal::time:
      return "time";
    case Signal::metric_value:
      return "metric_value";
  }
  return "time";
}

MetricSpec metric_from_json(const nlohmann::json & j, const nlohmann::json & parent)
{
  MetricSpec m;
  if (j.is_string()) {
    m.name = j.get<std::string>();
    m.actors = parent.value("actors", std::vector<std::string>{});
    m.params = parent.value("params", nlohmann::json::object());
  } else {
    m.name = j.at("name").get<std::string>();
    m.actors = j.value("actors", std::vector<std::string>{});
    m.params = j.value("params", nlohmann::json::object());
  }
  if (!MetricRegistry::builtin().contains(m.name)) {
    throw InputError(fmt::format("unknown metric '{}'", m.name));
  }
  return m;
}

nlohmann::json to_json(const MetricSpec & m)
{
  return {{"name", m.name}, {"actors", m.actors}, {"params", m.params}};
}

template <typename Fn>
auto guarded(const char * what, Fn && fn)
{
  try {
    return fn();
  } catch (const nlohmann::json::exception & e) {
    throw InputError(fmt::format("malformed {}: {}", what, e.what()));
  }
}

}  // namespace

ConditionNode condition_from_json(const nlohmann::json & j)
{
  return guarded("condition", [&] {
    if (j.contains("op")) {
      ConditionBranch b;
      const auto op = j.at("op").get<std::string>();
      if (op == "AND" || op == "and" || op == "all_of") {
        b.op = LogicOp::all_of;
      } else if (op == "OR" || op == "or" || op == "any_of") {
        b.op = LogicOp::any_of;
      } else {
        throw InputError(fmt::format("unknown logic op '{}'", op));
      }
      for (const auto & child : j.at("children")) {
        b.children.push_back(condition_from_json(child));
      }
      if (b.children.size() < 2) {
        throw InputError("condition branches need at least two children");
      }
      return ConditionNode{std::move(b)};
    }
    ConditionLeaf l;
    l.signal = signal_from_string(j.at("signal").get<std::string>());
    l.actors = j.value("actors", std::vector<std::string>{});
    if (l.signal == Signal::metric_value) {
      l.metric = metric_from_json(j.at("metric"), j);
    }
    l.comparator = comparator_from_string(j.at("comparator").get<std::string>());
    l.bound = j.at("bound").get<double>();
    l.unit = j.value("unit", "");
    return ConditionNode{std::move(l)};
  });
}

nlohmann::json to_json(const ConditionNode & node)
{
  if (const auto * l = std::get_if<ConditionLeaf>(&node.value)) {
    nlohmann::json j{
      {"signal", to_string(l->signal)},
      {"actors", l->actors},
      {"comparator", to_string(l->comparator)},
      {"bound", l->bound},
      {"unit", l->unit}};
    if (l->metric) {
      j["metric"] = to_json(*l->metric);
    }
    return j;
  }
  const auto & b = std::get<ConditionBranch>(node.value);
  nlohmann::json children = nlohmann::json::array();
  for (const auto & c : b.children) {
    children.push_back(to_json(c));
  }
  return {{"op", b.op == LogicOp::all_of ? "AND" : "OR"}, {"children", children}};
}

ApplicationPeriod period_from_json(const nlohmann::json & j)
{
  return guarded("application period", [&] {
    ApplicationPeriod p;
    p.start_condition = condition_from_json(j.at("start"));
    if (j.contains("stop")) {
      const auto & s = j.at("stop");
      const auto type = s.at("type").get<std::string>();
      if (type == "condition_no_longer_fulfilled") {
        p.stop = StopWhenFalse{};
      } else if (type == "elapsed") {
        const double d = s.at("duration").get<double>();
        if (!(d > 0.0)) {
          throw InputError("elapsed stop rule needs a positive duration");
        }
        p.stop = StopAfterElapsed{d};
      } else if (type == "event") {
        StopOnEvent e{s.at("name").get<std::string>(), s.value("actors", std::vector<std::string>{})};
        if (e.name != "actor_passed_conflict" && e.name != "collision" && e.name != "scenario_end") {
          throw InputError(fmt::format("unknown event '{}'", e.name));
        }
        p.stop = std::move(e);
      } else {
        throw InputError(fmt::format("unknown stop rule '{}'", type));
      }
    }
    return p;
  });
}

nlohmann::json to_json(const ApplicationPeriod & period)
{
  nlohmann::json stop;
  if (std::holds_alternative<StopWhenFalse>(period.stop)) {
    stop = {{"type", "condition_no_longer_fulfilled"}};
  } else if (const auto * e = std::get_if<StopAfterElapsed>(&period.stop)) {
    stop = {{"type", "elapsed"}, {"duration", e->duration}};
  } else {
    const auto & ev = std::get<StopOnEvent>(period.stop);
    stop = {{"type", "event"}, {"name", ev.name}, {"actors", ev.actors}};
  }
  return {{"start", to_json(period.start_condition)}, {"stop", stop}};
}

QualityCriterion criterion_from_json(const nlohmann::json & j)
{
  return guarded("criterion", [&] {
    QualityCriterion c;
    c.criterion_id = j.at("id").get<std::string>();
    c.metric = metric_from_json(j.at("metric"), j);
    const bool has_threshold = j.contains("threshold");
    const bool has_scale = j.contains("scale");
    if (has_threshold == has_scale) {
      throw InputError(fmt::format(
        "criterion '{}' needs exactly one of threshold or scale", c.criterion_id));
    }
    if (has_threshold) {
      const auto & t = j.at("threshold");
      c.evaluation = ThresholdEvaluation{
        comparator_from_string(t.at("comparator").get<std::string>()), t.at("value").get<double>(),
        t.value("unit", "")};
    } else {
      const auto & s = j.at("scale");
      ScaleEvaluation scale;
      scale.unit = s.value("unit", "");
      for (const auto & bp : s.at("breakpoints")) {
        scale.breakpoints.emplace_back(bp.at(0).get<double>(), bp.at(1).get<double>());
      }
      if (scale.breakpoints.empty()) {
        throw InputError(fmt::format("criterion '{}' has an empty scale", c.criterion_id));
      }
      for (std::size_t i = 1; i < scale.breakpoints.size(); ++i) {
        if (!(scale.breakpoints[i].first > scale.breakpoints[i - 1].first)) {
          throw InputError(fmt::format(
            "criterion '{}' scale bounds must be strictly increasing", c.criterion_id));
        }
      }
      c.evaluation = std::move(scale);
    }
    if (j.contains("application_period")) {
      c.application_period = period_from_json(j.at("application_period"));
    }
    if (j.contains("aggregate")) {
      c.aggregate = aggregate_op_from_string(j.at("aggregate").get<std::string>());
    }
    return c;
  });
}

nlohmann::json to_json(const QualityCriterion & criterion)
{
  nlohmann::json j{{"id", criterion.criterion_id}, {"metric", to_json(criterion.metric)}};
  if (const auto * t = std::get_if<ThresholdEvaluation>(&criterion.evaluation)) {
    j["threshold"] = {{"comparator", to_string(t->comparator)}, {"value", t->value}, {"unit", t->unit}};
  } else {
    const auto & s = std::get<ScaleEvaluation>(criterion.evaluation);
    nlohmann::json bps = nlohmann::json::array();
    for (const auto & [b, sc] : s.breakpoints) {
      bps.push_back({b, sc});
    }
    j["scale"] = {{"breakpoints", bps}, {"unit", s.unit}};
  }
  if (criterion.application_period) {
    j["application_period"] = to_json(*criterion.application_period);
  }
  if (criterion.aggregate) {
    j["aggregate"] = to_string(*criterion.aggregate);
  }
  return j;
}

std::vector<SuiteEntry> suite_from_json(const nlohmann::json & j)
{
  const nlohmann::json & list = j.is_object() && j.contains("criteria") ? j.at("criteria") : j;
  if (!list.is_array()) {
    throw InputError("criterion suite must be a JSON list");
  }
  std::vector<SuiteEntry> out;
  std::set<std::string> ids;
  for (const auto & item : list) {
    SuiteEntry e;
    e.criterion = criterion_from_json(item);
    if (!ids.insert(e.criterion.criterion_id).second) {
      throw InputError(fmt::format("duplicate criterion id '{}'", e.criterion.criterion_id));
    }
    const auto arity = MetricRegistry::builtin().info(e.criterion.metric.name).arity;
    e.level = arity == MetricArity::set ? Level::macroscopic
              : arity == MetricArity::scalar || e.criterion.aggregate ? Level::microscopic
                                                                      : Level::nanoscopic;
    guarded("criterion", [&] {
      if (item.contains("perspective")) {
        e.perspective = perspective_from_string(item.at("perspective").get<std::string>());
      }
      if (item.contains("level")) {
        e.level = level_from_string(item.at("level").get<std::string>());
      }
      return 0;
    });
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<SuiteEntry> load_suite(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError(fmt::format("cannot open suite '{}'", path));
  }
  try {
    return suite_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception & e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

nlohmann::json to_json(const Verdict & verdict)
{
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto & iv : verdict.evaluated_intervals) {
    intervals.push_back({iv.begin, iv.end});
  }
  nlohmann::json j{
    {"criterion_id", verdict.criterion_id},
    {"scenario_id", verdict.scenario_id},
    {"scenario_index", verdict.scenario_index},
    {"outcome", to_string(verdict.outcome)},
    {"evaluated_intervals", intervals}};
  if (verdict.outcome == Outcome::score) {
    j["score"] = verdict.score;
  }
  if (verdict.worst_result) {
    const auto & w = *verdict.worst_result;
    nlohmann::json wr{{"value", w.value}, {"unit", w.unit}};
    if (std::isfinite(w.time)) {
      wr["time"] = w.time;
    }
    j["worst_result"] = wr;
  } else {
    j["worst_result"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const EvaluationReport & report)
{
  nlohmann::json cells = nlohmann::json::array();
  for (const auto & [key, cell] : report.matrix_cells) {
    std::map<std::string, std::size_t> counts{
      {"pass", 0}, {"fail", 0}, {"score", 0}, {"not_applicable", 0}};
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto & v : cell.verdicts) {
      ++counts[to_string(v.outcome)];
      verdicts.push_back(to_json(v));
    }
    cells.push_back(
      {{"perspective", to_string(key.first)},
       {"level", to_string(key.second)},
       {"pass_rate", cell.pass_rate ? nlohmann::json(*cell.pass_rate) : nlohmann::json(nullptr)},
       {"counts", counts},
       {"verdicts", verdicts}});
  }
  nlohmann::json scalars = nlohmann::json::array();
  for (const auto & s : report.scalars) {
    scalars.push_back(to_json(s));
  }
  nlohmann::json j{{"matrix_cells", cells}, {"scalars", scalars}};
  if (report.provenance) {
    j["provenance"] = provenance_json(*report.provenance);
  }
  return j;
}

}  // namespace scenq
