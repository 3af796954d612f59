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

#ifndef SCENQ__TRACE_HPP_
#define SCENQ__TRACE_HPP_

#include "scenq/geometry.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scenq
{

enum class ActorClass { vehicle, pedestrian, other };

std::string_view to_string(ActorClass actor_class);
ActorClass actor_class_from_string(std::string_view text);

/// Bounding-circle radius used when a trace does not carry one.
double default_radius(ActorClass actor_class);

/// Kinematic state of one actor at one instant. SI units, map frame.
struct ActorState
{
  double time{0.0};
  double x{0.0};
  double y{0.0};
  double heading{0.0};       // rad, CCW from +x, in (-pi, pi]
  double speed{0.0};         // m/s along heading, >= 0
  double acceleration{0.0};  // m/s^2, signed longitudinal

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const;

  bool operator==(const ActorState &) const = default;
};

struct ActorTrack
{
  std::string actor_id;
  ActorClass actor_class{ActorClass::other};
  double radius{1.0};
  std::vector<ActorState> states;

  double first_time() const { return states.front().time; }
  double last_time() const { return states.back().time; }

  bool operator==(const ActorTrack &) const = default;
};

struct Trace
{
  std::string scenario_id;
  double time_step{0.0};
  std::map<std::string, ActorTrack> tracks;
  std::map<std::string, std::string> metadata;

  /// Throws InputError for an unknown actor.
  const ActorTrack & track(const std::string & actor_id) const;
  /// Common time interval of all tracks.
  std::pair<double, double> overlap() const;

  bool operator==(const Trace &) const = default;
};

/// Throws InputError when a track violates its invariants.
void check_track(const ActorTrack & track);
/// Throws InputError when the trace or any of its tracks is invalid.
void check_trace(const Trace & trace);

enum class TraceFormat { csv, jsonl };

TraceFormat trace_format_from_string(std::string_view text);

/// Parses a long-format trace (one row per actor and time).
///
/// Rows of one actor must appear with strictly increasing time. Errors carry
/// the 1-based line number. When the acceleration column is absent it is
/// derived from speed by central differences and
/// metadata["acceleration_source"] is set to "central_difference".
Trace load_trace(
  std::istream & source, TraceFormat format, const std::string & scenario_id = "trace");

void write_trace(std::ostream & sink, const Trace & trace, TraceFormat format);

/// Sidecar `<trace>.meta.json` content: scenario_id, time_step, run_index,
/// parameters, radii and remaining metadata.
nlohmann::json trace_meta_json(const Trace & trace);
void apply_trace_meta(Trace & trace, const nlohmann::json & meta);

std::filesystem::path meta_path_for(const std::filesystem::path & trace_path);

/// Loads a trace file, picking the format from the extension and applying the
/// sidecar when present.
Trace load_trace_file(const std::filesystem::path & path);
void save_trace_file(
  const std::filesystem::path & path, const Trace & trace, TraceFormat format);

enum class Severity { error, warning };

struct ValidationIssue
{
  Severity severity{Severity::warning};
  std::string code;
  std::string message;
  std::optional<double> time;
  std::optional<std::string> actor_id;
};

struct ValidationReport
{
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  std::size_t count(const std::string & code) const;
};

/// Coupling-quality checks on a loaded trace. Never throws on findings.
ValidationReport validate_trace(const Trace & trace);

/// Linear interpolation on the track; heading takes the shortest arc.
ActorState state_at(const ActorTrack & track, double t);

/// Resamples every track onto the shared overlap at step dt.
Trace resample(const Trace & trace, double dt);

/// Sample times of `a` inside the overlap of `a` and `b`. Throws InputError on
/// an empty overlap.
std::vector<double> shared_times(const ActorTrack & a, const ActorTrack & b);

/// Positions visited by the track, consecutive duplicates removed.
Polyline traveled_path(const ActorTrack & track);

/// Arc length traveled along traveled_path() up to time t.
double traveled_arc_at(const ActorTrack & track, double t);

/// Shortest representation that parses back to the same double.
std::string format_number(double value);

}  // namespace scenq

#endif  // SCENQ__TRACE_HPP_
