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

#include "scenq/trace.hpp"

#include "scenq/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace scenq
{

namespace
{

constexpr const char * kColumns[] = {
  "time_s", "actor_id", "actor_class", "x_m", "y_m", "heading_rad", "speed_mps", "accel_mps2"};

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(',', pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) {
      break;
    }
    pos = next + 1;
  }
  return out;
}

double parse_number(std::string_view text, std::size_t line, std::string_view column)
{
  double value = 0.0;
  const auto * first = text.data();
  const auto * last = text.data() + text.size();
  if (!text.empty() && *first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw InputError(
      fmt::format("line {}: column '{}' is not a number: '{}'", line, column, text));
  }
  if (!std::isfinite(value)) {
    throw InputError(fmt::format("line {}: column '{}' is not finite", line, column));
  }
  return value;
}

struct Row
{
  std::size_t line{0};
  std::string actor_id;
  ActorClass actor_class{ActorClass::other};
  ActorState state;
  bool has_accel{false};
};

// Collects rows into tracks, enforcing per-actor time order.
class TrackBuilder
{
public:
  void add(Row row)
  {
    if (row.state.speed < 0.0) {
      throw InputError(fmt::format(
        "line {}: negative speed for actor '{}'", row.line, row.actor_id));
    }
    if (!accel_decided_) {
      has_accel_ = row.has_accel;
      accel_decided_ = true;
    }
    if (row.has_accel != has_accel_) {
      throw InputError(fmt::format(
        "line {}: acceleration present on some rows but not others", row.line));
    }
    auto [it, inserted] = tracks_.try_emplace(row.actor_id);
    ActorTrack & track = it->second;
    if (inserted) {
      track.actor_id = row.actor_id;
      track.actor_class = row.actor_class;
      track.radius = default_radius(row.actor_class);
    } else if (track.actor_class != row.actor_class) {
      throw InputError(fmt::format(
        "line {}: actor '{}' changes class", row.line, row.actor_id));
    }
    if (!track.states.empty()) {
      const double prev = track.states.back().time;
      if (row.state.time == prev) {
        throw InputError(fmt::format(
          "line {}: duplicate sample for actor '{}' at time {}", row.line, row.actor_id,
          format_number(row.state.time)));
      }
      if (row.state.time < prev) {
        throw InputError(fmt::format(
          "line {}: non-monotonic time for actor '{}' ({} after {})", row.line, row.actor_id,
          format_number(row.state.time), format_number(prev)));
      }
    }
    row.state.heading = normalize_angle(row.state.heading);
    track.states.push_back(row.state);
  }

  Trace finish(const std::string & scenario_id)
  {
    Trace trace;
    trace.scenario_id = scenario_id;
    if (tracks_.empty()) {
      throw InputError("trace has no rows");
    }
    for (auto & [id, track] : tracks_) {
      if (track.states.size() < 2) {
        throw InputError(fmt::format("actor '{}' has fewer than 2 states", id));
      }
      if (!has_accel_) {
        derive_acceleration(track);
      }
      trace.tracks.emplace(id, std::move(track));
    }
    if (!has_accel_) {
      trace.metadata["acceleration_source"] = "central_difference";
    }
    trace.time_step = estimate_time_step(trace);
    check_trace(trace);
    return trace;
  }

private:
  static void derive_acceleration(ActorTrack & track)
  {
    auto & s = track.states;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
      s[i].acceleration = (s[hi].speed - s[lo].speed) / (s[hi].time - s[lo].time);
    }
  }

  // Median sample spacing of the first track, rounded to nanoseconds.
  static double estimate_time_step(const Trace & trace)
  {
    const auto & states = trace.tracks.begin()->second.states;
    std::vector<double> diffs;
    diffs.reserve(states.size() - 1);
    for (std::size_t i = 1; i < states.size(); ++i) {
      diffs.push_back(states[i].time - states[i - 1].time);
    }
    std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
    const double median = diffs[diffs.size() / 2];
    return std::round(median * 1e9) / 1e9;
  }

  std::map<std::string, ActorTrack> tracks_;
  bool has_accel_{false};
  bool accel_decided_{false};
};

Trace load_csv(std::istream & source, const std::string & scenario_id)
{
  std::string line;
  std::size_t line_no = 0;
  std::unordered_map<std::string, std::size_t> column_index;
  while (std::getline(source, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      break;
    }
  }
  if (trim(line).empty()) {
    throw InputError("CSV trace is empty (header required)");
  }
  {
    const auto header = split_commas(line);
    for (std::size_t i = 0; i < header.size(); ++i) {
      column_index[std::string(header[i])] = i;
    }
    for (std::size_t c = 0; c < 7; ++c) {
      if (!column_index.contains(kColumns[c])) {
        throw InputError(
          fmt::format("line {}: header is missing column '{}'", line_no, kColumns[c]));
      }
    }
  }
  const bool has_accel = column_index.contains("accel_mps2");
  const std::size_t width = column_index.size();

  TrackBuilder builder;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() != width) {
      throw InputError(fmt::format(
        "line {}: expected {} fields, found {}", line_no, width, cells.size()));
    }
    auto cell = [&](const char * name) { return cells[column_index.at(name)]; };
    Row row;
    row.line = line_no;
    row.actor_id = std::string(cell("actor_id"));
    if (row.actor_id.empty()) {
      throw InputError(fmt::format("line {}: empty actor_id", line_no));
    }
    try {
      row.actor_class = actor_class_from_string(cell("actor_class"));
    } catch (const InputError & e) {
      throw InputError(fmt::format("line {}: {}", line_no, e.what()));
    }
    row.state.time = parse_number(cell("time_s"), line_no, "time_s");
    row.state.x = parse_number(cell("x_m"), line_no, "x_m");
    row.state.y = parse_number(cell("y_m"), line_no, "y_m");
    row.state.heading = parse_number(cell("heading_rad"), line_no, "heading_rad");
    row.state.speed = parse_number(cell("speed_mps"), line_no, "speed_mps");
    if (has_accel) {
      row.state.acceleration = parse_number(cell("accel_mps2"), line_no, "accel_mps2");
      row.has_accel = true;
    }
    builder.add(std::move(row));
  }
  return builder.finish(scenario_id);
}

double json_number(const nlohmann::json & obj, const char * key, std::size_t line)
{
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw InputError(fmt::format("line {}: missing key '{}'", line, key));
  }
  if (!it->is_number()) {
    throw InputError(fmt::format("line {}: key '{}' is not a number", line, key));
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw InputError(fmt::format("line {}: key '{}' is not finite", line, key));
  }
  return v;
}

Trace load_jsonl(std::istream & source, const std::string & scenario_id)
{
  TrackBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error & e) {
      throw InputError(fmt::format("line {}: invalid JSON: {}", line_no, e.what()));
    }
    if (!obj.is_object()) {
      throw InputError(fmt::format("line {}: expected a JSON object", line_no));
    }
    Row row;
    row.line = line_no;
    if (!obj.contains("actor_id") || !obj["actor_id"].is_string()) {
      throw InputError(fmt::format("line {}: missing string key 'actor_id'", line_no));
    }
    row.actor_id = obj["actor_id"].get<std::string>();
    if (!obj.contains("actor_class") || !obj["actor_class"].is_string()) {
      throw InputError(fmt::format("line {}: missing string key 'actor_class'", line_no));
    }
    try {
      row.actor_class = actor_class_from_string(obj["actor_class"].get<std::string>());
    } catch (const InputError & e) {
      throw InputError(fmt::format("line {}: {}", line_no, e.what()));
    }
    row.state.time = json_number(obj, "time_s", line_no);
    row.state.x = json_number(obj, "x_m", line_no);
    row.state.y = json_number(obj, "y_m", line_no);
    row.state.heading = json_number(obj, "heading_rad", line_no);
    row.state.speed = json_number(obj, "speed_mps", line_no);
    if (obj.contains("accel_mps2")) {
      row.state.acceleration = json_number(obj, "accel_mps2", line_no);
      row.has_accel = true;
    }
    builder.add(std::move(row));
  }
  return builder.finish(scenario_id);
}

// Rows of all tracks ordered by (time, actor_id).
std::vector<std::pair<const ActorTrack *, const ActorState *>> ordered_rows(const Trace & trace)
{
  std::vector<std::pair<const ActorTrack *, const ActorState *>> rows;
  for (const auto & [id, track] : trace.tracks) {
    for (const auto & s : track.states) {
      rows.emplace_back(&track, &s);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto & a, const auto & b) {
    return a.second->time < b.second->time;
  });
  return rows;
}

}  // namespace

std::string format_number(double value)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Vec2 ActorState::velocity() const
{
  return {speed * std::cos(heading), speed * std::sin(heading)};
}

std::string_view to_string(ActorClass actor_class)
{
  switch (actor_class) {
    case ActorClass::vehicle:
      return "vehicle";
    case ActorClass::pedestrian:
      return "pedestrian";
    case ActorClass::other:
      return "other";
  }
  return "other";
}

ActorClass actor_class_from_string(std::string_view text)
{
  if (text == "vehicle") {
    return ActorClass::vehicle;
  }
  if (text == "pedestrian") {
    return ActorClass::pedestrian;
  }
  if (text == "other") {
    return ActorClass::other;
  }
  throw InputError(fmt::format("unknown actor class '{}'", text));
}

double default_radius(ActorClass actor_class)
{
  switch (actor_class) {
    case ActorClass::vehicle:
      return 1.0;
    case ActorClass::pedestrian:
      return 0.3;
    case ActorClass::other:
      return 0.5;
  }
  return 0.5;
}

const ActorTrack & Trace::track(const std::string & actor_id) const
{
  const auto it = tracks.find(actor_id);
  if (it == tracks.end()) {
    throw InputError(fmt::format("unknown actor '{}' in trace '{}'", actor_id, scenario_id));
  }
  return it->second;
}

std::pair<double, double> Trace::overlap() const
{
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto & [id, track] : tracks) {
    lo = std::max(lo, track.first_time());
    hi = std::min(hi, track.last_time());
  }
  return {lo, hi};
}

void check_track(const ActorTrack & track)
{
  if (track.actor_id.empty()) {
    throw InputError("track with empty actor_id");
  }
  if (!(track.radius > 0.0)) {
    throw InputError(fmt::format("actor '{}' has non-positive radius", track.actor_id));
  }
  if (track.states.size() < 2) {
    throw InputError(fmt::format("actor '{}' has fewer than 2 states", track.actor_id));
  }
  for (std::size_t i = 0; i < track.states.size(); ++i) {
    const auto & s = track.states[i];
    if (!std::isfinite(s.time) || !std::isfinite(s.x) || !std::isfinite(s.y) ||
        !std::isfinite(s.heading) || !std::isfinite(s.speed) || !std::isfinite(s.acceleration)) {
      throw InputError(fmt::format("actor '{}' has a non-finite state", track.actor_id));
    }
    if (s.speed < 0.0) {
      throw InputError(fmt::format("actor '{}' has negative speed", track.actor_id));
    }
    if (i > 0 && !(s.time > track.states[i - 1].time)) {
      throw InputError(
        fmt::format("actor '{}' state times are not strictly increasing", track.actor_id));
    }
  }
}

void check_trace(const Trace & trace)
{
  if (trace.scenario_id.empty()) {
    throw InputError("trace has an empty scenario_id");
  }
  if (trace.tracks.empty()) {
    throw InputError(fmt::format("trace '{}' has no tracks", trace.scenario_id));
  }
  for (const auto & [id, track] : trace.tracks) {
    if (id != track.actor_id) {
      throw InputError(fmt::format("track key '{}' does not match actor_id", id));
    }
    check_track(track);
  }
  const auto [lo, hi] = trace.overlap();
  if (!(hi > lo)) {
    throw InputError(
      fmt::format("trace '{}': tracks share no time interval", trace.scenario_id));
  }
}

TraceFormat trace_format_from_string(std::string_view text)
{
  if (text == "csv") {
    return TraceFormat::csv;
  }
  if (text == "jsonl") {
    return TraceFormat::jsonl;
  }
  throw InputError(fmt::format("unknown trace format '{}'", text));
}

Trace load_trace(std::istream & source, TraceFormat format, const std::string & scenario_id)
{
  return format == TraceFormat::csv ? load_csv(source, scenario_id)
                                    : load_jsonl(source, scenario_id);
}

void write_trace(std::ostream & sink, const Trace & trace, TraceFormat format)
{
  const auto rows = ordered_rows(trace);
  if (format == TraceFormat::csv) {
    sink << "time_s,actor_id,actor_class,x_m,y_m,heading_rad,speed_mps,accel_mps2\n";
    for (const auto & [track, s] : rows) {
      sink << format_number(s->time) << ',' << track->actor_id << ','
           << to_string(track->actor_class) << ',' << format_number(s->x) << ','
           << format_number(s->y) << ',' << format_number(s->heading) << ','
           << format_number(s->speed) << ',' << format_number(s->acceleration) << '\n';
    }
    return;
  }
  // Hand-assembled so numbers keep their shortest round-trip form.
  for (const auto & [track, s] : rows) {
    sink << "{\"time_s\":" << format_number(s->time)
         << ",\"actor_id\":" << nlohmann::json(track->actor_id).dump()
         << ",\"actor_class\":\"" << to_string(track->actor_class)
         << "\",\"x_m\":" << format_number(s->x) << ",\"y_m\":" << format_number(s->y)
         << ",\"heading_rad\":" << format_number(s->heading)
         << ",\"speed_mps\":" << format_number(s->speed)
         << ",\"accel_mps2\":" << format_number(s->acceleration) << "}\n";
  }
}

nlohmann::json trace_meta_json(const Trace & trace)
{
  nlohmann::json meta;
  meta["scenario_id"] = trace.scenario_id;
  meta["time_step"] = trace.time_step;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json other = nlohmann::json::object();
  for (const auto & [key, value] : trace.metadata) {
    if (key.rfind("param.", 0) == 0) {
      parameters[key.substr(6)] = value;
    } else if (key == "run_index") {
      meta["run_index"] = value;
    } else {
      other[key] = value;
    }
  }
  meta["parameters"] = parameters;
  meta["metadata"] = other;
  nlohmann::json radii = nlohmann::json::object();
  for (const auto & [id, track] : trace.tracks) {
    radii[id] = track.radius;
  }
  meta["radii"] = radii;
  return meta;
}

namespace
{

std::string meta_value_string(const nlohmann::json & v)
{
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_number_float()) {
    return format_number(v.get<double>());
  }
  return v.dump();
}

}  // namespace

void apply_trace_meta(Trace & trace, const nlohmann::json & meta)
{
  if (!meta.is_object()) {
    throw InputError("trace metadata sidecar is not a JSON object");
  }
  if (meta.contains("scenario_id")) {
    trace.scenario_id = meta.at("scenario_id").get<std::string>();
  }
  if (meta.contains("time_step")) {
    trace.time_step = meta.at("time_step").get<double>();
  }
  if (meta.contains("run_index")) {
    trace.metadata["run_index"] = meta_value_string(meta.at("run_index"));
  }
  if (meta.contains("parameters")) {
    for (const auto & [key, value] : meta.at("parameters").items()) {
      trace.metadata["param." + key] = meta_value_string(value);
    }
  }
  if (meta.contains("metadata")) {
    for (const auto & [key, value] : meta.at("metadata").items()) {
      trace.metadata[key] = meta_value_string(value);
    }
  }
  if (meta.contains("radii")) {
    for (const auto & [id, value] : meta.at("radii").items()) {
      const auto it = trace.tracks.find(id);
      if (it == trace.tracks.end()) {
        throw InputError(fmt::format("sidecar radius for unknown actor '{}'", id));
      }
      it->second.radius = value.get<double>();
    }
  }
  check_trace(trace);
}

std::filesystem::path meta_path_for(const std::filesystem::path & trace_path)
{
  auto p = trace_path;
  p.replace_extension(".meta.json");
  return p;
}

Trace load_trace_file(const std::filesystem::path & path)
{
  const auto ext = path.extension().string();
  TraceFormat format = TraceFormat::csv;
  if (ext == ".jsonl") {
    format = TraceFormat::jsonl;
  } else if (ext != ".csv") {
    throw InputError(fmt::format("{}: unknown trace extension '{}'", path.string(), ext));
  }
  std::ifstream in(path);
  if (!in) {
    throw InputError(fmt::format("cannot open trace '{}'", path.string()));
  }
  Trace trace;
  try {
    trace = load_trace(in, format, path.stem().string());
  } catch (const InputError & e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
  const auto meta_path = meta_path_for(path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream meta_in(meta_path);
    try {
      apply_trace_meta(trace, nlohmann::json::parse(meta_in));
    } catch (const nlohmann::json::exception & e) {
      throw InputError(fmt::format("{}: {}", meta_path.string(), e.what()));
    }
  }
  return trace;
}

void save_trace_file(
  const std::filesystem::path & path, const Trace & trace, TraceFormat format)
{
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw InputError(fmt::format("cannot write '{}'", path.string()));
    }
    write_trace(out, trace, format);
  }
  std::ofstream meta(meta_path_for(path), std::ios::binary);
  meta << trace_meta_json(trace).dump(2) << '\n';
}

std::size_t ValidationReport::count(const std::string & code) const
{
  return static_cast<std::size_t>(std::count_if(
    issues.begin(), issues.end(), [&](const auto & i) { return i.code == code; }));
}

ActorState state_at(const ActorTrack & track, double t)
{
  const auto & s = track.states;
  if (s.empty() || t < s.front().time || t > s.back().time) {
    throw InputError(fmt::format(
      "time {} outside the range of actor '{}'", format_number(t), track.actor_id));
  }
  const auto it = std::lower_bound(
    s.begin(), s.end(), t, [](const ActorState & a, double v) { return a.time < v; });
  if (it->time == t) {
    return *it;
  }
  const ActorState & b = *it;
  const ActorState & a = *(it - 1);
  const double w = (t - a.time) / (b.time - a.time);
  ActorState out;
  out.time = t;
  out.x = a.x + w * (b.x - a.x);
  out.y = a.y + w * (b.y - a.y);
  out.heading = normalize_angle(a.heading + w * shortest_arc(a.heading, b.heading));
  out.speed = a.speed + w * (b.speed - a.speed);
  out.acceleration = a.acceleration + w * (b.acceleration - a.acceleration);
  return out;
}

Trace resample(const Trace & trace, double dt)
{
  if (!(dt > 0.0)) {
    throw InputError("resample step must be positive");
  }
  const auto [lo, hi] = trace.overlap();
  const double span = hi - lo;
  if (dt > span) {
    throw InputError(fmt::format(
      "resample step {} exceeds the overlap length {}", format_number(dt), format_number(span)));
  }
  const auto count = static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;
  Trace out;
  out.scenario_id = trace.scenario_id;
  out.time_step = dt;
  out.metadata = trace.metadata;
  for (const auto & [id, track] : trace.tracks) {
    ActorTrack resampled;
    resampled.actor_id = track.actor_id;
    resampled.actor_class = track.actor_class;
    resampled.radius = track.radius;
    resampled.states.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = std::min(lo + static_cast<double>(i) * dt, hi);
      resampled.states.push_back(state_at(track, t));
    }
    out.tracks.emplace(id, std::move(resampled));
  }
  return out;
}

std::vector<double> shared_times(const ActorTrack & a, const ActorTrack & b)
{
  const double lo = std::max(a.first_time(), b.first_time());
  const double hi = std::min(a.last_time(), b.last_time());
  if (!(hi >= lo)) {
    throw InputError(
      fmt::format("actors '{}' and '{}' do not overlap in time", a.actor_id, b.actor_id));
  }
  std::vector<double> times;
  for (const auto & s : a.states) {
    if (s.time >= lo && s.time <= hi) {
      times.push_back(s.time);
    }
  }
  if (times.empty()) {
    throw InputError(
      fmt::format("actors '{}' and '{}' share no sample time", a.actor_id, b.actor_id));
  }
  return times;
}

Polyline traveled_path(const ActorTrack & track)
{
  std::vector<Vec2> pts;
  pts.reserve(track.states.size());
  for (const auto & s : track.states) {
    pts.push_back(s.position());
  }
  return Polyline(std::move(pts));
}

double traveled_arc_at(const ActorTrack & track, double t)
{
  const auto & s = track.states;
  double arc = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double seg = distance(s[i - 1].position(), s[i].position());
    if (s[i].time >= t) {
      const double w = (t - s[i - 1].time) / (s[i].time - s[i - 1].time);
      return arc + std::clamp(w, 0.0, 1.0) * seg;
    }
    arc += seg;
  }
  return arc;
}

namespace
{

void check_sampling(const Trace & trace, const ActorTrack & track, ValidationReport & report)
{
  const double nominal = trace.time_step;
  if (!(nominal > 0.0)) {
    return;
  }
  std::size_t irregular = 0;
  std::optional<double> first_irregular;
  const auto & s = track.states;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double dt = s[i].time - s[i - 1].time;
    if (dt > 1.5 * nominal) {
      report.issues.push_back(
        {Severity::error, "actor_availability",
         fmt::format(
           "actor availability: '{}' has no samples between {} s and {} s", track.actor_id,
           format_number(s[i - 1].time), format_number(s[i].time)),
         s[i - 1].time, track.actor_id});
    } else if (std::abs(dt - nominal) > 0.1 * nominal) {
      ++irregular;
      if (!first_irregular) {
        first_irregular = s[i - 1].time;
      }
    }
  }
  if (irregular > 0) {
    report.issues.push_back(
      {Severity::warning, "non_uniform_sampling",
       fmt::format(
         "'{}' has {} sample spacings deviating more than 10% from the nominal {} s",
         track.actor_id, irregular, format_number(nominal)),
       first_irregular, track.actor_id});
  }
}

void check_contacts(
  const ActorTrack & a, const ActorTrack & b, ValidationReport & report)
{
  const double lo = std::max(a.first_time(), b.first_time());
  const double hi = std::min(a.last_time(), b.last_time());
  if (!(hi >= lo)) {
    return;
  }
  const double contact = a.radius + b.radius;
  bool in_contact = false;
  double prev_t = 0.0;
  double prev_gap = 0.0;
  bool have_prev = false;
  for (const auto & sa : a.states) {
    if (sa.time < lo || sa.time > hi) {
      continue;
    }
    const ActorState sb = state_at(b, sa.time);
    const double gap = distance(sa.position(), sb.position()) - contact;
    const bool touching = gap <= 0.0;
    if (touching && !in_contact) {
      double onset = sa.time;
      if (have_prev && prev_gap > 0.0) {
        onset = prev_t + (sa.time - prev_t) * prev_gap / (prev_gap - gap);
      }
      report.issues.push_back(
        {Severity::warning, "collision",
         fmt::format(
           "collision: '{}' and '{}' overlap from {} s", a.actor_id, b.actor_id,
           format_number(onset)),
         onset, a.actor_id});
    }
    in_contact = touching;
    prev_t = sa.time;
    prev_gap = gap;
    have_prev = true;
  }
}

}  // namespace

ValidationReport validate_trace(const Trace & trace)
{
  ValidationReport report;
  for (const auto & [id, track] : trace.tracks) {
    check_sampling(trace, track, report);
  }
  for (auto it = trace.tracks.begin(); it != trace.tracks.end(); ++it) {
    for (auto jt = std::next(it); jt != trace.tracks.end(); ++jt) {
      check_contacts(it->second, jt->second, report);
    }
  }
  return report;
}

}  // namespace scenq
