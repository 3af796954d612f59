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

#ifndef SCENQ__GEOMETRY_HPP_
#define SCENQ__GEOMETRY_HPP_

#include <cmath>
#include <optional>
#include <vector>

namespace scenq
{

struct Vec2
{
  double x{0.0};
  double y{0.0};

  constexpr Vec2 operator+(const Vec2 & o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2 & o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2 &) const = default;
};

constexpr double dot(const Vec2 & a, const Vec2 & b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2 & a, const Vec2 & b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 & v) { return std::hypot(v.x, v.y); }
inline double distance(const Vec2 & a, const Vec2 & b) { return norm(a - b); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Signed smallest rotation taking `from` onto `to`, in (-pi, pi].
double shortest_arc(double from, double to);

/// Piecewise-linear path parameterized by arc length.
class Polyline
{
public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2> & points() const { return points_; }
  /// Cumulative arc length at each vertex; front() == 0.
  const std::vector<double> & arc_lengths() const { return arc_; }
  double length() const { return arc_.empty() ? 0.0 : arc_.back(); }
  bool empty() const { return points_.size() < 2; }

  /// Point at arc length s, clamped to [0, length()].
  Vec2 point_at(double s) const;
  /// Direction of the segment containing s (the later segment at vertices).
  double heading_at(double s) const;

private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> arc_;
};

struct PathCrossing
{
  Vec2 point;
  double arc_a{0.0};
  double arc_b{0.0};
  /// Unit directions of both paths at the crossing.
  Vec2 dir_a;
  Vec2 dir_b;
};

/// First proper crossing of two polylines, ordered by arc length along `a`.
/// Collinear overlaps are not reported as crossings.
std::optional<PathCrossing> first_crossing(const Polyline & a, const Polyline & b);

/// Signed distance from p to a convex counter-clockwise polygon
/// (negative inside).
double signed_distance_to_convex(const std::vector<Vec2> & polygon, const Vec2 & p);

/// Polygon area, positive for counter-clockwise vertex order.
double signed_area(const std::vector<Vec2> & polygon);

}  // namespace scenq

#endif  // SCENQ__GEOMETRY_HPP_
