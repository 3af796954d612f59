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

#include "scenq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace scenq
{

double normalize_angle(double angle)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

double shortest_arc(double from, double to) { return normalize_angle(to - from); }

Polyline::Polyline(std::vector<Vec2> points)
{
  points_.reserve(points.size());
  for (const auto & p : points) {
    if (points_.empty() || !(p == points_.back())) {
      points_.push_back(p);
    }
  }
  arc_.reserve(points_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i > 0) {
      s += distance(points_[i - 1], points_[i]);
    }
    arc_.push_back(s);
  }
}

std::size_t Polyline::segment_index(double s) const
{
  // Last segment whose start arc is <= s.
  const auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  std::size_t idx = it == arc_.begin() ? 0 : static_cast<std::size_t>(it - arc_.begin()) - 1;
  return std::min(idx, points_.size() - 2);
}

Vec2 Polyline::point_at(double s) const
{
  if (points_.empty()) {
    return {};
  }
  if (points_.size() == 1 || s <= 0.0) {
    return points_.front();
  }
  if (s >= length()) {
    return points_.back();
  }
  const std::size_t i = segment_index(s);
  const double seg = arc_[i + 1] - arc_[i];
  const double w = (s - arc_[i]) / seg;
  return points_[i] + (points_[i + 1] - points_[i]) * w;
}

double Polyline::heading_at(double s) const
{
  if (points_.size() < 2) {
    return 0.0;
  }
  const std::size_t i = segment_index(std::clamp(s, 0.0, length()));
  const Vec2 d = points_[i + 1] - points_[i];
  return std::atan2(d.y, d.x);
}

std::optional<PathCrossing> first_crossing(const Polyline & a, const Polyline & b)
{
  const auto & pa = a.points();
  const auto & pb = b.points();
  if (pa.size() < 2 || pb.size() < 2) {
    return std::nullopt;
  }
  constexpr double eps = 1e-12;
  // Bounding box of b, padded, to skip far-away segments of a cheaply.
  Vec2 lo = pb.front();
  Vec2 hi = pb.front();
  for (const auto & p : pb) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double pad = 1e-9 * (1.0 + std::max(hi.x - lo.x, hi.y - lo.y));
  for (std::size_t i = 0; i + 1 < pa.size(); ++i) {
    if (
      std::max(pa[i].x, pa[i + 1].x) < lo.x - pad || std::min(pa[i].x, pa[i + 1].x) > hi.x + pad ||
      std::max(pa[i].y, pa[i + 1].y) < lo.y - pad || std::min(pa[i].y, pa[i + 1].y) > hi.y + pad) {
      continue;
    }
    const Vec2 r = pa[i + 1] - pa[i];
    std::optional<PathCrossing> best;
    double best_t = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < pb.size(); ++j) {
      const Vec2 q = pb[j + 1] - pb[j];
      const double denom = cross(r, q);
      if (std::abs(denom) < eps * norm(r) * norm(q)) {
        continue;  // parallel or collinear
      }
      const Vec2 w = pb[j] - pa[i];
      const double t = cross(w, q) / denom;
      const double u = cross(w, r) / denom;
      if (t < -eps || t > 1.0 + eps || u < -eps || u > 1.0 + eps) {
        continue;
      }
      if (t < best_t) {
        best_t = t;
        const double seg_a = a.arc_lengths()[i + 1] - a.arc_lengths()[i];
        const double seg_b = b.arc_lengths()[j + 1] - b.arc_lengths()[j];
        PathCrossing c;
        c.point = pa[i] + r * t;
        c.arc_a = a.arc_lengths()[i] + t * seg_a;
        c.arc_b = b.arc_lengths()[j] + u * seg_b;
        c.dir_a = r * (1.0 / norm(r));
        c.dir_b = q * (1.0 / norm(q));
        best = c;
      }
    }
    if (best) {
      return best;
    }
  }
  return std::nullopt;
}

double signed_area(const std::vector<Vec2> & polygon)
{
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return 0.5 * twice;
}

double signed_distance_to_convex(const std::vector<Vec2> & polygon, const Vec2 & p)
{
  // Inside: minus the distance to the nearest edge line.
  // Outside: distance to the nearest boundary point.
  const std::size_t n = polygon.size();
  bool inside = true;
  double max_signed = -std::numeric_limits<double>::infinity();
  double min_outside = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[(i + 1) % n];
    const Vec2 e = b - a;
    const double len = norm(e);
    // Outward normal for CCW order.
    const double side = cross(e, p - a) / len;
    if (side < 0.0) {
      inside = false;
    }
    max_signed = std::max(max_signed, -side);
    const double t = std::clamp(dot(p - a, e) / (len * len), 0.0, 1.0);
    min_outside = std::min(min_outside, distance(p, a + e * t));
  }
  return inside ? max_signed : min_outside;
}

}  // namespace scenq
