#!/usr/bin/env python3
# Copyright 2026 The scenq Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent reference values for the C++ tests.

Everything here is computed from first principles (enumeration, closed
forms, brute force) without touching the C++ code. Run it to regenerate
frozen_oracles.hpp:

    python3 tests/oracles/derive_oracles.py > tests/oracles/frozen_oracles.hpp
"""

import itertools
import json
import math
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]


def grid(lo, hi, step):
    n = round((hi - lo) / step) + 1
    return [lo + i * step for i in range(n)]


def intersection_grid():
    return list(itertools.product(grid(30, 58, 2), grid(5, 9, 1), grid(10, 24, 2)))


def dtw(a, b):
    inf = float("inf")
    n, m = len(a), len(b)
    prev = [inf] * (m + 1)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur = [inf] * (m + 1)
        for j in range(1, m + 1):
            d = math.dist(a[i - 1], b[j - 1])
            cur[j] = d + min(prev[j], cur[j - 1], prev[j - 1])
        prev = cur
    return prev[m]


def segment_intersection(p, p2, q, q2):
    r = (p2[0] - p[0], p2[1] - p[1])
    s = (q2[0] - q[0], q2[1] - q[1])
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-15:
        return None
    w = (q[0] - p[0], q[1] - p[1])
    t = (w[0] * s[1] - w[1] * s[0]) / den
    u = (w[0] * r[1] - w[1] * r[0]) / den
    if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
        return (p[0] + t * r[0], p[1] + t * r[1])
    return None


def main():
    cells = intersection_grid()
    out = {}
    out["kGridSize"] = len(cells)
    out["kReferenceBindingIndex"] = cells.index((32, 5, 16))
    out["kSweepSize"] = len(grid(38, 78, 1))

    # Half of the v_max values (the first 8) with every other combination.
    half_v = grid(30, 58, 2)[:8]
    executed = {c for c in cells if c[0] in half_v}
    out["kHalfCoverageExecuted"] = len(executed)
    out["kHalfCoverageVmaxFraction"] = len(half_v) / 15
    out["kHalfCoverageOverall"] = len(executed) / len(cells)

    # Static actors 10 m apart, radii 1.3, a_max sum 4: 1/2 * 4 t^2 = 8.7.
    out["kWttcStatic"] = math.sqrt(8.7 / 2.0)

    # Converging straight tracks: start 13.6 m apart at 1 m/s, radii 1.3.
    out["kCollisionOnset"] = (13.6 - 1.3) / 1.0

    # Constant 0.005 m offset over 2000 points spaced 0.1 m.
    a = [(0.1 * i, 0.0) for i in range(2000)]
    b = [(0.1 * i, 0.005) for i in range(2000)]
    out["kDtwOffset2000"] = dtw(a, b)

    out["kDensityOneIn50"] = 1.0 / (math.pi * 50.0 ** 2)

    # Halving dt on an 11-sample uniform grid.
    out["kResampledCount"] = 2 * (11 - 1) + 1

    # Default intersection: route polyline vs pedestrian crossing.
    cfg = json.loads((ROOT / "data" / "intersection_config.json").read_text())
    route = cfg["ego_route"]
    cross = cfg["ped_crossing"]
    hit = None
    for i in range(len(route) - 1):
        hit = segment_intersection(route[i], route[i + 1], cross[0], cross[1])
        if hit:
            break
    out["kConflictX"], out["kConflictY"] = hit

    # Pedestrian ET: the zone spans the ego diameter along the crossing,
    # plus the pedestrian diameter for circle contact.
    width = cfg["street_width"]
    span = 2 * 1.0 + 2 * 0.3
    out["kPedEtPerTcross"] = span / width
    out["kPedSpeedReference"] = width / 5.0

    print("// Generated by tests/oracles/derive_oracles.py. Do not edit.")
    print("#ifndef SCENQ__TESTS__FROZEN_ORACLES_HPP_")
    print("#define SCENQ__TESTS__FROZEN_ORACLES_HPP_")
    print()
    print("#include <cstddef>")
    print()
    print("namespace scenq::oracle")
    print("{")
    print()
    for key, value in out.items():
        if isinstance(value, int):
            print(f"inline constexpr std::size_t {key} = {value};")
        else:
            print(f"inline constexpr double {key} = {value!r};")
    print()
    print("}  // namespace scenq::oracle")
    print()
    print("#endif  // SCENQ__TESTS__FROZEN_ORACLES_HPP_")


if __name__ == "__main__":
    main()
