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

#ifndef SCENQ__SCENARIO_HPP_
#define SCENQ__SCENARIO_HPP_

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace scenq
{

struct ParameterRange
{
  std::string name;
  double min{0.0};
  double max{0.0};
  double step{1.0};
  std::string unit;

  /// Number of grid points, endpoints inclusive.
  std::size_t count() const;
  /// min + index * step, never accumulated.
  double value(std::size_t index) const;
  /// Grid index of `value`, or -1 when it is off-grid.
  std::int64_t index_of(double value) const;
};

/// Throws InputError when the range violates its invariants.
void check_range(const ParameterRange & range);

struct LogicalScenario
{
  std::string scenario_id;
  std::string description;
  std::vector<ParameterRange> parameters;
  std::map<std::string, double> fixed;
};

void check_logical(const LogicalScenario & logical);

struct ConcreteScenario
{
  std::string scenario_id;  // "<logical_id>#<index>"
  std::string logical_id;
  std::map<std::string, double> bindings;
  std::size_t index{0};

  bool operator==(const ConcreteScenario &) const = default;
};

/// Full Cartesian grid, last-declared parameter varying fastest.
std::vector<ConcreteScenario> concretize(const LogicalScenario & logical);

/// Length of concretize(logical) without materializing it.
std::size_t grid_size(const LogicalScenario & logical);

/// The concrete scenario at one grid position.
ConcreteScenario concrete_at(const LogicalScenario & logical, std::size_t index);

LogicalScenario logical_from_json(const nlohmann::json & j);
nlohmann::json to_json(const LogicalScenario & logical);
LogicalScenario load_logical_scenario(const std::string & path);

nlohmann::json to_json(const ConcreteScenario & concrete);
ConcreteScenario concrete_from_json(const nlohmann::json & j);

}  // namespace scenq

#endif  // SCENQ__SCENARIO_HPP_
