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

#include "scenq/scenario.hpp"

#include "scenq/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>

namespace scenq
{

std::size_t ParameterRange::count() const
{
  return static_cast<std::size_t>(std::llround((max - min) / step)) + 1;
}

double ParameterRange::value(std::size_t index) const
{
  return min + static_cast<double>(index) * step;
}

std::int64_t ParameterRange::index_of(double v) const
{
  if (!std::isfinite(v)) {
    return -1;
  }
  const double snap = 1e-9 * std::max(1.0, std::abs(max));
  const auto i = std::llround((v - min) / step);
  if (i < 0 || static_cast<std::size_t>(i) >= count()) {
    return -1;
  }
  if (std::abs(value(static_cast<std::size_t>(i)) - v) > snap) {
    return -1;
  }
  return i;
}

void check_range(const ParameterRange & range)
{
  if (range.name.empty()) {
    throw InputError("parameter range with empty name");
  }
  if (!std::isfinite(range.min) || !std::isfinite(range.max) || !std::isfinite(range.step)) {
    throw InputError(fmt::format("parameter '{}': non-finite bounds or step", range.name));
  }
  if (!(range.step > 0.0)) {
    throw InputError(fmt::format("parameter '{}': step must be positive", range.name));
  }
  if (range.min > range.max) {
    throw InputError(fmt::format("parameter '{}': min exceeds max", range.name));
  }
  const double k = (range.max - range.min) / range.step;
  if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, std::abs(k))) {
    throw InputError(fmt::format(
      "parameter '{}': range {}..{} is not a multiple of step {}", range.name, range.min,
      range.max, range.step));
  }
}

void check_logical(const LogicalScenario & logical)
{
  if (logical.scenario_id.empty()) {
    throw InputError("logical scenario with empty scenario_id");
  }
  std::set<std::string> names;
  for (const auto & p : logical.parameters) {
    check_range(p);
    if (!names.insert(p.name).second) {
      throw InputError(fmt::format("duplicate parameter '{}'", p.name));
    }
    if (logical.fixed.contains(p.name)) {
      throw InputError(fmt::format("parameter '{}' is also fixed", p.name));
    }
  }
}

std::size_t grid_size(const LogicalScenario & logical)
{
  check_logical(logical);
  std::size_t n = 1;
  for (const auto & p : logical.parameters) {
    n *= p.count();
  }
  return n;
}

ConcreteScenario concrete_at(const LogicalScenario & logical, std::size_t index)
{
  if (const std::size_t n = grid_size(logical); index >= n) {
    throw InputError(fmt::format(
      "scenario index {} out of range for '{}' ({} points)", index, logical.scenario_id, n));
  }
  ConcreteScenario c;
  c.logical_id = logical.scenario_id;
  c.index = index;
  c.scenario_id = fmt::format("{}#{}", logical.scenario_id, index);
  c.bindings = logical.fixed;
  // Mixed-radix decode, last parameter fastest.
  std::size_t rest = index;
  for (auto it = logical.parameters.rbegin(); it != logical.parameters.rend(); ++it) {
    const std::size_t n = it->count();
    c.bindings[it->name] = it->value(rest % n);
    rest /= n;
  }
  return c;
}

std::vector<ConcreteScenario> concretize(const LogicalScenario & logical)
{
  const std::size_t n = grid_size(logical);
  std::vector<ConcreteScenario> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(concrete_at(logical, i));
  }
  return out;
}

LogicalScenario logical_from_json(const nlohmann::json & j)
{
  LogicalScenario logical;
  try {
    logical.scenario_id = j.at("scenario_id").get<std::string>();
    logical.description = j.value("description", "");
    if (j.contains("parameters")) {
      for (const auto & p : j.at("parameters")) {
        ParameterRange r;
        r.name = p.at("name").get<std::string>();
        r.min = p.at("min").get<double>();
        r.max = p.at("max").get<double>();
        r.step = p.at("step").get<double>();
        r.unit = p.value("unit", "");
        logical.parameters.push_back(std::move(r));
      }
    }
    if (j.contains("fixed")) {
      for (const auto & [key, value] : j.at("fixed").items()) {
        logical.fixed[key] = value.get<double>();
      }
    }
  } catch (const nlohmann::json::exception & e) {
    throw InputError(fmt::format("logical scenario: {}", e.what()));
  }
  check_logical(logical);
  return logical;
}

nlohmann::json to_json(const LogicalScenario & logical)
{
  nlohmann::json j;
  j["scenario_id"] = logical.scenario_id;
  j["description"] = logical.description;
  j["parameters"] = nlohmann::json::array();
  for (const auto & p : logical.parameters) {
    j["parameters"].push_back(
      {{"name", p.name}, {"min", p.min}, {"max", p.max}, {"step", p.step}, {"unit", p.unit}});
  }
  j["fixed"] = nlohmann::json::object();
  for (const auto & [k, v] : logical.fixed) {
    j["fixed"][k] = v;
  }
  return j;
}

LogicalScenario load_logical_scenario(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw InputError(fmt::format("cannot open logical scenario '{}'", path));
  }
  try {
    return logical_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error & e) {
    throw InputError(fmt::format("{}: {}", path, e.what()));
  }
}

nlohmann::json to_json(const ConcreteScenario & concrete)
{
  nlohmann::json j;
  j["scenario_id"] = concrete.scenario_id;
  j["logical_id"] = concrete.logical_id;
  j["index"] = concrete.index;
  j["bindings"] = nlohmann::json::object();
  for (const auto & [k, v] : concrete.bindings) {
    j["bindings"][k] = v;
  }
  return j;
}

ConcreteScenario concrete_from_json(const nlohmann::json & j)
{
  ConcreteScenario c;
  try {
    c.scenario_id = j.at("scenario_id").get<std::string>();
    c.logical_id = j.value("logical_id", "");
    c.index = j.value("index", std::size_t{0});
    for (const auto & [k, v] : j.at("bindings").items()) {
      c.bindings[k] = v.get<double>();
    }
  } catch (const nlohmann::json::exception & e) {
    throw InputError(fmt::format("concrete scenario: {}", e.what()));
  }
  return c;
}

}  // namespace scenq
