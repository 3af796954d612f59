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

#ifndef SCENQ__TOOLS__CLI_HPP_
#define SCENQ__TOOLS__CLI_HPP_

#include <string>
#include <vector>

namespace scenq::cli
{

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInput = 2;

/// Runs `scenq <command> ...`; args excludes the program name.
int run(const std::vector<std::string> & args);

}  // namespace scenq::cli

#endif  // SCENQ__TOOLS__CLI_HPP_
