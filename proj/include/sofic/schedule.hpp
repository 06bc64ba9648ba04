// Copyright 2026 The sofic-extract Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sofic/checks.hpp"
#include "sofic/group.hpp"

namespace sofic {

class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScheduleMode { theoretical, practical };

const char* schedule_mode_name(ScheduleMode mode);
ScheduleMode parse_schedule_mode(const std::string& name);

/// One level L_j with its parameters. Theoretical levels keep natural
/// logarithms only (values routinely leave double range); practical levels
/// also carry the element set.
struct ScheduleLevel {
  std::size_t index = 0;  // 1-based
  double log_eta = 0.0;
  double log_lambda = 0.0;
  double log_size = 0.0;
  double log_radius = 0.0;
  /// log(C(|L|) * lambda), kept separately: both factors can reach 1e21 in
  /// log-space, where their sum has no significant digits left.
  double log_c_lambda = 0.0;
  /// True when a log-magnitude itself overflowed; later levels are not
  /// representable.
  bool overflow = false;

  // Practical mode only.
  std::int64_t radius = 0;
  ElementSet elements;
  double eta = 0.0;
  double lambda = 0.0;
};

struct ParameterSchedule {
  ScheduleMode mode = ScheduleMode::practical;
  std::string group_name;
  ElementSet f;
  double epsilon = 0.0;
  double kappa = 0.0;
  bool kappa_overridden = false;
  bool eta_overridden = false;
  /// Lemma steps n; levels holds L_1 .. L_{n+1}.
  std::size_t stages = 0;
  /// Smallest n with (1 - kappa/2)^n <= epsilon/2.
  std::size_t required_stages = 0;
  std::vector<ScheduleLevel> levels;
  CheckList checks;
  bool runnable = false;
  std::vector<std::string> notes;

  /// Stage l (1-based) applies the lemma with M = L_{n+2-l}, L = L_{n+1-l}.
  const ScheduleLevel& m_level(std::size_t stage) const { return levels.at(stages + 1 - stage); }
  const ScheduleLevel& l_level(std::size_t stage) const { return levels.at(stages - stage); }
};

struct ScheduleOptions {
  /// Practical mode: number of lemma steps.
  std::size_t stage_cap = 3;
  /// Practical mode: lambda_1 (default epsilon / 20) and the geometric ratio.
  std::optional<double> lambda1;
  double lambda_ratio = 0.5;
  /// Default epsilon / (8 |F|^2).
  std::optional<double> kappa;
  /// Target invariance defect for each L_{j+1} over L_j. Default: the
  /// largest value Item B allows at that level.
  std::optional<double> eta_target;
  std::int64_t element_budget = kFolnerElementBudget;
  /// Theoretical mode: levels to materialise in log-space (the stage count
  /// itself is always computed).
  std::size_t theoretical_level_cap = 4096;
};

/// Smallest n >= 1 with (1 - kappa/2)^n <= epsilon/2.
std::size_t required_stage_count(double kappa, double epsilon);

ParameterSchedule parameter_schedule(const Group& group, const ElementSet& f, double epsilon,
                                     ScheduleMode mode, const ScheduleOptions& options = {});

/// Smallest centred box whose invariance defect over `test` is at most eta.
/// Throws ScheduleError naming the required size when it exceeds the budget.
FolnerSet smallest_invariant_box(const Group& group, const ElementSet& test, double eta,
                                 std::int64_t budget = kFolnerElementBudget);

}  // namespace sofic
