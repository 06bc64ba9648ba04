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

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace sofic {

/// One recorded inequality lhs <= rhs. Informational checks (asserted ==
/// false) are reported but never affect a run's verdict. A skipped check
/// carries the reason and counts as neither pass nor fail.
struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  bool asserted = true;
  bool skipped = false;
  std::string note;
};

class CheckList {
 public:
  /// lhs <= rhs + slack. NaN on either side fails; rhs = +inf passes any
  /// finite lhs.
  const Check& le(std::string name, double lhs, double rhs, bool asserted = true,
                  double slack = 0.0, std::string note = {}) {
    const bool pass = !std::isnan(lhs) && !std::isnan(rhs) && lhs <= rhs + slack;
    items_.push_back({std::move(name), lhs, rhs, pass, asserted, false, std::move(note)});
    return items_.back();
  }
  /// lhs >= rhs - slack.
  const Check& ge(std::string name, double lhs, double rhs, bool asserted = true,
                  double slack = 0.0, std::string note = {}) {
    const bool pass = !std::isnan(lhs) && !std::isnan(rhs) && lhs >= rhs - slack;
    items_.push_back({std::move(name), lhs, rhs, pass, asserted, false, std::move(note)});
    return items_.back();
  }
  const Check& skip(std::string name, std::string reason) {
    items_.push_back({std::move(name), 0.0, 0.0, false, false, true, std::move(reason)});
    return items_.back();
  }
  void append(const CheckList& other, const std::string& prefix = {}) {
    for (Check c : other.items_) {
      c.name = prefix + c.name;
      items_.push_back(std::move(c));
    }
  }

  const std::vector<Check>& items() const { return items_; }
  bool all_asserted_pass() const {
    for (const auto& c : items_) {
      if (c.asserted && !c.skipped && !c.pass) return false;
    }
    return true;
  }
  /// Asserted checks that failed.
  std::vector<const Check*> failures() const {
    std::vector<const Check*> out;
    for (const auto& c : items_) {
      if (c.asserted && !c.skipped && !c.pass) out.push_back(&c);
    }
    return out;
  }

 private:
  std::vector<Check> items_;
};

}  // namespace sofic
