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

#include "sofic/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sofic/extraction.hpp"

namespace sofic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Radius of the smallest centred box containing g.
std::int64_t element_radius(const Element& g) {
  std::int64_t r = 0;
  if (g.family == Family::integer_lattice) {
    for (auto c : g.coords) r = std::max<std::int64_t>(r, c < 0 ? -c : c);
  } else if (g.family == Family::heisenberg) {
    r = std::max<std::int64_t>(std::abs(g.coords[0]), std::abs(g.coords[1]));
    const auto z = static_cast<std::int64_t>(std::abs(g.coords[2]));
    while (r * r < z) ++r;
  }
  return r;
}

std::int64_t set_radius(const ElementSet& s) {
  std::int64_t r = 0;
  for (const auto& g : s) r = std::max(r, element_radius(g));
  return r;
}

// Exact invariance defect of the lattice box [-R, R]^d at h.
double lattice_box_defect(std::int64_t radius, std::size_t rank, const Element& h) {
  const long double side = 2.0L * radius + 1.0L;
  long double kept = 1.0L;
  for (std::size_t i = 0; i < rank; ++i) {
    const long double shift = std::abs(static_cast<long double>(h.coords[i]));
    kept *= std::max(0.0L, side - shift) / side;
  }
  return static_cast<double>(1.0L - kept);
}

double max_lattice_defect(std::int64_t radius, std::size_t rank, const ElementSet& test) {
  double worst = 0.0;
  for (const auto& h : test) worst = std::max(worst, lattice_box_defect(radius, rank, h));
  return worst;
}

long double box_size(const Group& group, std::int64_t radius) {
  const long double side = 2.0L * radius + 1.0L;
  if (group.family() == Family::integer_lattice) {
    return std::pow(side, static_cast<long double>(group.parameter()));
  }
  return side * side * (2.0L * radius * radius + 1.0L);
}

[[noreturn]] void over_budget(const Group& group, std::int64_t radius, long double size,
                              std::int64_t budget, bool lower_bound) {
  std::ostringstream os;
  os << "Folner box for " << group.name() << " needs radius " << (lower_bound ? ">= " : "") << radius
     << " (" << (lower_bound ? "at least " : "") << static_cast<double>(size)
     << " elements), above the element budget of " << budget;
  throw ScheduleError(os.str());
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

bool representable(double x) { return !std::isnan(x) && x != kInf; }

// log(2 e^x + 1)
double log_side(double log_r) { return log_r > 40.0 ? log_r + std::log(2.0) : std::log(2.0 * std::exp(log_r) + 1.0); }

double log_C_of_log_size(double log_size) {
  if (log_size > 700.0) return kInf;
  const double n = std::exp(log_size);
  return 0.5 * log_size + 2.0 * n * (std::log(8.0) + log_size);
}

std::string lvl(std::size_t j) { return "level[" + std::to_string(j) + "]"; }

ParameterSchedule theoretical(const Group& group, const ElementSet& f, double eps,
                              const ScheduleOptions& opt) {
  ParameterSchedule s;
  s.mode = ScheduleMode::theoretical;
  const double nf = static_cast<double>(f.size());
  s.kappa = eps / (8.0 * nf * nf);
  s.required_stages = required_stage_count(s.kappa, eps);
  s.stages = s.required_stages;
  s.runnable = false;
  s.notes.push_back("theoretical schedule: magnitudes are kept as natural logarithms and are not runnable");

  const double log_eps = std::log(eps);
  ScheduleLevel first;
  first.index = 1;
  first.log_size = std::log(nf);
  first.log_radius = std::log(std::max<double>(1.0, double(set_radius(f))));
  first.log_eta = std::log(eps / 8.0);
  first.log_c_lambda = std::log(eps / 20.0);
  first.log_lambda = first.log_c_lambda - log_C_of_log_size(first.log_size);
  first.elements = f;
  s.levels.push_back(first);

  const std::size_t total_levels = std::min(s.stages + 1, opt.theoretical_level_cap);
  while (s.levels.size() < total_levels) {
    const ScheduleLevel& prev = s.levels.back();
    ScheduleLevel next;
    next.index = prev.index + 1;
    if (prev.overflow) {
      next.overflow = true;
      s.levels.push_back(next);
      break;
    }
    // Target for the next stage's input quality, with the factor 4 carried by
    // the beta bound.
    const double lt = prev.log_lambda - std::log(8.0) - 2.0 * prev.log_size - std::log(4.0);
    const double room = 2.0 * lt - std::log(2.0);
    if (group.is_finite()) {
      next.log_eta = -kInf;
      next.log_size = std::log(static_cast<double>(group.order()));
      next.log_radius = 0.0;
    } else {
      next.log_eta = std::min(room, std::log(eps / 8.0));
      if (group.family() == Family::integer_lattice) {
        const double d = static_cast<double>(group.parameter());
        next.log_radius = std::max(prev.log_radius,
                                   std::log(d) + prev.log_radius - std::log(2.0) - next.log_eta);
        next.log_size = d * log_side(next.log_radius);
      } else {
        next.log_radius = std::max(prev.log_radius, std::log(2.0) + prev.log_radius - next.log_eta);
        next.log_size = std::log(8.0) + 4.0 * next.log_radius;
      }
    }
    const double log_c = log_C_of_log_size(next.log_size);
    next.log_c_lambda = std::min(room, std::log(eps / 4.0)) - std::log(5.0);
    next.log_lambda = next.log_c_lambda - log_c;
    next.overflow = !representable(next.log_size) || !representable(log_c) ||
                    std::isnan(next.log_lambda) || next.log_lambda == -kInf ||
                    !representable(next.log_eta) || std::isnan(lt);
    s.levels.push_back(next);
  }

  // Items A and B in log-space.
  for (std::size_t j = 0; j < s.levels.size(); ++j) {
    const auto& lv = s.levels[j];
    const std::string name = lvl(j + 1);
    if (lv.overflow) {
      s.checks.skip(name + ".item_B", "magnitude exceeds log-space range");
      continue;
    }
    const double lhs = log_add(log_add(std::log(2.0) + lv.log_eta, std::log(4.0 * s.kappa)),
                               std::log(5.0) + lv.log_c_lambda);
    s.checks.le(name + ".item_B.log", lhs, log_eps, true, 1e-12);
    if (j + 1 < s.levels.size()) {
      const auto& nx = s.levels[j + 1];
      if (nx.overflow) {
        s.checks.skip(name + ".item_A", "magnitude exceeds log-space range");
        continue;
      }
      const double a_lhs = 0.5 * log_add(nx.log_eta, std::log(5.0) + nx.log_c_lambda);
      const double a_rhs = lv.log_lambda - std::log(8.0) - 2.0 * lv.log_size;
      s.checks.le(name + ".item_A.log", a_lhs, a_rhs, true, 1e-12);
      s.checks.le(name + ".item_A_with_beta_factor.log", std::log(4.0) + a_lhs, a_rhs, true, 1e-12);
    }
  }
  if (s.levels.size() < s.stages + 1 && !s.levels.back().overflow) {
    s.notes.push_back("levels beyond " + std::to_string(s.levels.size()) + " not materialised");
  }
  return s;
}

ParameterSchedule practical(const Group& group, const ElementSet& f, double eps,
                            const ScheduleOptions& opt) {
  ParameterSchedule s;
  s.mode = ScheduleMode::practical;
  const double nf = static_cast<double>(f.size());
  s.kappa_overridden = opt.kappa.has_value();
  s.eta_overridden = opt.eta_target.has_value();
  s.kappa = opt.kappa.value_or(eps / (8.0 * nf * nf));
  if (!(s.kappa > 0.0 && s.kappa < 1.0)) throw ScheduleError("kappa must lie in (0, 1)");
  if (opt.stage_cap < 1) throw ScheduleError("stage cap must be at least 1");
  if (!(opt.lambda_ratio > 0.0 && opt.lambda_ratio <= 1.0)) {
    throw ScheduleError("lambda ratio must lie in (0, 1]");
  }
  s.required_stages = required_stage_count(s.kappa, eps);
  s.stages = opt.stage_cap;
  s.runnable = true;
  s.notes.push_back("practical schedule: constants C_n replaced by 1");

  ScheduleLevel first;
  first.index = 1;
  first.elements = f;
  first.radius = set_radius(f);
  first.eta = 0.0;
  first.lambda = opt.lambda1.value_or(eps / 20.0);
  if (!(first.lambda > 0.0 && first.lambda < 1.0)) throw ScheduleError("lambda_1 must lie in (0, 1)");
  s.levels.push_back(first);

  for (std::size_t j = 1; j <= s.stages; ++j) {
    const ScheduleLevel& prev = s.levels.back();
    ScheduleLevel next;
    next.index = j + 1;
    next.lambda = prev.lambda * opt.lambda_ratio;
    double target = 0.0;
    if (opt.eta_target) {
      target = *opt.eta_target;
    } else {
      target = 0.5 * (eps - 4.0 * s.kappa - 5.0 * next.lambda);
      if (!(target > 0.0)) {
        throw ScheduleError("no room for eta at " + lvl(j + 1) +
                            ": 4 kappa + 5 lambda already exceeds epsilon");
      }
    }
    if (!(target > 0.0 && target < 1.0)) throw ScheduleError("eta target must lie in (0, 1)");
    FolnerSet box = smallest_invariant_box(group, prev.elements, target, opt.element_budget);
    next.elements = box.elements();
    next.radius = set_radius(next.elements);
    next.eta = group.family() == Family::integer_lattice
                   ? max_lattice_defect(next.radius, static_cast<std::size_t>(group.parameter()),
                                        prev.elements)
                   : max_invariance_defect(box, prev.elements);
    s.levels.push_back(std::move(next));
  }
  for (auto& lv : s.levels) {
    lv.log_eta = std::log(lv.eta);
    lv.log_lambda = std::log(lv.lambda);
    lv.log_size = std::log(static_cast<double>(lv.elements.size()));
    lv.log_radius = std::log(static_cast<double>(std::max<std::int64_t>(lv.radius, 1)));
    lv.log_c_lambda = log_C_of_log_size(lv.log_size) + lv.log_lambda;
  }

  const bool item_b_asserted = !s.kappa_overridden && !s.eta_overridden;
  for (std::size_t j = 0; j < s.levels.size(); ++j) {
    const auto& lv = s.levels[j];
    const std::string name = lvl(j + 1);
    s.checks.le(name + ".item_B", 2.0 * lv.eta + 4.0 * s.kappa + 5.0 * lv.lambda, eps, item_b_asserted,
                1e-12, item_b_asserted ? "" : "kappa or eta target overridden");
    if (j + 1 < s.levels.size()) {
      const auto& nx = s.levels[j + 1];
      const double n2 = static_cast<double>(lv.elements.size()) * double(lv.elements.size());
      s.checks.le(name + ".item_A", std::sqrt(nx.eta + 5.0 * nx.lambda), lv.lambda / (8.0 * n2), false);
      const bool nested = std::includes(nx.elements.begin(), nx.elements.end(), lv.elements.begin(),
                                        lv.elements.end());
      s.checks.ge(name + ".nested", nested ? 1.0 : 0.0, 1.0);
      s.checks.le(lvl(j + 2) + ".eta", nx.eta, opt.eta_target.value_or(nx.eta), true, 1e-12);
    }
  }
  const double covered = 1.0 - std::pow(1.0 - 0.5 * s.kappa, static_cast<double>(s.stages));
  s.checks.ge("covered_fraction_guarantee", covered, 1.0 - eps, false, 0.0,
              "1 - (1 - kappa/2)^n against 1 - epsilon");
  return s;
}

}  // namespace

const char* schedule_mode_name(ScheduleMode mode) {
  return mode == ScheduleMode::theoretical ? "theoretical" : "practical";
}

ScheduleMode parse_schedule_mode(const std::string& name) {
  if (name == "theoretical") return ScheduleMode::theoretical;
  if (name == "practical") return ScheduleMode::practical;
  throw ScheduleError("unknown schedule mode '" + name + "' (expected practical or theoretical)");
}

std::size_t required_stage_count(double kappa, double epsilon) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ScheduleError("kappa must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ScheduleError("epsilon must lie in (0, 1)");
  const double base = 1.0 - 0.5 * kappa;
  const double goal = 0.5 * epsilon;
  auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(std::log(goal) / std::log(base))));
  // Settle rounding at the boundary by direct evaluation.
  while (n > 1 && std::pow(base, double(n - 1)) <= goal) --n;
  while (std::pow(base, double(n)) > goal) ++n;
  return n;
}

FolnerSet smallest_invariant_box(const Group& group, const ElementSet& test, double eta,
                                 std::int64_t budget) {
  if (group.is_finite()) return FolnerSet(group, group.enumerate());
  const std::int64_t r_min = set_radius(test);
  const bool lattice = group.family() == Family::integer_lattice;
  const auto rank = static_cast<std::size_t>(group.parameter());
  auto ok = [&](std::int64_t r, bool enumerate) {
    if (lattice) return max_lattice_defect(r, rank, test) <= eta;
    if (!enumerate) return false;
    return max_invariance_defect(centered_box(group, r, budget), test) <= eta;
  };
  // Doubling for an upper bound, then bisection.
  std::int64_t hi = std::max<std::int64_t>(r_min, 1);
  while (true) {
    const long double size = box_size(group, hi);
    if (size > static_cast<long double>(budget)) {
      if (!lattice) over_budget(group, hi, size, budget, true);
      if (hi > (std::int64_t{1} << 40)) over_budget(group, hi, size, budget, true);
    }
    if (ok(hi, size <= static_cast<long double>(budget))) break;
    hi *= 2;
  }
  std::int64_t lo = std::max<std::int64_t>(r_min, 1);
  if (!ok(lo, box_size(group, lo) <= static_cast<long double>(budget))) {
    ++lo;
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (ok(mid, box_size(group, mid) <= static_cast<long double>(budget))) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
  } else {
    hi = lo;
  }
  const long double size = box_size(group, hi);
  if (size > static_cast<long double>(budget)) over_budget(group, hi, size, budget, false);
  return centered_box(group, hi, budget);
}

ParameterSchedule parameter_schedule(const Group& group, const ElementSet& f, double epsilon,
                                     ScheduleMode mode, const ScheduleOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ScheduleError("epsilon must lie in (0, 1)");
  if (f.empty()) throw ScheduleError("F must be nonempty");
  for (const auto& g : f) group.validate(g);
  ElementSet fs = make_set(f);
  ParameterSchedule s = mode == ScheduleMode::theoretical ? theoretical(group, fs, epsilon, options)
                                                          : practical(group, fs, epsilon, options);
  s.group_name = group.name();
  s.f = std::move(fs);
  s.epsilon = epsilon;
  return s;
}

}  // namespace sofic
