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

// Command-line front end: run experiments, check the sampling facts, and
// print parameter schedules.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sofic/harness/config.hpp"
#include "sofic/harness/experiment.hpp"
#include "sofic/harness/probabilistic.hpp"
#include "sofic/harness/report.hpp"
#include "sofic/schedule.hpp"
#include "sofic/serialize.hpp"

namespace {

using namespace sofic;
using namespace sofic::harness;

std::optional<std::filesystem::path> dir_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

void print_failures(const CheckList& checks) {
  for (const Check* c : checks.failures()) {
    std::fprintf(stderr, "FAILED %s: %.6g > %.6g\n", c->name.c_str(), c->lhs, c->rhs);
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ';' || (c == ',' && depth == 0)) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_run(const std::string& config_path, const std::string& report_dir, bool debug) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "invalid config: %s\n", e.what());
    return kExitConfigError;
  }
  RunOptions opts;
  opts.report_dir = dir_flag(report_dir);
  opts.debug_matrices = debug;
  const RunResult res = run_experiment(cfg, opts);
  if (res.exit_code == kExitConfigError) {
    std::fprintf(stderr, "invalid config: %s\n", res.message.c_str());
    return res.exit_code;
  }
  print_failures(res.checks);
  const auto& cf = res.report.at("covered_fraction");
  std::printf("%s: exit %d%s%s\n", cfg.name.c_str(), res.exit_code, res.message.empty() ? "" : ", ",
              res.message.c_str());
  std::printf("covered fraction %s\n", cf.dump().c_str());
  std::printf("report written to %s\n", res.report_dir.string().c_str());
  return res.exit_code;
}

int cmd_props(const std::string& dims, std::size_t samples, std::uint64_t seed, const std::string& report_dir) {
  PropsOptions opts;
  opts.samples = samples;
  opts.seed = seed;
  opts.dims.clear();
  try {
    for (const auto& d : split_list(dims)) opts.dims.push_back(std::stol(d));
  } catch (const std::exception&) {
    std::fprintf(stderr, "invalid --dims '%s'\n", dims.c_str());
    return kExitConfigError;
  }
  PropsReport rep;
  try {
    rep = verify_probabilistic_props(opts);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfigError;
  }
  nlohmann::json j = rep.to_json();
  j["versions"] = versions();
  const auto dir = resolve_report_dir("reports/verify-props", dir_flag(report_dir));
  write_report(dir, j, rep.checks, std::nullopt);
  for (const auto& s : rep.dims) {
    std::printf("d=%ld  E|a xi|^2=%.6f  |a|_HS^2=%.6f  se=%.2e", static_cast<long>(s.dim), s.mean, s.hs_sq,
                s.std_error);
    for (std::size_t k = 0; k < s.tail_freq.size(); ++k) {
      std::printf("  P(c=%g)=%.4f", opts.tail_c[k], s.tail_freq[k]);
    }
    std::printf("\n");
  }
  print_failures(rep.checks);
  std::printf("report written to %s\n", dir.string().c_str());
  return rep.checks.all_asserted_pass() ? kExitOk : kExitChecksFailed;
}

int cmd_schedule(const std::string& group_name, double epsilon, const std::string& mode_name,
                 const std::string& test_set, std::size_t stages, std::optional<double> kappa,
                 std::optional<double> eta, const std::string& report_dir) {
  ParameterSchedule s;
  std::optional<Group> group;
  try {
    group = Group::from_name(group_name);
    ElementSet f;
    if (test_set.empty()) {
      f = set_union(group->generators(), {group->identity()});
    } else {
      std::vector<Element> es;
      for (const auto& t : split_list(test_set)) es.push_back(group->parse(t));
      f = make_set(std::move(es));
    }
    ScheduleOptions so;
    so.stage_cap = stages;
    so.kappa = kappa;
    so.eta_target = eta;
    s = parameter_schedule(*group, f, epsilon, parse_schedule_mode(mode_name), so);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "schedule: %s\n", e.what());
    return kExitConfigError;
  }
  nlohmann::json j = serialize::schedule(*group, s);
  j["versions"] = versions();
  const auto dir = resolve_report_dir("reports/schedule", dir_flag(report_dir));
  write_report(dir, j, s.checks, std::nullopt);
  std::printf("%s schedule for %s, epsilon %g: kappa %.6g, %zu stages (%zu required)\n",
              schedule_mode_name(s.mode), s.group_name.c_str(), s.epsilon, s.kappa, s.stages,
              s.required_stages);
  for (const auto& lv : s.levels) {
    if (s.mode == ScheduleMode::practical) {
      std::printf("  L_%zu: radius %lld, |L| = %zu, eta %.4g, lambda %.4g\n", lv.index,
                  static_cast<long long>(lv.radius), lv.elements.size(), lv.eta, lv.lambda);
    } else if (lv.index <= 6 || lv.overflow) {
      std::printf("  L_%zu: log eta %.6g, log lambda %.6g, log |L| %.6g%s\n", lv.index, lv.log_eta,
                  lv.log_lambda, lv.log_size, lv.overflow ? " (overflow)" : "");
    }
  }
  for (const auto& n : s.notes) std::printf("  note: %s\n", n.c_str());
  print_failures(s.checks);
  std::printf("report written to %s\n", dir.string().c_str());
  return s.checks.all_asserted_pass() ? kExitOk : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extract sofic approximations from hyperlinear ones over amenable groups"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string report_dir;
  bool debug = false;
  app.add_option("--report-dir", report_dir, "Directory for report.json and summary.csv");
  app.add_flag("--debug-matrices", debug, "Include matrices of any size in reports");

  auto* run = app.add_subcommand("run", "Run one experiment config");
  std::string config_path;
  run->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* props = app.add_subcommand("verify-props", "Monte Carlo checks of the random-vector facts");
  std::string dims = "2,4,8,16,32";
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  props->add_option("--dims", dims, "Comma-separated dimensions");
  props->add_option("--samples", samples, "Samples per dimension (at least 10000)");
  props->add_option("--seed", seed, "Seed");

  auto* sched = app.add_subcommand("schedule", "Print a parameter schedule");
  std::string group_name, mode = "practical", test_set;
  double epsilon = 0.5;
  std::size_t stages = 3;
  std::optional<double> kappa, eta;
  sched->add_option("--group", group_name, "Group name: Z, Z^2, C7, S4, H3")->required();
  sched->add_option("--epsilon", epsilon, "Target epsilon in (0, 1)")->required();
  sched->add_option("--mode", mode, "practical or theoretical");
  sched->add_option("--test-set", test_set, "Elements of F, comma separated (default generators and identity)");
  sched->add_option("--stages", stages, "Practical mode: lemma steps");
  sched->add_option("--kappa", kappa, "Override kappa");
  sched->add_option("--eta-target", eta, "Practical mode: invariance target per level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }
  if (*run) return cmd_run(config_path, report_dir, debug);
  if (*props) return cmd_props(dims, samples, seed, report_dir);
  return cmd_schedule(group_name, epsilon, mode, test_set, stages, kappa, eta, report_dir);
}
