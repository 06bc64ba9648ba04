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

#include "sofic/harness/experiment.hpp"

#include <chrono>

#include "sofic/extraction.hpp"
#include "sofic/pipeline.hpp"
#include "sofic/rng.hpp"
#include "sofic/schedule.hpp"
#include "sofic/serialize.hpp"

namespace sofic::harness {

namespace {

using nlohmann::json;

constexpr std::uint64_t kConjugationStream = 0x636f6e6aULL;

json check_counts(const CheckList& checks) {
  std::size_t asserted = 0, passed = 0, informational = 0, skipped = 0;
  json failed = json::array();
  for (const auto& c : checks.items()) {
    if (c.skipped) {
      ++skipped;
    } else if (!c.asserted) {
      ++informational;
    } else {
      ++asserted;
      if (c.pass) {
        ++passed;
      } else {
        failed.push_back(c.name);
      }
    }
  }
  return {{"asserted", asserted}, {"passed", passed}, {"informational", informational},
          {"skipped", skipped},   {"failed", failed}};
}

json input_summary(const ExperimentConfig& cfg, const HyperlinearApproximation& alpha,
                   const ElementSet& test) {
  return {{"generator", generator_kind_name(cfg.generator.kind)},
          {"size", cfg.generator.size},
          {"noise", serialize::number(cfg.generator.noise)},
          {"dim", alpha.dim()},
          {"support_size", alpha.support().size()},
          {"defect", serialize::defect_report(cfg.group, hyperlinear_defect(alpha, test))}};
}

}  // namespace

HyperlinearApproximation make_input(const ExperimentConfig& cfg, const ElementSet& support) {
  const auto& gen = cfg.generator;
  if (gen.kind == GeneratorKind::identity) {
    std::map<Element, Matrix> us;
    for (const auto& g : support) us.emplace(g, Matrix::Identity(gen.size, gen.size));
    return HyperlinearApproximation(cfg.group, gen.size, std::move(us), cfg.policy);
  }
  const SoficApproximation sigma = genuine_action(cfg.group, gen.size, support);
  switch (gen.kind) {
    case GeneratorKind::genuine:
      return induced_hyperlinear(sigma);
    case GeneratorKind::noisy:
      return from_sofic_with_noise(sigma, gen.noise, gen.seed);
    case GeneratorKind::random_conjugated:
      return random_conjugated(from_sofic_with_noise(sigma, gen.noise, gen.seed),
                               StreamRng::stream_id({gen.seed, kConjugationStream}));
    case GeneratorKind::identity:
      break;
  }
  throw ConfigError("generator: unhandled kind");
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  res.report_dir = resolve_report_dir(cfg.report_dir, options.report_dir);
  const serialize::MatrixOptions mopts{64, cfg.debug_matrices || options.debug_matrices};

  json report = {{"name", cfg.name},
                 {"config", cfg.raw},
                 {"versions", versions()},
                 {"experiment", cfg.kind == ExperimentKind::pipeline ? "pipeline" : "lemma"}};
  bool complete = true;
  try {
    if (cfg.kind == ExperimentKind::pipeline) {
      const ParameterSchedule schedule =
          parameter_schedule(cfg.group, cfg.test_set, cfg.epsilon, cfg.mode, cfg.schedule);
      res.checks.append(schedule.checks, "schedule.");
      const HyperlinearApproximation alpha = make_input(cfg, required_support(cfg.group, schedule));
      report["input"] = input_summary(cfg, alpha, schedule.f);
      report["schedule"] = serialize::schedule(cfg.group, schedule);
      ExtractOptions eo;
      eo.seed = cfg.seed;
      eo.max_sample_attempts = cfg.max_sample_attempts;
      eo.proposal = cfg.proposal;
      eo.policy = cfg.policy;
      const PipelineOutput out = extract(alpha, schedule, eo);
      res.checks.append(out.checks);
      report["pipeline"] = serialize::pipeline_output(cfg.group, out, mopts);
      report["covered_fraction"] = serialize::number(out.covered_fraction);
      complete = out.complete;
      if (!complete) res.message = "stage " + std::to_string(*out.failed_stage) + " incomplete: " + out.failure;
    } else {
      const LemmaSection& sec = *cfg.lemma;
      FolnerSet m = sec.shape == "box" ? folner_set(cfg.group, sec.size) : centered_box(cfg.group, sec.size);
      LemmaConfig lc = LemmaConfig::create(m, sec.l, sec.lambda, sec.kappa);
      lc.max_sample_attempts = cfg.max_sample_attempts;
      lc.seed = cfg.seed;
      lc.stage = 1;
      lc.proposal = cfg.proposal;
      lc.policy = cfg.policy;
      const ElementSet& me = m.elements();
      ElementSet support = set_union(me, products(cfg.group, me, me));
      support = set_union(support, sec.l);
      support = set_union(support, products(cfg.group, sec.l, me));
      support = set_union(support, products(cfg.group, sec.l, sec.l));
      const HyperlinearApproximation alpha = make_input(cfg, support);
      report["input"] = input_summary(cfg, alpha, sec.l);
      const LemmaOutput out = lemma_step(alpha, lc);
      res.checks.append(out.checks);
      report["lemma"] = serialize::lemma_output(cfg.group, out, mopts);
      json dist = json::array();
      for (const auto& sm : out.per_h) {
        dist.push_back({{"h", cfg.group.format(sm.h)}, {"distance", serialize::number(sm.combined_distance)}});
      }
      report["distance"] = std::move(dist);
      report["covered_fraction"] =
          serialize::number(out.dim_x ? static_cast<double>(out.dim_z) / static_cast<double>(out.dim_x) : 0.0);
      complete = out.complete;
      if (!complete) res.message = "lemma step incomplete: " + out.failure;
    }
  } catch (const ScheduleError& e) {
    res.exit_code = kExitConfigError;
    res.message = std::string("schedule: ") + e.what();
    return res;
  } catch (const ExtractionError& e) {
    res.exit_code = kExitConfigError;
    res.message = std::string("extraction: ") + e.what();
    return res;
  } catch (const ApproximationError& e) {
    res.exit_code = kExitConfigError;
    res.message = std::string("generator: ") + e.what();
    return res;
  } catch (const GroupError& e) {
    res.exit_code = kExitConfigError;
    res.message = std::string("group: ") + e.what();
    return res;
  }

  if (!complete) {
    res.exit_code = kExitIncomplete;
  } else {
    res.exit_code = res.checks.all_asserted_pass() ? kExitOk : kExitChecksFailed;
    if (res.exit_code != kExitOk) res.message = "asserted checks failed";
  }
  report["complete"] = complete;
  report["checks"] = serialize::checks(res.checks);
  report["check_counts"] = check_counts(res.checks);
  report["exit_code"] = res.exit_code;
  report["message"] = res.message;
  res.report = std::move(report);

  if (options.write) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report(res.report_dir, res.report, res.checks, json{{"wall_seconds", secs}});
  }
  return res;
}

}  // namespace sofic::harness
