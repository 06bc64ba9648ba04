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

#include "sofic/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sofic/approximations.hpp"

namespace sofic::harness {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void only_keys(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) fail(path + "." + k, "unknown field");
  }
}

double get_number(const json& obj, const std::string& path, const std::string& key, double lo,
                  double hi, std::optional<double> fallback, bool open_lo = false) {
  if (!obj.contains(key)) {
    if (!fallback) fail(path + "." + key, "required field missing");
    return *fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number, got " + v.dump());
  const double x = v.get<double>();
  if (!std::isfinite(x) || x > hi || x < lo || (open_lo && x == lo)) {
    std::ostringstream os;
    os << "value " << x << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
    fail(path + "." + key, os.str());
  }
  return x;
}

std::int64_t get_integer(const json& obj, const std::string& path, const std::string& key,
                         std::int64_t lo, std::int64_t hi, std::optional<std::int64_t> fallback) {
  if (!obj.contains(key)) {
    if (!fallback) fail(path + "." + key, "required field missing");
    return *fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer, got " + v.dump());
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > hi) {
    fail(path + "." + key,
         "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return x;
}

std::uint64_t get_seed(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) return 0;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    fail(path + "." + key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       std::optional<std::string> fallback) {
  if (!obj.contains(key)) {
    if (!fallback) fail(path + "." + key, "required field missing");
    return *fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

ElementSet get_elements(const Group& group, const json& obj, const std::string& path,
                        const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "required field missing");
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) fail(path + "." + key, "expected a nonempty array of elements");
  std::vector<Element> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string at = path + "." + key + "[" + std::to_string(i) + "]";
    if (!v[i].is_string()) fail(at, "elements are written as strings, e.g. \"-1\" or \"(1,0)\"");
    try {
      out.push_back(group.parse(v[i].get<std::string>()));
    } catch (const GroupError& e) {
      fail(at, e.what());
    }
  }
  return make_set(std::move(out));
}

GeneratorKind parse_generator(const std::string& s, const std::string& path) {
  if (s == "genuine") return GeneratorKind::genuine;
  if (s == "noisy") return GeneratorKind::noisy;
  if (s == "random_conjugated") return GeneratorKind::random_conjugated;
  if (s == "identity") return GeneratorKind::identity;
  fail(path, "unknown generator '" + s + "' (expected genuine, noisy, random_conjugated or identity)");
}

void parse_tolerances(const json& t, NumericPolicy& p) {
  const std::string path = "tolerances";
  struct Field {
    const char* key;
    double NumericPolicy::*member;
  };
  static const Field fields[] = {
      {"rank_cutoff", &NumericPolicy::rank_cutoff},
      {"gram_schmidt_floor", &NumericPolicy::gram_schmidt_floor},
      {"unit_vector_tol", &NumericPolicy::unit_vector_tol},
      {"unitary_tol", &NumericPolicy::unitary_tol},
      {"hermitian_tol", &NumericPolicy::hermitian_tol},
      {"idempotent_tol", &NumericPolicy::idempotent_tol},
      {"trace_rank_tol", &NumericPolicy::trace_rank_tol},
      {"orthonormal_tol", &NumericPolicy::orthonormal_tol},
      {"family_orthonormal_tol", &NumericPolicy::family_orthonormal_tol},
      {"commute_tol", &NumericPolicy::commute_tol},
      {"partial_isometry_tol", &NumericPolicy::partial_isometry_tol},
      {"corner_slack", &NumericPolicy::corner_slack},
      {"permutation_entry_tol", &NumericPolicy::permutation_entry_tol},
      {"inequality_slack", &NumericPolicy::inequality_slack},
  };
  std::set<std::string> allowed;
  for (const auto& f : fields) allowed.insert(f.key);
  only_keys(t, path, allowed);
  for (const auto& f : fields) {
    p.*f.member = get_number(t, path, f.key, 0.0, 1e-2, p.*f.member, true);
  }
}

}  // namespace

const char* generator_kind_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::genuine: return "genuine";
    case GeneratorKind::noisy: return "noisy";
    case GeneratorKind::random_conjugated: return "random_conjugated";
    case GeneratorKind::identity: return "identity";
  }
  return "?";
}

ExperimentConfig parse_config(const json& doc) {
  only_keys(doc, "config",
            {"name", "group", "experiment", "generator", "test_set", "epsilon", "schedule", "lemma",
             "seed", "max_sample_attempts", "proposal", "tolerances", "output"});
  ExperimentConfig cfg;
  cfg.raw = doc;
  cfg.name = get_string(doc, "config", "name", std::string("experiment"));
  try {
    cfg.group = Group::from_name(get_string(doc, "config", "group", std::nullopt));
  } catch (const GroupError& e) {
    fail("config.group", e.what());
  }
  const std::string kind = get_string(doc, "config", "experiment", std::string("pipeline"));
  if (kind == "pipeline") {
    cfg.kind = ExperimentKind::pipeline;
  } else if (kind == "lemma") {
    cfg.kind = ExperimentKind::lemma;
  } else {
    fail("config.experiment", "expected pipeline or lemma");
  }

  if (!doc.contains("generator")) fail("config.generator", "required field missing");
  const json& gen = doc.at("generator");
  only_keys(gen, "generator", {"kind", "size", "noise", "seed"});
  cfg.generator.kind = parse_generator(get_string(gen, "generator", "kind", std::nullopt), "generator.kind");
  cfg.generator.size = get_integer(gen, "generator", "size", 1, kMaxInputDim, std::nullopt);
  cfg.generator.noise = get_number(gen, "generator", "noise", 0.0, 1.0, 0.0);
  cfg.generator.seed = get_seed(gen, "generator", "seed");
  if (cfg.generator.kind == GeneratorKind::noisy && !gen.contains("noise")) {
    fail("generator.noise", "required for the noisy generator");
  }
  if ((cfg.generator.kind == GeneratorKind::genuine || cfg.generator.kind == GeneratorKind::identity) &&
      cfg.generator.noise != 0.0) {
    fail("generator.noise", "only the noisy and random_conjugated generators take noise");
  }
  const std::int64_t dim = cfg.generator.kind == GeneratorKind::identity
                               ? cfg.generator.size
                               : static_cast<std::int64_t>(genuine_action_points(cfg.group, cfg.generator.size));
  if (dim > kMaxInputDim) {
    fail("generator.size", "input dimension " + std::to_string(dim) + " exceeds " + std::to_string(kMaxInputDim));
  }

  cfg.seed = get_seed(doc, "config", "seed");
  cfg.max_sample_attempts =
      static_cast<std::size_t>(get_integer(doc, "config", "max_sample_attempts", 1, 1000000, 4000));
  try {
    cfg.proposal = parse_proposal(get_string(doc, "config", "proposal", std::string("mixed")));
  } catch (const ExtractionError& e) {
    fail("config.proposal", e.what());
  }
  if (doc.contains("tolerances")) parse_tolerances(doc.at("tolerances"), cfg.policy);

  if (cfg.kind == ExperimentKind::pipeline) {
    if (doc.contains("lemma")) fail("config.lemma", "only valid for lemma experiments");
    cfg.test_set = get_elements(cfg.group, doc, "config", "test_set");
    cfg.epsilon = get_number(doc, "config", "epsilon", 0.0, 1.0, std::nullopt, true);
    if (cfg.epsilon >= 1.0) fail("config.epsilon", "must be below 1");
    if (!doc.contains("schedule")) fail("config.schedule", "required field missing");
    const json& s = doc.at("schedule");
    only_keys(s, "schedule", {"mode", "stages", "kappa", "eta_target", "lambda1", "lambda_ratio", "element_budget"});
    try {
      cfg.mode = parse_schedule_mode(get_string(s, "schedule", "mode", std::string("practical")));
    } catch (const ScheduleError& e) {
      fail("schedule.mode", e.what());
    }
    if (cfg.mode == ScheduleMode::theoretical) {
      fail("schedule.mode", "theoretical schedules are not runnable; inspect them with the schedule subcommand");
    }
    cfg.schedule.stage_cap = static_cast<std::size_t>(get_integer(s, "schedule", "stages", 1, 16, 3));
    if (s.contains("kappa")) cfg.schedule.kappa = get_number(s, "schedule", "kappa", 0.0, 0.99, std::nullopt, true);
    if (s.contains("eta_target")) {
      cfg.schedule.eta_target = get_number(s, "schedule", "eta_target", 0.0, 0.99, std::nullopt, true);
    }
    if (s.contains("lambda1")) cfg.schedule.lambda1 = get_number(s, "schedule", "lambda1", 0.0, 0.99, std::nullopt, true);
    cfg.schedule.lambda_ratio = get_number(s, "schedule", "lambda_ratio", 0.0, 1.0, 0.5, true);
    cfg.schedule.element_budget =
        get_integer(s, "schedule", "element_budget", 1, std::int64_t{1} << 26, kFolnerElementBudget);
  } else {
    for (const char* k : {"test_set", "epsilon", "schedule"}) {
      if (doc.contains(k)) fail(std::string("config.") + k, "only valid for pipeline experiments");
    }
    if (!doc.contains("lemma")) fail("config.lemma", "required for lemma experiments");
    const json& l = doc.at("lemma");
    only_keys(l, "lemma", {"shape", "size", "l", "lambda", "kappa"});
    LemmaSection sec;
    sec.shape = get_string(l, "lemma", "shape", std::string("box"));
    if (sec.shape != "box" && sec.shape != "centered") fail("lemma.shape", "expected box or centered");
    sec.size = get_integer(l, "lemma", "size", sec.shape == "box" ? 1 : 0, 4096, std::nullopt);
    sec.l = get_elements(cfg.group, l, "lemma", "l");
    sec.lambda = get_number(l, "lemma", "lambda", 0.0, 0.99, std::nullopt, true);
    sec.kappa = get_number(l, "lemma", "kappa", 0.0, 0.99, std::nullopt, true);
    cfg.lemma = std::move(sec);
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only_keys(o, "output", {"report_dir", "debug_matrices"});
    cfg.report_dir = get_string(o, "output", "report_dir", std::string());
    cfg.debug_matrices = get_bool(o, "output", "debug_matrices", false);
  }
  if (cfg.report_dir.empty()) cfg.report_dir = std::filesystem::path("reports") / cfg.name;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace sofic::harness
