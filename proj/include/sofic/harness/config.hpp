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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sofic/extraction.hpp"
#include "sofic/group.hpp"
#include "sofic/numeric_policy.hpp"
#include "sofic/schedule.hpp"

namespace sofic::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { pipeline, lemma };

/// identity: alpha(g) = I on C^size (fails Condition I by construction).
enum class GeneratorKind { genuine, noisy, random_conjugated, identity };

const char* generator_kind_name(GeneratorKind kind);

struct GeneratorConfig {
  GeneratorKind kind = GeneratorKind::genuine;
  /// Passed to genuine_action: torus side for Z^d and H3, copies for finite groups.
  std::int64_t size = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// A single lemma step on M = box of the given shape, with explicit L.
struct LemmaSection {
  /// "box" = {0..size-1}^d, "centered" = [-size, size]^d (see folner_set and
  /// centered_box).
  std::string shape = "box";
  std::int64_t size = 1;
  ElementSet l;
  double lambda = 1e-6;
  double kappa = 0.3;
};

struct ExperimentConfig {
  std::string name;
  Group group = Group::integer_lattice(1);
  ExperimentKind kind = ExperimentKind::pipeline;
  GeneratorConfig generator;

  // Pipeline experiments.
  ElementSet test_set;
  double epsilon = 0.5;
  ScheduleMode mode = ScheduleMode::practical;
  ScheduleOptions schedule;

  std::optional<LemmaSection> lemma;

  std::uint64_t seed = 0;
  std::size_t max_sample_attempts = 4000;
  Proposal proposal = Proposal::mixed;
  NumericPolicy policy = kDefaultPolicy;

  std::filesystem::path report_dir;
  bool debug_matrices = false;

  /// The parsed document, echoed into the report.
  nlohmann::json raw;
};

/// Largest input dimension a config may request.
inline constexpr std::int64_t kMaxInputDim = 2048;

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a file; relative report paths resolve against the
/// current directory.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sofic::harness
