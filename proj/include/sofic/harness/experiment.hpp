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

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "sofic/approximations.hpp"
#include "sofic/checks.hpp"
#include "sofic/harness/config.hpp"
#include "sofic/harness/report.hpp"

namespace sofic::harness {

struct RunOptions {
  std::optional<std::filesystem::path> report_dir;
  /// Adds matrices to the report regardless of the config flag.
  bool debug_matrices = false;
  /// Skip writing files (the report is still returned).
  bool write = true;
};

struct RunResult {
  int exit_code = kExitOk;
  std::filesystem::path report_dir;
  nlohmann::json report;
  CheckList checks;
  std::string message;
};

/// Builds the configured input approximation on `support`.
HyperlinearApproximation make_input(const ExperimentConfig& cfg, const ElementSet& support);

/// generator -> extraction -> metrics -> report files. Exit code 0 iff every
/// asserted check passed, 3 when a lemma step could not complete, 1 otherwise.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

}  // namespace sofic::harness
