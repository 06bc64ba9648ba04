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
#include <string>
#include <vector>

#include "sofic/approximations.hpp"
#include "sofic/checks.hpp"
#include "sofic/extraction.hpp"
#include "sofic/schedule.hpp"

namespace sofic {

struct ExtractOptions {
  std::uint64_t seed = 0;
  std::size_t max_sample_attempts = 4000;
  Proposal proposal = Proposal::mixed;
  NumericPolicy policy = kDefaultPolicy;
};

/// Per-stage record. The lemma output keeps its metrics and bases; beta is
/// moved into the next stage and is absent here except for the last stage.
struct StageRecord {
  std::size_t stage = 0;  // 1-based
  Index dim_in = 0;
  LemmaOutput lemma;
  /// Per element of F: |alpha_l(g) - (gamma_l + beta_l)(g)|_HS on Y_{l-1}.
  std::vector<double> stage_distance;
};

struct PipelineOutput {
  bool complete = false;
  /// Stage that failed (1-based) when incomplete.
  std::optional<std::size_t> failed_stage;
  std::string failure;
  std::vector<StageRecord> stages;

  /// Unitary W whose columns are the bases of Z_1, ..., Z_n and the final
  /// remainder; omega(g) = W P_sigma(g) W*.
  Matrix basis;
  std::optional<SoficApproximation> sofic;
  std::optional<HyperlinearApproximation> omega;
  Index covered_dim = 0;
  Index padding_dim = 0;
  double covered_fraction = 0.0;
  /// Per element of F.
  std::vector<double> distance;
  std::vector<double> distance_bound;
  std::vector<double> padding_cost_sq;
  std::optional<DefectReport> omega_sofic_defect;
  CheckList checks;
  std::vector<std::string> warnings;
};

/// Elements alpha must support for extract() to run `schedule`.
ElementSet required_support(const Group& group, const ParameterSchedule& schedule);

/// Iterates the lemma on successive remainders. Throws ExtractionError for a
/// schedule that is not runnable or a support that is too small.
PipelineOutput extract(const HyperlinearApproximation& alpha, const ParameterSchedule& schedule,
                       const ExtractOptions& options = {});

}  // namespace sofic
