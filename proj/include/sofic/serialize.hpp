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

#include <json.hpp>

#include "sofic/approximations.hpp"
#include "sofic/checks.hpp"
#include "sofic/extraction.hpp"
#include "sofic/pipeline.hpp"
#include "sofic/schedule.hpp"

/// JSON encodings used by run reports. Non-finite doubles are written as the
/// strings "inf", "-inf" and "nan"; elements as their canonical strings.
namespace sofic::serialize {

using json = nlohmann::json;

struct MatrixOptions {
  /// Matrices with more rows or columns than this are written as shape only.
  Index elide_above = 64;
  bool debug = false;
};

json number(double x);
/// Inverse of number(); accepts plain numbers and the three marker strings.
double parse_number(const json& j);

json elements(const Group& group, const ElementSet& set);
json checks(const CheckList& list);
json defect_report(const Group& group, const DefectReport& report);
/// {"rows", "cols", "elided", "data": [[re, im], ...] row-major}.
json matrix(const Matrix& a, const MatrixOptions& opts = {});
json sofic(const SoficApproximation& sigma);
json hyperlinear(const HyperlinearApproximation& alpha, const MatrixOptions& opts = {});
json harvest(const VectorHarvest& h);
json lemma_output(const Group& group, const LemmaOutput& out, const MatrixOptions& opts = {});
json pipeline_output(const Group& group, const PipelineOutput& out, const MatrixOptions& opts = {});
json schedule(const Group& group, const ParameterSchedule& s);

}  // namespace sofic::serialize
