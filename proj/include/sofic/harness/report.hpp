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

#include <json.hpp>

#include "sofic/checks.hpp"

namespace sofic::harness {

/// Process exit statuses of the harness.
inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIncomplete = 3;

/// Environment variable that overrides the report directory.
inline constexpr const char* kReportDirEnv = "SOFIC_REPORT_DIR";

/// Precedence: explicit override, then SOFIC_REPORT_DIR, then `configured`.
std::filesystem::path resolve_report_dir(const std::filesystem::path& configured,
                                         const std::optional<std::filesystem::path>& override_dir);

/// Library, Eigen, compiler and kernel ISA identification.
nlohmann::json versions();

/// Writes report.json, summary.csv (asserted checks only) and, when given,
/// timing.json. The report file holds no wall-clock data so repeated runs
/// compare byte for byte.
void write_report(const std::filesystem::path& dir, const nlohmann::json& report,
                  const CheckList& checks, const std::optional<nlohmann::json>& timing);

/// One CSV row per asserted check: name,lhs,rhs,pass.
std::string summary_csv(const CheckList& checks);

}  // namespace sofic::harness
