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

#include "sofic/harness/report.hpp"

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sofic/kernels.hpp"
#include "sofic/version.hpp"

namespace sofic::harness {

namespace {

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::filesystem::path resolve_report_dir(const std::filesystem::path& configured,
                                         const std::optional<std::filesystem::path>& override_dir) {
  if (override_dir && !override_dir->empty()) return *override_dir;
  if (const char* env = std::getenv(kReportDirEnv); env != nullptr && *env != '\0') return env;
  return configured;
}

nlohmann::json versions() {
  return {
      {"sofic", kVersion},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"compiler", __VERSION__},
      {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                   "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
      {"kernel_isa", std::string(kernels::isa_name(kernels::active_isa()))},
  };
}

std::string summary_csv(const CheckList& checks) {
  std::ostringstream os;
  os << "name,lhs,rhs,pass\n";
  for (const auto& c : checks.items()) {
    if (!c.asserted || c.skipped) continue;
    os << csv_field(c.name) << ',' << csv_number(c.lhs) << ',' << csv_number(c.rhs) << ','
       << (c.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

void write_report(const std::filesystem::path& dir, const nlohmann::json& report,
                  const CheckList& checks, const std::optional<nlohmann::json>& timing) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report.dump(2) + "\n");
  write_file(dir / "summary.csv", summary_csv(checks));
  if (timing) write_file(dir / "timing.json", timing->dump(2) + "\n");
}

}  // namespace sofic::harness
