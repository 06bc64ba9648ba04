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
#include <vector>

#include <json.hpp>

#include "sofic/checks.hpp"
#include "sofic/linalg.hpp"

namespace sofic::harness {

struct PropsOptions {
  std::vector<Index> dims{2, 4, 8, 16, 32};
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::vector<double> tail_c{2.0, 4.0, 8.0};
};

inline constexpr std::size_t kMinPropSamples = 10000;

/// Per dimension: a Gaussian matrix a, a random projection p of rank
/// max(1, d/4) and four Haar unitaries u_k; unit vectors xi sampled uniformly.
/// The projection statistic is (1/4) sum_k |p u_k xi|^2. Each sample draws from its
/// own stream, so results do not depend on evaluation order.
struct DimStats {
  Index dim = 0;
  double hs_sq = 0.0;  // |a|_HS^2
  double mean = 0.0;   // mean |a xi|^2
  double std_error = 0.0;
  std::vector<double> tail_freq;       // P(|a xi| > c |a|_HS)
  double proj_trace_fraction = 0.0;    // tr(p) / d
  double proj_mean = 0.0;              // mean of the projection statistic
  double proj_std_error = 0.0;
  std::vector<double> proj_tail_freq;  // P(statistic > c tr(p)/d)
  double coord_mean = 0.0;             // mean |<xi, e_0>|^2
  double coord_std_error = 0.0;
};

struct PropsReport {
  PropsOptions options;
  std::vector<DimStats> dims;
  CheckList checks;
  nlohmann::json to_json() const;
};

/// Throws std::invalid_argument when samples < kMinPropSamples or a
/// dimension is not positive.
PropsReport verify_probabilistic_props(const PropsOptions& options);

}  // namespace sofic::harness
