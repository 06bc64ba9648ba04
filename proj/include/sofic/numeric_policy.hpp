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

namespace sofic {

/// Every numerical tolerance used by the library, in one place.
///
/// Defaults are the values the invariants are stated with; a run config may
/// override individual fields.
struct NumericPolicy {
  /// Singular values below rank_cutoff * (largest singular value) are zero.
  double rank_cutoff = 1e-9;
  /// Gram-Schmidt residuals below this norm are treated as degenerate.
  double gram_schmidt_floor = 1e-8;
  double unit_vector_tol = 1e-12;
  double unitary_tol = 1e-9;
  double hermitian_tol = 1e-10;
  double idempotent_tol = 1e-10;
  double trace_rank_tol = 1e-8;
  double orthonormal_tol = 1e-10;
  double family_orthonormal_tol = 1e-9;
  double commute_tol = 1e-8;
  double partial_isometry_tol = 1e-8;
  double corner_slack = 1e-8;
  double permutation_entry_tol = 1e-9;
  /// Slack added to the right-hand side of measured triangle inequalities.
  double inequality_slack = 1e-9;
};

inline constexpr NumericPolicy kDefaultPolicy{};

}  // namespace sofic
