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

// Helpers shared by the extraction translation units.

#pragma once

#include <map>
#include <string>

#include "sofic/approximations.hpp"
#include "sofic/extraction.hpp"
#include "sofic/group.hpp"
#include "sofic/linalg.hpp"

namespace sofic::detail {

/// Columns alpha(g) xi for g in M, in M order.
inline Matrix orbit_matrix(const HyperlinearApproximation& alpha, const Vector& xi,
                           const FolnerSet& m) {
  Matrix a(alpha.dim(), static_cast<Index>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) a.col(static_cast<Index>(i)).noalias() = alpha.at(m[i]) * xi;
  return a;
}

/// alpha(k) xi with memoisation, seeded with an orbit matrix over M.
class OrbitCache {
 public:
  OrbitCache(const HyperlinearApproximation& alpha, const Vector& xi, const FolnerSet& m,
             const Matrix& orbit)
      : alpha_(alpha), xi_(xi) {
    for (std::size_t i = 0; i < m.size(); ++i) cache_.emplace(m[i], orbit.col(static_cast<Index>(i)));
  }
  const Vector& operator()(const Element& k) {
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(k, alpha_.at(k) * xi_).first->second;
  }

 private:
  const HyperlinearApproximation& alpha_;
  const Vector& xi_;
  std::map<Element, Vector> cache_;
};

/// Throws ExtractionError naming the first element of `needed` that alpha
/// does not support.
inline void require_support(const HyperlinearApproximation& alpha, const ElementSet& needed,
                            const std::string& what) {
  for (const auto& g : needed) {
    if (!alpha.supports(g)) {
      throw ExtractionError(what + ": element " + alpha.group().format(g) +
                            " is outside the support of the approximation");
    }
  }
}

inline double mult_or_zero(double c, double lambda) { return lambda == 0.0 ? 0.0 : c * lambda; }

}  // namespace sofic::detail
