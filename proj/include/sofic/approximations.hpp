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
#include <map>
#include <stdexcept>
#include <vector>

#include "sofic/group.hpp"
#include "sofic/linalg.hpp"
#include "sofic/numeric_policy.hpp"

namespace sofic {

class ApproximationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// perm[v] is the image of v.
using Permutation = std::vector<std::size_t>;

bool is_bijection(const Permutation& perm, std::size_t n);
/// (a o b)[v] = a[b[v]]
Permutation compose(const Permutation& a, const Permutation& b);
Permutation invert(const Permutation& perm);
Permutation identity_permutation(std::size_t n);

/// Finite-support map from group elements to permutations of {0..n-1}.
/// The identity element, if supported, may map to any permutation.
class SoficApproximation {
 public:
  SoficApproximation(Group group, std::size_t index_size, std::map<Element, Permutation> perms);

  const Group& group() const { return group_; }
  std::size_t index_size() const { return n_; }
  ElementSet support() const;
  bool supports(const Element& g) const { return perms_.count(g) != 0; }
  /// Throws ApproximationError outside the support.
  const Permutation& at(const Element& g) const;
  const std::map<Element, Permutation>& perms() const { return perms_; }

 private:
  Group group_;
  std::size_t n_;
  std::map<Element, Permutation> perms_;
};

/// Finite-support map from group elements to unitaries on C^dim.
class HyperlinearApproximation {
 public:
  /// Validates shape and unitarity within policy.unitary_tol.
  HyperlinearApproximation(Group group, Index dim, std::map<Element, Matrix> unitaries,
                           const NumericPolicy& policy = kDefaultPolicy);

  const Group& group() const { return group_; }
  Index dim() const { return dim_; }
  ElementSet support() const;
  bool supports(const Element& g) const { return unitaries_.count(g) != 0; }
  bool supports_all(const ElementSet& set) const;
  const Matrix& at(const Element& g) const;
  const std::map<Element, Matrix>& unitaries() const { return unitaries_; }

 private:
  Group group_;
  Index dim_;
  std::map<Element, Matrix> unitaries_;
};

struct PairValue {
  Element g;
  Element h;
  double value = 0.0;
};

/// Defect metrics over a test set F.
///
/// Sofic: multiplicativity values are the fraction of v with
/// sigma(g)sigma(h)v != sigma(gh)v; separation values the fraction of v with
/// sigma(g)v != sigma(h)v, margin 1 - fraction.
/// Hyperlinear: multiplicativity values are |alpha(gh) - alpha(g)alpha(h)|_HS;
/// separation values |alpha(g) - alpha(h)|_HS, margin sqrt(2) - value.
struct DefectReport {
  ElementSet test_set;
  std::vector<PairValue> multiplicativity;
  /// Pairs (g, h) whose product gh lies outside the support.
  std::vector<PairValue> gaps;
  std::vector<PairValue> separation;
  std::vector<double> separation_margin;

  double worst_multiplicativity = 0.0;
  double mean_multiplicativity = 0.0;
  double worst_margin = 0.0;
  double mean_margin = 0.0;
  /// max(worst_multiplicativity, worst_margin): the smallest epsilon for which
  /// the map is an (F, epsilon) approximation.
  double epsilon() const;
};

/// Elements of F outside the support raise ApproximationError.
DefectReport sofic_defect(const SoficApproximation& sigma, const ElementSet& test);
DefectReport hyperlinear_defect(const HyperlinearApproximation& alpha, const ElementSet& test);

/// alpha(g) e_v = e_{sigma(g) v} in the standard basis.
HyperlinearApproximation induced_hyperlinear(const SoficApproximation& sigma);
Matrix permutation_matrix(const Permutation& perm);

/// Per-element |alpha(g) - beta(g)|_HS, in the order of `test`.
std::vector<double> hs_distances(const HyperlinearApproximation& alpha,
                                 const HyperlinearApproximation& beta, const ElementSet& test);

/// Block-diagonal sum on the intersection of supports. Elements present in
/// only one summand are appended to `dropped` when it is given.
HyperlinearApproximation direct_sum(const HyperlinearApproximation& a,
                                    const HyperlinearApproximation& b,
                                    std::vector<Element>* dropped = nullptr);
/// Disjoint union of index sets (b's indices shifted by a.index_size()).
SoficApproximation disjoint_union(const SoficApproximation& a, const SoficApproximation& b,
                                  std::vector<Element>* dropped = nullptr);

/// alpha(g) = exp(i * noise * H_g) * P_sigma(g), H_g Hermitian with unit
/// normalised HS norm. Each element draws from its own stream.
HyperlinearApproximation from_sofic_with_noise(const SoficApproximation& sigma, double noise,
                                               std::uint64_t seed);

/// w alpha(g) w* for one Haar-random unitary w.
HyperlinearApproximation random_conjugated(const HyperlinearApproximation& alpha,
                                           std::uint64_t seed);

/// A genuine action of the group restricted to `support`:
///   Z^d         translation on (Z/N)^d, N = size;
///   C_n, S_k    left multiplication on `size` disjoint copies of the group;
///   Heisenberg  left multiplication on H_3(Z/N), N = size (N^3 points).
SoficApproximation genuine_action(const Group& group, std::int64_t size, const ElementSet& support);

/// Number of points genuine_action acts on.
std::size_t genuine_action_points(const Group& group, std::int64_t size);

}  // namespace sofic
