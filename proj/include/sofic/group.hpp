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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sofic {

enum class Family {
  integer_lattice,   // Z^d
  finite_cyclic,     // Z/nZ
  finite_symmetric,  // Sym(k), k <= 6
  heisenberg,        // integer Heisenberg group H_3(Z)
};

class GroupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A group element in normal form. Equal elements compare equal bitwise.
///
/// Lattice and Heisenberg elements are integer vectors, cyclic elements a
/// single residue in [0, n), symmetric elements the image word
/// (g(0), ..., g(k-1)).
struct Element {
  Family family = Family::integer_lattice;
  std::vector<std::int64_t> coords;

  auto operator<=>(const Element&) const = default;
  bool operator==(const Element&) const = default;
};

/// Sorted, duplicate-free list of elements.
using ElementSet = std::vector<Element>;

/// A countable discrete group with decidable multiplication.
class Group {
 public:
  static Group integer_lattice(int rank);
  static Group finite_cyclic(std::int64_t order);
  static Group finite_symmetric(int degree);
  static Group heisenberg();

  /// Parses "Z", "Z^2", "Z2", "C7", "S4", "H3"/"heisenberg".
  static Group from_name(std::string_view name);

  Family family() const { return family_; }
  /// Rank for lattices, order for cyclic, degree for symmetric, 3 for Heisenberg.
  std::int64_t parameter() const { return param_; }
  std::string name() const;
  bool is_finite() const;
  /// Number of elements for finite families.
  std::int64_t order() const;

  Element identity() const;
  Element multiply(const Element& g, const Element& h) const;
  Element inverse(const Element& g) const;
  /// Throws GroupError unless g is a valid normal form for this group.
  void validate(const Element& g) const;
  bool contains(const Element& g) const;

  /// Canonical string: "5" or "(1,-2)" for lattices, "3" for cyclic,
  /// "[1,0,2]" for symmetric, "(x,y,z)" for Heisenberg.
  std::string format(const Element& g) const;
  Element parse(std::string_view text) const;

  /// Every element of a finite group in lexicographic order.
  ElementSet enumerate() const;
  /// A symmetric generating set (generators and their inverses).
  ElementSet generators() const;

  /// Lattice/Heisenberg element from coordinates; cyclic residues are reduced.
  Element make(std::vector<std::int64_t> coords) const;

  bool operator==(const Group&) const = default;

 private:
  Group(Family family, std::int64_t param) : family_(family), param_(param) {}

  Family family_;
  std::int64_t param_;
};

/// Sorts and deduplicates.
ElementSet make_set(std::vector<Element> elements);
/// {a*b : a in lhs, b in rhs}.
ElementSet products(const Group& group, const ElementSet& lhs, const ElementSet& rhs);
ElementSet set_union(const ElementSet& lhs, const ElementSet& rhs);
bool set_contains(const ElementSet& set, const Element& g);

/// Finite subset M with a fixed canonical (lexicographic) iteration order.
class FolnerSet {
 public:
  FolnerSet(const Group& group, std::vector<Element> elements);

  const Group& group() const { return group_; }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool contains(const Element& g) const { return index_.count(g) != 0; }
  /// Position of g in the canonical order; throws if absent.
  std::size_t index_of(const Element& g) const;
  const Element& operator[](std::size_t i) const { return elements_[i]; }

 private:
  Group group_;
  std::vector<Element> elements_;
  std::map<Element, std::size_t> index_;
};

/// Default cap on the number of elements a constructed Folner set may hold.
inline constexpr std::int64_t kFolnerElementBudget = std::int64_t{1} << 22;

/// Box {0..R-1}^d for lattices; the whole group for finite families;
/// {0..R-1}^2 x {0..R^2-1} for Heisenberg.
FolnerSet folner_set(const Group& group, std::int64_t shape,
                     std::int64_t budget = kFolnerElementBudget);

/// Box centred at the identity: [-r, r]^d for lattices, [-r, r]^2 x [-r^2, r^2]
/// for Heisenberg, the whole group for finite families.
FolnerSet centered_box(const Group& group, std::int64_t radius,
                       std::int64_t budget = kFolnerElementBudget);

/// Number of g in M with h*g in M.
std::size_t translation_overlap(const FolnerSet& m, const Element& h);

/// 1 - |hM ∩ M| / |M|, exact by enumeration.
double invariance_defect(const FolnerSet& m, const Element& h);

/// Largest invariance defect over a test set.
double max_invariance_defect(const FolnerSet& m, const ElementSet& test);

}  // namespace sofic
