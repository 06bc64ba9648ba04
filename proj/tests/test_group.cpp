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

#include <gtest/gtest.h>

#include <array>
#include <random>
#include <set>

#include "sofic/group.hpp"

using namespace sofic;

namespace {

using Mat3 = std::array<std::array<std::int64_t, 3>, 3>;

// Upper unitriangular model of H3(Z).
Mat3 to_matrix(const Element& g) {
  return {{{1, g.coords[0], g.coords[2]}, {0, 1, g.coords[1]}, {0, 0, 1}}};
}

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

std::vector<Group> all_families() {
  return {Group::integer_lattice(1), Group::integer_lattice(2), Group::finite_cyclic(7),
          Group::finite_symmetric(4), Group::heisenberg()};
}

ElementSet ball(const Group& g) {
  if (g.is_finite()) return g.enumerate();
  return centered_box(g, 2).elements();
}

}  // namespace

TEST(Group, ExamplesFromTheGroupLaw) {
  const Group z = Group::integer_lattice(1);
  EXPECT_EQ(z.multiply(z.make({3}), z.make({5})), z.make({8}));
  EXPECT_EQ(z.inverse(z.make({4})), z.make({-4}));
  const Group c7 = Group::finite_cyclic(7);
  EXPECT_EQ(c7.multiply(c7.make({5}), c7.make({4})), c7.make({2}));
  EXPECT_EQ(c7.inverse(c7.make({5})), c7.make({2}));
  const Group h = Group::heisenberg();
  EXPECT_EQ(h.multiply(h.make({1, 0, 0}), h.make({0, 1, 0})), h.make({1, 1, 1}));
}

TEST(Group, HeisenbergMatchesMatrixModel) {
  const Group h = Group::heisenberg();
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> u(-20, 20);
  for (int t = 0; t < 500; ++t) {
    const Element a = h.make({u(gen), u(gen), u(gen)});
    const Element b = h.make({u(gen), u(gen), u(gen)});
    const Mat3 m = mul(to_matrix(a), to_matrix(b));
    const Element ab = h.multiply(a, b);
    EXPECT_EQ(to_matrix(ab), m);
    EXPECT_EQ(h.multiply(a, h.inverse(a)), h.identity());
    EXPECT_EQ(mul(to_matrix(a), to_matrix(h.inverse(a))), to_matrix(h.identity()));
  }
}

TEST(Group, SymmetricComposesAsFunctions) {
  const Group s = Group::finite_symmetric(4);
  const auto all = s.enumerate();
  ASSERT_EQ(all.size(), 24u);
  for (const auto& g : all) {
    for (const auto& k : all) {
      const Element gk = s.multiply(g, k);
      for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(gk.coords[i], g.coords[static_cast<std::size_t>(k.coords[i])]);
      }
    }
  }
}

TEST(Group, AxiomsOnBoundedBalls) {
  for (const Group& g : all_families()) {
    const auto b = ball(g);
    const Element e = g.identity();
    for (const auto& x : b) {
      EXPECT_EQ(g.multiply(x, e), x) << g.name();
      EXPECT_EQ(g.multiply(e, x), x) << g.name();
      EXPECT_EQ(g.multiply(x, g.inverse(x)), e) << g.name();
    }
    const std::size_t step = b.size() > 30 ? b.size() / 30 : 1;
    for (std::size_t i = 0; i < b.size(); i += step)
      for (std::size_t j = 0; j < b.size(); j += step)
        for (std::size_t k = 0; k < b.size(); k += step) {
          EXPECT_EQ(g.multiply(g.multiply(b[i], b[j]), b[k]), g.multiply(b[i], g.multiply(b[j], b[k])))
              << g.name();
        }
  }
}

TEST(Group, FormatParseRoundTrip) {
  for (const Group& g : all_families()) {
    for (const auto& x : ball(g)) EXPECT_EQ(g.parse(g.format(x)), x) << g.format(x);
  }
  EXPECT_EQ(Group::from_name("Z^2"), Group::integer_lattice(2));
  EXPECT_EQ(Group::from_name("c7"), Group::finite_cyclic(7));
  EXPECT_EQ(Group::from_name("H3"), Group::heisenberg());
  EXPECT_THROW(Group::from_name("Q8"), GroupError);
  EXPECT_THROW(Group::finite_symmetric(7), GroupError);
  EXPECT_THROW(Group::integer_lattice(1).parse("(1,2)"), GroupError);
}

TEST(Group, MixedFamiliesAreRejected) {
  const Group z = Group::integer_lattice(1);
  const Group c = Group::finite_cyclic(5);
  EXPECT_THROW(z.multiply(z.make({1}), c.make({1})), GroupError);
}

TEST(Group, NormalFormIsUnique) {
  const Group c7 = Group::finite_cyclic(7);
  EXPECT_EQ(c7.make({12}), c7.make({5}));
  EXPECT_EQ(c7.make({-2}), c7.make({5}));
}

TEST(Folner, BoxesAndWholeGroups) {
  const Group z = Group::integer_lattice(1);
  const FolnerSet m = folner_set(z, 10);
  ASSERT_EQ(m.size(), 10u);
  for (std::int64_t i = 0; i < 10; ++i) EXPECT_EQ(m[static_cast<std::size_t>(i)], z.make({i}));

  const Group c5 = Group::finite_cyclic(5);
  const FolnerSet w = folner_set(c5, 1);
  EXPECT_EQ(w.size(), 5u);
  for (const auto& h : c5.enumerate()) EXPECT_EQ(invariance_defect(w, h), 0.0);

  const Group h3 = Group::heisenberg();
  EXPECT_EQ(folner_set(h3, 3).size(), 3u * 3u * 9u);
  EXPECT_THROW(folner_set(z, 100, 50), GroupError);
}

TEST(Folner, InvarianceDefectByEnumeration) {
  const Group z = Group::integer_lattice(1);
  auto oracle = [&](const FolnerSet& m, const Element& h) {
    std::set<Element> s(m.elements().begin(), m.elements().end());
    std::size_t hit = 0;
    for (const auto& g : m.elements()) hit += s.count(z.multiply(h, g));
    return 1.0 - static_cast<double>(hit) / static_cast<double>(m.size());
  };
  const FolnerSet m10 = folner_set(z, 10);
  EXPECT_DOUBLE_EQ(invariance_defect(m10, z.make({3})), 0.3);
  EXPECT_DOUBLE_EQ(invariance_defect(m10, z.identity()), 0.0);
  const FolnerSet m100 = folner_set(z, 100);
  // The oracle's 1 - hit/n rounds differently from (n - hit)/n.
  EXPECT_NEAR(invariance_defect(m100, z.make({1})), oracle(m100, z.make({1})), 1e-15);
  EXPECT_DOUBLE_EQ(invariance_defect(m100, z.make({1})), 0.01);
  for (int h = -12; h <= 12; ++h) {
    EXPECT_DOUBLE_EQ(invariance_defect(m10, z.make({h})), oracle(m10, z.make({h})));
  }
}

TEST(Folner, DefectDecreasesWithSide) {
  for (const Group& g : {Group::integer_lattice(1), Group::integer_lattice(2)}) {
    const Element h = g.generators().back();
    double prev = 1.0;
    for (std::int64_t r : {10, 20, 40, 80}) {
      const double d = invariance_defect(folner_set(g, r), h);
      EXPECT_LT(d, prev) << g.name() << " R=" << r;
      prev = d;
    }
  }
}

TEST(Folner, HeisenbergBoxDefectShrinks) {
  const Group h3 = Group::heisenberg();
  const auto gens = h3.generators();
  double prev = 1.0;
  for (std::int64_t r : {2, 4, 8}) {
    const double d = max_invariance_defect(centered_box(h3, r), gens);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(Folner, IdentityHasZeroDefect) {
  for (const Group& g : all_families()) {
    const FolnerSet m = g.is_finite() ? folner_set(g, 1) : centered_box(g, 2);
    EXPECT_EQ(invariance_defect(m, g.identity()), 0.0) << g.name();
    EXPECT_TRUE(std::is_sorted(m.elements().begin(), m.elements().end()));
  }
}
