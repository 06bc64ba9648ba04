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

#include <cmath>

#include "sofic/approximations.hpp"
#include "sofic/extraction.hpp"
#include "sofic/rng.hpp"

using namespace sofic;

namespace {

const Group kZ = Group::integer_lattice(1);

ElementSet z_set(std::initializer_list<std::int64_t> xs) {
  std::vector<Element> v;
  for (auto x : xs) v.push_back(kZ.make({x}));
  return make_set(std::move(v));
}

ElementSet lemma_support(const Group& g, const FolnerSet& m, const ElementSet& l) {
  const ElementSet& me = m.elements();
  ElementSet s = set_union(me, products(g, me, me));
  s = set_union(s, l);
  s = set_union(s, products(g, l, me));
  return set_union(s, products(g, l, l));
}

HyperlinearApproximation genuine_z(std::int64_t points, const FolnerSet& m, const ElementSet& l) {
  return induced_hyperlinear(genuine_action(kZ, points, lemma_support(kZ, m, l)));
}

Vector basis_vector(Index d, Index k) {
  Vector e = Vector::Zero(d);
  e(k) = 1.0;
  return e;
}

// Direct recomputation of both conditions.
ConditionResult conditions_oracle(const HyperlinearApproximation& a, const Vector& xi, const FolnerSet& m) {
  ConditionResult r;
  const Group& g = a.group();
  for (const auto& x : m.elements()) {
    for (const auto& y : m.elements()) {
      if (x != y) r.max_I = std::max(r.max_I, std::abs((a.at(x) * xi).dot(a.at(y) * xi)));
      r.max_II = std::max(r.max_II, ((a.at(g.multiply(x, y)) - a.at(x) * a.at(y)) * xi).norm());
    }
  }
  return r;
}

}  // namespace

TEST(ConstantC, ClosedForms) {
  EXPECT_DOUBLE_EQ(constant_C(1), 64.0);
  EXPECT_DOUBLE_EQ(constant_C(2), 65536.0 * std::sqrt(2.0));
  EXPECT_TRUE(std::isinf(constant_C(200)));
  EXPECT_TRUE(std::isfinite(log_constant_C(200)));
  EXPECT_NEAR(log_constant_C(200), 0.5 * std::log(200.0) + 400.0 * std::log(1600.0), 1e-9);
  EXPECT_NEAR(log_constant_C(3), std::log(constant_C(3)), 1e-12);
}

TEST(Conditions, FreeOrbitOfBasisVector) {
  const FolnerSet m = folner_set(kZ, 20);
  const auto alpha = genuine_z(200, m, {});
  const auto r = check_conditions(alpha, basis_vector(200, 7), m, 1e-6);
  EXPECT_EQ(r.max_I, 0.0);
  EXPECT_EQ(r.max_II, 0.0);
  EXPECT_TRUE(r.holds_I);
  EXPECT_TRUE(r.holds_II);
}

TEST(Conditions, MatchesOracleOnNoisyInput) {
  const FolnerSet m = folner_set(kZ, 5);
  const auto sigma = genuine_action(kZ, 30, lemma_support(kZ, m, {}));
  const auto alpha = from_sofic_with_noise(sigma, 0.05, 2);
  StreamRng rng(1, 0);
  for (int t = 0; t < 5; ++t) {
    const Vector xi = random_unit_vector(30, rng);
    const auto r = check_conditions(alpha, xi, m, 0.5);
    const auto o = conditions_oracle(alpha, xi, m);
    EXPECT_NEAR(r.max_I, o.max_I, 1e-12);
    EXPECT_NEAR(r.max_II, o.max_II, 1e-12);
    EXPECT_EQ(r.holds_I, r.max_I <= 0.5);
  }
}

TEST(Conditions, AlignedVectorSeesOperatorDefect) {
  // alpha(1)^2 differs from alpha(2) by diag(-2, 0): HS defect sqrt(2), operator defect 2.
  const ElementSet sup = z_set({0, 1, 2});
  std::map<Element, Matrix> us;
  us.emplace(kZ.make({0}), Matrix::Identity(2, 2));
  us.emplace(kZ.make({1}), Matrix::Identity(2, 2));
  Matrix d = Matrix::Identity(2, 2);
  d(0, 0) = -1.0;
  us.emplace(kZ.make({2}), d);
  const HyperlinearApproximation alpha(kZ, 2, us);
  const FolnerSet m(kZ, {kZ.make({0}), kZ.make({1})});
  const double hs = hyperlinear_defect(alpha, m.elements()).worst_multiplicativity;
  EXPECT_NEAR(hs, std::sqrt(2.0), 1e-14);
  const auto r = check_conditions(alpha, basis_vector(2, 0), m, 0.1);
  EXPECT_NEAR(r.max_II, 2.0, 1e-14);
  EXPECT_GE(r.max_II, hs);
  EXPECT_FALSE(r.holds_II);
}

TEST(Conditions, MissingSupportThrows) {
  const FolnerSet m = folner_set(kZ, 4);
  const auto alpha = induced_hyperlinear(genuine_action(kZ, 10, m.elements()));
  EXPECT_THROW(check_conditions(alpha, basis_vector(10, 0), m, 0.1), ExtractionError);
}

TEST(Conditions, ChebyshevLevelHoldsWithStatedFrequency) {
  // For a fixed-point-free permutation u, E|<xi, u xi>|^2 = 1/(d+1), so
  // lambda = sqrt(8 |M|^2 / d) gives P[|<.,.>| > lambda] <= 1/(8|M|^2).
  const std::int64_t d = 256;
  const FolnerSet m = folner_set(kZ, 4);
  const auto alpha = genuine_z(d, m, {});
  const double msz = static_cast<double>(m.size());
  const double lambda = std::sqrt(8.0 * msz * msz / static_cast<double>(d));
  const Matrix& u = alpha.at(kZ.make({1}));
  const int n = 4000;
  int good = 0;
  for (int t = 0; t < n; ++t) {
    StreamRng rng(3, static_cast<std::uint64_t>(t));
    const Vector xi = random_unit_vector(d, rng);
    good += std::abs(xi.dot(u * xi)) <= lambda;
  }
  const double p = 1.0 - 1.0 / (8.0 * msz * msz);
  const double freq = static_cast<double>(good) / n;
  EXPECT_GE(freq, p - 3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST(Harvest, FreeActionCompletesWithConfirmedConditions) {
  const FolnerSet m = folner_set(kZ, 20);
  const ElementSet l = z_set({-1, 1});
  const auto alpha = genuine_z(200, m, l);
  LemmaConfig cfg = LemmaConfig::create(m, l, 1e-6, 0.3);
  const VectorHarvest h = harvest_vectors(alpha, cfg);
  ASSERT_TRUE(h.complete) << h.reason;
  EXPECT_NEAR(h.target_trace, 30.0, 1e-12);
  EXPECT_GT(h.final_trace, 30.0);
  EXPECT_GT(20.0 * static_cast<double>(h.vectors.size()), 30.0);
  for (std::size_t k = 0; k < h.vectors.size(); ++k) {
    const auto o = conditions_oracle(alpha, h.vectors[k], m);
    EXPECT_LE(o.max_I, 1e-6);
    EXPECT_LE(o.max_II, 1e-6);
    EXPECT_LE(h.overlaps[k], 0.3);
  }
  EXPECT_EQ(h.attempts, h.rejected_I + h.rejected_II + h.rejected_overlap + h.vectors.size());
}

TEST(Harvest, IsDeterministicGivenSeed) {
  const FolnerSet m = folner_set(kZ, 10);
  const ElementSet l = z_set({1});
  const auto alpha = from_sofic_with_noise(genuine_action(kZ, 80, lemma_support(kZ, m, l)), 1e-3, 1);
  LemmaConfig cfg = LemmaConfig::create(m, l, 0.05, 0.3);
  cfg.seed = 17;
  const VectorHarvest a = harvest_vectors(alpha, cfg), b = harvest_vectors(alpha, cfg);
  ASSERT_EQ(a.vectors.size(), b.vectors.size());
  for (std::size_t k = 0; k < a.vectors.size(); ++k) EXPECT_EQ(a.vectors[k], b.vectors[k]);
  EXPECT_EQ(a.accepted_attempts, b.accepted_attempts);
}

TEST(Harvest, DimensionBelowFolnerSizeIsIncomplete) {
  const FolnerSet m = folner_set(kZ, 20);
  const auto alpha = genuine_z(10, m, {});
  const VectorHarvest h = harvest_vectors(alpha, LemmaConfig::create(m, {}, 1e-3, 0.3));
  EXPECT_FALSE(h.complete);
  EXPECT_FALSE(h.reason.empty());
  EXPECT_TRUE(h.vectors.empty());
}

TEST(Harvest, IdentityMapFailsConditionOne) {
  const FolnerSet m = folner_set(kZ, 4);
  std::map<Element, Matrix> us;
  for (const auto& g : lemma_support(kZ, m, {})) us.emplace(g, Matrix::Identity(32, 32));
  const HyperlinearApproximation alpha(kZ, 32, us);
  LemmaConfig cfg = LemmaConfig::create(m, {}, 1e-3, 0.3);
  cfg.max_sample_attempts = 200;
  const VectorHarvest h = harvest_vectors(alpha, cfg);
  EXPECT_FALSE(h.complete);
  EXPECT_EQ(h.attempts, 200u);
  EXPECT_EQ(h.rejected_I, 200u);
  EXPECT_TRUE(h.vectors.empty());
}

TEST(Harvest, ConfigValidation) {
  const FolnerSet m = folner_set(kZ, 10);
  LemmaConfig cfg = LemmaConfig::create(m, z_set({3}), 1e-3, 0.3);
  EXPECT_DOUBLE_EQ(cfg.eta, 0.3);
  EXPECT_NO_THROW(cfg.validate());
  cfg.eta = 0.1;
  EXPECT_THROW(cfg.validate(), ExtractionError);
  cfg = LemmaConfig::create(m, {}, 0.0, 0.3);
  EXPECT_THROW(cfg.validate(), ExtractionError);
  cfg = LemmaConfig::create(m, {}, 0.1, 1.0);
  EXPECT_THROW(cfg.validate(), ExtractionError);
}

TEST(Orthonormalize, BasisVectorOrbitIsExact) {
  const FolnerSet m = folner_set(kZ, 8);
  const auto alpha = genuine_z(50, m, {});
  const Vector xi = basis_vector(50, 3);
  const auto r = orthonormalize_orbit(alpha, xi, m, Projection::zero(50), 0.0);
  ASSERT_EQ(r.kept.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(r.zetas.col(static_cast<Index>(i)), alpha.at(m[i]) * xi);
    EXPECT_EQ(r.deviations[i], 0.0);
  }
  EXPECT_EQ(r.deviation_full, 0.0);
  EXPECT_TRUE(r.excluded.empty());
}

TEST(Orthonormalize, NoisyOrbitWithinGramSchmidtBound) {
  const FolnerSet m = folner_set(kZ, 6);
  const auto alpha = from_sofic_with_noise(genuine_action(kZ, 120, lemma_support(kZ, m, {})), 1e-4, 4);
  StreamRng rng(5, 0);
  const Vector xi = random_unit_vector(120, rng);
  const auto c = check_conditions(alpha, xi, m, 1.0);
  const auto r = orthonormalize_orbit(alpha, xi, m, Projection::zero(120), 0.0, c.max_I);
  ASSERT_EQ(r.kept.size(), 6u);
  const Index k = r.zetas.cols();
  EXPECT_LE(max_abs_diff(r.zetas.adjoint() * r.zetas, Matrix::Identity(k, k)), 1e-10);
  for (std::size_t j = 0; j < 6; ++j) EXPECT_LE(r.deviations[j], chain_deviation_bound(6, j + 1, c.max_I));
}

TEST(Orthonormalize, LargeOverlapIsExcluded) {
  const FolnerSet m = folner_set(kZ, 10);
  const auto alpha = genuine_z(40, m, {});
  const Vector xi = basis_vector(40, 0);
  // |p e_3| = 0.3, |p e_g| = 0 otherwise; the mean overlap is 0.03 <= 0.04.
  Vector w = 0.3 * basis_vector(40, 3) + std::sqrt(1.0 - 0.09) * basis_vector(40, 30);
  const Projection p = Projection::from_orthonormal(Matrix(w));
  const auto r = orthonormalize_orbit(alpha, xi, m, p, 0.04);
  ASSERT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.excluded[0], m.index_of(kZ.make({3})));
  EXPECT_GE(static_cast<double>(r.kept.size()), (1.0 - 0.2) * 10.0);
  EXPECT_NEAR(r.rho_measured, 0.03, 1e-12);
  EXPECT_FALSE(r.rho_replaced);
  EXPECT_LE(r.orthogonality_error, 1e-9);
}

TEST(PartialPermutation, Examples) {
  const FolnerSet m = folner_set(kZ, 10);
  const auto id = build_partial_permutation(m, kZ.identity());
  EXPECT_EQ(id.mapping, identity_permutation(10));
  EXPECT_EQ(id.mismatch_fraction, 0.0);

  const auto s = build_partial_permutation(m, kZ.make({1}));
  for (std::size_t g = 0; g < 9; ++g) EXPECT_EQ(s.mapping[g], g + 1);
  EXPECT_EQ(s.mapping[9], 0u);
  EXPECT_DOUBLE_EQ(s.mismatch_fraction, 0.1);
  EXPECT_DOUBLE_EQ(s.mismatch_fraction, invariance_defect(m, kZ.make({1})));

  const Group c6 = Group::finite_cyclic(6);
  const FolnerSet w = folner_set(c6, 1);
  const auto t = build_partial_permutation(w, c6.make({2}));
  EXPECT_EQ(t.mismatches, 0u);
  for (std::size_t g = 0; g < 6; ++g) EXPECT_EQ(t.mapping[g], (g + 2) % 6);
}

TEST(PartialPermutation, RestrictedBase) {
  const FolnerSet m = folner_set(kZ, 10);
  const std::vector<std::size_t> sub{0, 1, 2, 5, 6};
  const auto s = build_partial_permutation(m, kZ.make({1}), &sub);
  EXPECT_EQ(s.base, sub);
  EXPECT_TRUE(is_bijection(s.mapping, 5));
  // 0->1, 1->2, 5->6 stay; 2 and 6 are rematched.
  EXPECT_EQ(s.mismatches, 2u);
}

TEST(LemmaStep, FreeZActionRecovery) {
  const FolnerSet m = folner_set(kZ, 20);
  const ElementSet l = z_set({-1, 1});
  const auto alpha = genuine_z(200, m, l);
  LemmaConfig cfg = LemmaConfig::create(m, l, 1e-6, 0.3);
  const LemmaOutput out = lemma_step(alpha, cfg);
  ASSERT_TRUE(out.complete) << out.failure;
  EXPECT_GE(out.dim_z, 30);
  EXPECT_EQ(out.dim_y + out.dim_z, 200);
  EXPECT_TRUE(out.checks.all_asserted_pass());
  ASSERT_TRUE(out.gamma_sofic.has_value());
  const DefectReport gd = sofic_defect(*out.gamma_sofic, l);
  EXPECT_LE(gd.worst_multiplicativity, out.kappa + out.eta);
  for (const auto& s : out.per_h) {
    EXPECT_LE(s.gamma_structure, 1e-9);
    EXPECT_LE(s.combined_distance, 0.2 + 1e-9);
    EXPECT_LE(s.corner.corner, s.corner.measured_bound + 1e-9);
    EXPECT_LE(s.commute_gamma, 1e-8);
    EXPECT_LE(s.beta_unitarity, 1e-9);
  }
  const Matrix gx = gamma_on_x(out, kZ.make({1}));
  for (Index i = 0; i < gx.rows(); ++i) {
    for (Index j = 0; j < gx.cols(); ++j) {
      const double a = std::abs(gx(i, j));
      EXPECT_TRUE(a < 1e-9 || std::abs(a - 1.0) < 1e-9);
    }
  }
}

TEST(LemmaStep, NoisyInputKeepsInvariants) {
  const FolnerSet m = folner_set(kZ, 20);
  const ElementSet l = z_set({-1, 1});
  const auto sigma = genuine_action(kZ, 200, lemma_support(kZ, m, l));
  const LemmaOutput clean = lemma_step(induced_hyperlinear(sigma), LemmaConfig::create(m, l, 0.05, 0.3));
  const LemmaOutput noisy =
      lemma_step(from_sofic_with_noise(sigma, 1e-3, 0), LemmaConfig::create(m, l, 0.05, 0.3));
  ASSERT_TRUE(clean.complete);
  ASSERT_TRUE(noisy.complete) << noisy.failure;
  EXPECT_TRUE(noisy.checks.all_asserted_pass());
  for (std::size_t k = 0; k < noisy.per_h.size(); ++k) {
    EXPECT_LE(noisy.per_h[k].gamma_trace, 2.0 * clean.per_h[k].gamma_trace + 5e-3);
    EXPECT_LE(noisy.per_h[k].combined_distance, 2.0 * clean.per_h[k].combined_distance + 5e-3);
  }
}

TEST(LemmaStep, WholeSpaceOrbitLeavesNoCorner) {
  const Group c5 = Group::finite_cyclic(5);
  const FolnerSet m = folner_set(c5, 1);
  const ElementSet l = c5.generators();
  const auto alpha = induced_hyperlinear(genuine_action(c5, 1, c5.enumerate()));
  const LemmaOutput out = lemma_step(alpha, LemmaConfig::create(m, l, 1e-6, 0.3));
  ASSERT_TRUE(out.complete) << out.failure;
  EXPECT_EQ(out.dim_z, 5);
  EXPECT_EQ(out.dim_y, 0);
  for (const auto& s : out.per_h) {
    EXPECT_LE(s.corner.corner, 1e-12);
    EXPECT_LE(s.combined_distance, 1e-12);
  }
}

TEST(LemmaStep, DimensionOneDegenerate) {
  const FolnerSet m(kZ, {kZ.identity()});
  std::map<Element, Matrix> us;
  us.emplace(kZ.identity(), Matrix::Identity(1, 1));
  const HyperlinearApproximation alpha(kZ, 1, us);
  const LemmaOutput out = lemma_step(alpha, LemmaConfig::create(m, {kZ.identity()}, 0.5, 0.3));
  ASSERT_TRUE(out.complete) << out.failure;
  EXPECT_EQ(out.dim_z, 1);
  EXPECT_EQ(out.dim_y, 0);
  ASSERT_TRUE(out.gamma_sofic.has_value());
  EXPECT_EQ(out.gamma_sofic->index_size(), 1u);
}

TEST(LemmaStep, IncompleteHarvestIsReported) {
  const FolnerSet m = folner_set(kZ, 20);
  const auto alpha = genuine_z(10, m, {});
  const LemmaOutput out = lemma_step(alpha, LemmaConfig::create(m, {}, 1e-3, 0.3));
  EXPECT_FALSE(out.complete);
  EXPECT_FALSE(out.failure.empty());
  EXPECT_THROW(gamma_on_x(out, kZ.identity()), ExtractionError);
}
