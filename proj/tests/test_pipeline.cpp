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

#include "sofic/pipeline.hpp"

using namespace sofic;

namespace {

const Group kZ = Group::integer_lattice(1);

ElementSet z_set(std::initializer_list<std::int64_t> xs) {
  std::vector<Element> v;
  for (auto x : xs) v.push_back(kZ.make({x}));
  return make_set(std::move(v));
}

ParameterSchedule small_schedule(std::size_t stages) {
  ScheduleOptions o;
  o.stage_cap = stages;
  o.kappa = 0.25;
  o.eta_target = 0.25;
  return parameter_schedule(kZ, z_set({-1, 0, 1}), 0.5, ScheduleMode::practical, o);
}

}  // namespace

TEST(Pipeline, SmallFreeActionIsInducedPlusPadding) {
  const auto s = small_schedule(2);
  const auto alpha = induced_hyperlinear(genuine_action(kZ, 160, required_support(kZ, s)));
  const PipelineOutput out = extract(alpha, s);
  ASSERT_TRUE(out.complete) << out.failure;
  EXPECT_TRUE(out.checks.all_asserted_pass());
  ASSERT_EQ(out.stages.size(), 2u);
  EXPECT_EQ(out.stages[0].dim_in, 160);
  EXPECT_EQ(out.stages[1].dim_in, 160 - out.stages[0].lemma.dim_z);
  EXPECT_EQ(out.covered_dim + out.padding_dim, 160);
  EXPECT_NEAR(out.covered_fraction, static_cast<double>(out.covered_dim) / 160.0, 1e-15);
  EXPECT_GE(out.covered_fraction, 1.0 - std::pow(1.0 - 0.125, 2.0) - 1e-12);

  ASSERT_TRUE(out.omega && out.sofic);
  EXPECT_EQ(out.sofic->index_size(), 160u);
  EXPECT_LE(unitarity_error(out.basis), 1e-9);
  for (const auto& g : s.f) {
    // omega(g) = W P W* with P a permutation matrix.
    const Matrix p = out.basis.adjoint() * out.omega->at(g) * out.basis;
    EXPECT_LE(max_abs_diff(p, permutation_matrix(out.sofic->at(g))), 1e-9);
  }
  const auto d = hs_distances(alpha, *out.omega, s.f);
  for (std::size_t k = 0; k < d.size(); ++k) {
    EXPECT_NEAR(d[k], out.distance[k], 1e-12);
    EXPECT_LE(d[k], out.distance_bound[k] + 1e-9);
  }
}

TEST(Pipeline, RepeatRunsAreIdentical) {
  const auto s = small_schedule(2);
  const auto alpha = induced_hyperlinear(genuine_action(kZ, 96, required_support(kZ, s)));
  const PipelineOutput a = extract(alpha, s), b = extract(alpha, s);
  ASSERT_TRUE(a.complete && b.complete);
  EXPECT_EQ(a.basis, b.basis);
  EXPECT_EQ(a.distance, b.distance);
  EXPECT_EQ(a.sofic->perms(), b.sofic->perms());
  ExtractOptions other;
  other.seed = 1;
  const PipelineOutput c = extract(alpha, s, other);
  ASSERT_TRUE(c.complete);
  EXPECT_TRUE(c.checks.all_asserted_pass());
}

TEST(Pipeline, WholeSpaceCapturedGivesOmegaEqualAlpha) {
  // C4 acting on itself: one free orbit is the whole space and L is invariant.
  const Group c4 = Group::finite_cyclic(4);
  ScheduleOptions o;
  o.stage_cap = 1;
  o.kappa = 0.1;
  const ElementSet f = set_union(c4.generators(), {c4.identity()});
  const auto s = parameter_schedule(c4, f, 0.9, ScheduleMode::practical, o);
  const auto alpha = induced_hyperlinear(genuine_action(c4, 1, required_support(c4, s)));
  const PipelineOutput out = extract(alpha, s);
  ASSERT_TRUE(out.complete) << out.failure;
  EXPECT_EQ(out.covered_dim, 4);
  EXPECT_EQ(out.padding_dim, 0);
  for (double d : out.distance) EXPECT_LE(d, 1e-6);
}

TEST(Pipeline, IdentityInputStopsAtStageOne) {
  const auto s = small_schedule(2);
  std::map<Element, Matrix> us;
  for (const auto& g : required_support(kZ, s)) us.emplace(g, Matrix::Identity(64, 64));
  const HyperlinearApproximation alpha(kZ, 64, us);
  ExtractOptions opt;
  opt.max_sample_attempts = 100;
  const PipelineOutput out = extract(alpha, s, opt);
  EXPECT_FALSE(out.complete);
  ASSERT_TRUE(out.failed_stage.has_value());
  EXPECT_EQ(*out.failed_stage, 1u);
  ASSERT_EQ(out.stages.size(), 1u);
  EXPECT_EQ(out.stages[0].lemma.harvest.rejected_I, 100u);
}

TEST(Pipeline, RejectsUnrunnableScheduleAndSmallSupport) {
  const auto theo = parameter_schedule(kZ, z_set({-1, 1}), 0.5, ScheduleMode::theoretical);
  const auto alpha = induced_hyperlinear(genuine_action(kZ, 16, z_set({-1, 0, 1})));
  EXPECT_THROW(extract(alpha, theo), ExtractionError);
  EXPECT_THROW(extract(alpha, small_schedule(1)), ExtractionError);
}
