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

#include "sofic/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "detail.hpp"
#include "sofic/kernels.hpp"

namespace sofic {

namespace {

ElementSet stage_needs(const Group& group, const ElementSet& m, const ElementSet& l) {
  ElementSet out = set_union(m, products(group, m, m));
  out = set_union(out, l);
  return set_union(out, products(group, l, m));
}

struct Block {
  Matrix zetas;  // global coordinates
  const SoficApproximation* gamma;
};

}  // namespace

ElementSet required_support(const Group& group, const ParameterSchedule& schedule) {
  ElementSet out = set_union(schedule.f, products(group, schedule.f, schedule.f));
  for (std::size_t s = 1; s <= schedule.stages; ++s) {
    out = set_union(out, stage_needs(group, schedule.m_level(s).elements, schedule.l_level(s).elements));
  }
  return out;
}

PipelineOutput extract(const HyperlinearApproximation& alpha, const ParameterSchedule& schedule,
                       const ExtractOptions& options) {
  if (!schedule.runnable) {
    throw ExtractionError("schedule is not runnable (theoretical schedules are log-space only)");
  }
  const Group& group = alpha.group();
  if (group.name() != schedule.group_name) {
    throw ExtractionError("schedule was built for " + schedule.group_name + ", approximation is over " +
                          group.name());
  }
  detail::require_support(alpha, required_support(group, schedule), "extract");
  const Index d = alpha.dim();
  const ElementSet& f = schedule.f;
  const std::size_t n = schedule.stages;

  PipelineOutput out;
  out.complete = true;
  Matrix embed = Matrix::Identity(d, d);
  std::unique_ptr<HyperlinearApproximation> owned;
  const HyperlinearApproximation* cur = &alpha;

  for (std::size_t s = 1; s <= n; ++s) {
    const auto& ml = schedule.m_level(s);
    const auto& ll = schedule.l_level(s);
    FolnerSet m(group, ml.elements);
    LemmaConfig cfg = LemmaConfig::create(m, ll.elements, ml.lambda, schedule.kappa);
    cfg.max_sample_attempts = options.max_sample_attempts;
    cfg.seed = options.seed;
    cfg.stage = s;
    cfg.proposal = options.proposal;
    cfg.policy = options.policy;
    if (s < n) {
      const auto& nm = schedule.m_level(s + 1).elements;
      const auto& nl = schedule.l_level(s + 1).elements;
      cfg.beta_support = set_union(stage_needs(group, nm, nl), f);
    } else {
      cfg.beta_support = f;
    }

    StageRecord rec;
    rec.stage = s;
    rec.dim_in = cur->dim();
    rec.lemma = lemma_step(*cur, cfg);
    const std::string prefix = "stage[" + std::to_string(s) + "].";
    out.checks.append(rec.lemma.checks, prefix);
    for (const auto& w : rec.lemma.warnings) out.warnings.push_back(prefix + w);
    if (!rec.lemma.complete) {
      out.complete = false;
      out.failed_stage = s;
      out.failure = rec.lemma.failure;
      out.stages.push_back(std::move(rec));
      break;
    }
    for (const auto& g : f) {
      auto it = std::find_if(rec.lemma.per_h.begin(), rec.lemma.per_h.end(),
                             [&](const StepMetrics& sm) { return sm.h == g; });
      rec.stage_distance.push_back(it->combined_distance);
    }
    embed = embed * rec.lemma.y_basis;
    out.stages.push_back(std::move(rec));
    StageRecord& kept = out.stages.back();
    if (s < n) {
      owned = std::make_unique<HyperlinearApproximation>(std::move(*kept.lemma.beta));
      kept.lemma.beta.reset();
      cur = owned.get();
    } else {
      cur = &*kept.lemma.beta;
    }
  }

  // Global bases: Z-blocks pulled back through the chain of Y embeddings.
  std::vector<Block> blocks;
  {
    Matrix chain = Matrix::Identity(d, d);
    for (const auto& rec : out.stages) {
      if (!rec.lemma.complete) break;
      blocks.push_back({chain * rec.lemma.family.zetas, &*rec.lemma.gamma_sofic});
      chain = chain * rec.lemma.y_basis;
    }
  }
  Index covered = 0;
  for (const auto& b : blocks) covered += b.zetas.cols();
  out.covered_dim = covered;
  out.padding_dim = embed.cols();
  out.covered_fraction = static_cast<double>(covered) / static_cast<double>(d);
  out.basis.resize(d, d);
  {
    Index at = 0;
    for (const auto& b : blocks) {
      out.basis.middleCols(at, b.zetas.cols()) = b.zetas;
      at += b.zetas.cols();
    }
    out.basis.rightCols(out.padding_dim) = embed;
  }

  const ElementSet omega_support = set_union(f, products(group, f, f));
  std::map<Element, Permutation> perms;
  std::map<Element, Matrix> omegas;
  const Matrix pad_proj = embed * embed.adjoint();
  for (const auto& g : omega_support) {
    Permutation perm(static_cast<std::size_t>(d));
    Matrix om = pad_proj;
    std::size_t off = 0;
    for (const auto& b : blocks) {
      const Permutation& pg = b.gamma->at(g);
      const Index k = b.zetas.cols();
      Matrix moved(d, k);
      for (Index x = 0; x < k; ++x) {
        perm[off + x] = off + pg[x];
        moved.col(x) = b.zetas.col(static_cast<Index>(pg[x]));
      }
      om.noalias() += moved * b.zetas.adjoint();
      off += static_cast<std::size_t>(k);
    }
    for (std::size_t v = off; v < static_cast<std::size_t>(d); ++v) perm[v] = v;
    perms.emplace(g, std::move(perm));
    omegas.emplace(g, std::move(om));
  }
  out.sofic.emplace(group, static_cast<std::size_t>(d), std::move(perms));
  out.omega.emplace(group, d, std::move(omegas), options.policy);
  out.omega_sofic_defect = sofic_defect(*out.sofic, f);

  const NumericPolicy& pol = options.policy;
  CheckList& ck = out.checks;
  ck.le("omega.basis_unitary", unitarity_error(out.basis), pol.unitary_tol);
  for (const auto& g : omega_support) {
    const Matrix coords = out.basis.adjoint() * out.omega->at(g) * out.basis;
    ck.le("omega.h=" + group.format(g) + ".induced_structure",
          max_abs_diff(coords, permutation_matrix(out.sofic->at(g))), pol.permutation_entry_tol);
  }
  const std::size_t done = blocks.size();
  ck.ge("covered_fraction", out.covered_fraction,
        1.0 - std::pow(1.0 - 0.5 * schedule.kappa, static_cast<double>(done)), true, 1e-12);
  ck.ge("covered_fraction_epsilon", out.covered_fraction, 1.0 - schedule.epsilon, false);

  // Distance to alpha on F and its telescoping bound over the stages.
  const double dd = static_cast<double>(d);
  const double pad = static_cast<double>(out.padding_dim);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Element& g = f[i];
    const double dist = hs_distance(alpha.at(g), out.omega->at(g));
    double bound = 0.0;
    for (std::size_t s = 0; s < done; ++s) {
      bound += std::sqrt(static_cast<double>(out.stages[s].dim_in) / dd) * out.stages[s].stage_distance[i];
    }
    double rest = 0.0;
    if (out.padding_dim > 0) {
      const Matrix& r = cur->at(g);
      rest = hs_distance(r, Matrix::Identity(r.rows(), r.cols()));
      bound += std::sqrt(pad / dd) * rest;
    }
    // Squared HS cost of the identity padding measured on X.
    Matrix moved = alpha.at(g) * embed - embed;
    const double cost = out.padding_dim ? kernels::norm2(view(moved)) / dd : 0.0;
    out.distance.push_back(dist);
    out.distance_bound.push_back(bound);
    out.padding_cost_sq.push_back(cost);
    const std::string base = "omega.h=" + group.format(g);
    ck.le(base + ".distance", dist, bound, true, pol.inequality_slack);
    ck.le(base + ".padding_cost", cost, 4.0 * pad / dd, true, pol.inequality_slack);
    ck.le(base + ".distance_epsilon", dist, schedule.epsilon, false);
  }
  if (!out.complete) out.warnings.push_back("pipeline stopped at stage " + std::to_string(*out.failed_stage));
  return out;
}

}  // namespace sofic
