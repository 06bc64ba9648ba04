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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail.hpp"
#include "sofic/extraction.hpp"
#include "sofic/kernels.hpp"
#include "sofic/rng.hpp"

namespace sofic {

namespace {

constexpr std::uint64_t kHarvestStream = 0x68617276ULL;
constexpr double kInf = std::numeric_limits<double>::infinity();

double condition_I_max(const Matrix& orbit) {
  const Index n = orbit.cols();
  if (n < 2) return 0.0;
  const Matrix gram = orbit.adjoint() * orbit;
  double worst = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) worst = std::max(worst, std::abs(gram(i, j)));
  }
  return worst;
}

// Largest |(alpha(gh) - alpha(g)alpha(h)) xi|; returns early once the running
// maximum exceeds stop_above.
double condition_II_max(const HyperlinearApproximation& alpha, const Vector& xi,
                        const FolnerSet& m, const Matrix& orbit, double stop_above) {
  const Group& group = alpha.group();
  detail::OrbitCache cache(alpha, xi, m, orbit);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Matrix moved = alpha.at(m[i]) * orbit;
    for (std::size_t j = 0; j < m.size(); ++j) {
      const Vector& target = cache(group.multiply(m[i], m[j]));
      const double dist =
          std::sqrt(kernels::diff_norm2(column(moved, static_cast<Index>(j)), view(target)));
      worst = std::max(worst, dist);
      if (worst > stop_above) return worst;
    }
  }
  return worst;
}

double mean_projected_norm(const Projection& q, const Matrix& orbit) {
  if (q.rank() == 0 || orbit.cols() == 0) return 0.0;
  const Matrix coeff = q.basis().adjoint() * orbit;
  double total = 0.0;
  for (Index j = 0; j < coeff.cols(); ++j) total += std::sqrt(kernels::norm2(column(coeff, j)));
  return total / static_cast<double>(orbit.cols());
}

void check_hypothesis(const HyperlinearApproximation& alpha, const LemmaConfig& cfg,
                      VectorHarvest& out) {
  const auto& m = cfg.m;
  const double n = static_cast<double>(m.size());
  out.hypothesis_level = cfg.lambda / (8.0 * n * n);
  const Group& group = alpha.group();
  const double root2 = std::sqrt(2.0);

  // Separation over distinct pairs (cheap), multiplicativity on a spread of
  // at most 16 pairs (one matrix product each).
  constexpr std::size_t kSeparationBudget = 256;
  constexpr std::size_t kProductBudget = 16;
  double worst_margin = -kInf;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < m.size() && pairs < kSeparationBudget; ++i) {
    for (std::size_t j = i + 1; j < m.size() && pairs < kSeparationBudget; ++j, ++pairs) {
      worst_margin = std::max(worst_margin, root2 - hs_distance(alpha.at(m[i]), alpha.at(m[j])));
    }
  }
  const std::size_t total = m.size() * m.size();
  const std::size_t stride = std::max<std::size_t>(1, total / kProductBudget);
  double worst_mult = 0.0;
  for (std::size_t k = 0; k < total; k += stride) {
    const Element& g = m[k / m.size()];
    const Element& h = m[k % m.size()];
    const Matrix prod = alpha.at(g) * alpha.at(h);
    worst_mult = std::max(worst_mult, hs_distance(alpha.at(group.multiply(g, h)), prod));
    ++pairs;
  }
  out.hypothesis_pairs_checked = pairs;
  out.hypothesis_multiplicativity = worst_mult;
  out.hypothesis_separation_margin = m.size() > 1 ? worst_margin : 0.0;
  out.hypothesis_met = worst_mult <= out.hypothesis_level &&
                       out.hypothesis_separation_margin <= out.hypothesis_level;
  if (!out.hypothesis_met) {
    std::ostringstream os;
    os << "approximation quality on M (multiplicativity " << worst_mult << ", separation margin "
       << out.hypothesis_separation_margin << ") exceeds lambda/(8|M|^2) = " << out.hypothesis_level
       << "; proceeding with measured acceptance";
    out.warnings.push_back(os.str());
  }
}

}  // namespace

double constant_C(std::size_t n) {
  const double nd = static_cast<double>(n);
  const double v = std::sqrt(nd) * std::pow(8.0 * nd, 2.0 * nd);
  return std::isfinite(v) ? v : kInf;
}

double log_constant_C(std::size_t n) {
  const double nd = static_cast<double>(n);
  return 0.5 * std::log(nd) + 2.0 * nd * std::log(8.0 * nd);
}

ConditionResult check_conditions(const HyperlinearApproximation& alpha, const Vector& xi,
                                 const FolnerSet& m, double lambda) {
  detail::require_support(alpha, m.elements(), "check_conditions");
  detail::require_support(alpha, products(alpha.group(), m.elements(), m.elements()),
                          "check_conditions");
  if (xi.size() != alpha.dim()) throw ExtractionError("check_conditions: vector dimension mismatch");
  const Matrix orbit = detail::orbit_matrix(alpha, xi, m);
  ConditionResult r;
  r.max_I = condition_I_max(orbit);
  r.max_II = condition_II_max(alpha, xi, m, orbit, kInf);
  r.holds_I = r.max_I <= lambda;
  r.holds_II = r.max_II <= lambda;
  return r;
}

const char* proposal_name(Proposal p) {
  switch (p) {
    case Proposal::haar: return "haar";
    case Proposal::coordinate: return "coordinate";
    case Proposal::mixed: return "mixed";
  }
  return "?";
}

Proposal parse_proposal(const std::string& name) {
  if (name == "haar") return Proposal::haar;
  if (name == "coordinate") return Proposal::coordinate;
  if (name == "mixed") return Proposal::mixed;
  throw ExtractionError("unknown proposal '" + name + "' (expected haar, coordinate or mixed)");
}

LemmaConfig LemmaConfig::create(FolnerSet m, ElementSet l, double lambda, double kappa) {
  LemmaConfig cfg{.m = std::move(m), .l = std::move(l), .lambda = lambda, .kappa = kappa};
  cfg.eta = max_invariance_defect(cfg.m, cfg.l);
  return cfg;
}

void LemmaConfig::validate() const {
  auto in_open_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!in_open_unit(lambda)) throw ExtractionError("lambda must lie in (0, 1)");
  if (!in_open_unit(kappa)) throw ExtractionError("kappa must lie in (0, 1)");
  if (!(eta >= 0.0 && eta < 1.0)) throw ExtractionError("eta must lie in [0, 1)");
  if (max_sample_attempts == 0) throw ExtractionError("max_sample_attempts must be positive");
  for (const auto& h : l) {
    const double d = invariance_defect(m, h);
    if (d > eta + policy.inequality_slack) {
      std::ostringstream os;
      os << "invariance defect " << d << " of M at " << m.group().format(h) << " exceeds eta = " << eta;
      throw ExtractionError(os.str());
    }
  }
}

VectorHarvest harvest_vectors(const HyperlinearApproximation& alpha, const LemmaConfig& cfg) {
  cfg.validate();
  const auto& m = cfg.m;
  detail::require_support(alpha, m.elements(), "harvest_vectors");
  detail::require_support(alpha, products(alpha.group(), m.elements(), m.elements()),
                          "harvest_vectors");
  const Index d = alpha.dim();
  VectorHarvest out;
  out.target_trace = 0.5 * cfg.kappa * static_cast<double>(d);
  if (d < static_cast<Index>(m.size())) {
    out.reason = "dimension smaller than |M|";
    return out;
  }
  check_hypothesis(alpha, cfg, out);

  Projection q = Projection::zero(d);
  std::size_t attempt = 0;
  for (; attempt < cfg.max_sample_attempts; ++attempt) {
    if (static_cast<double>(q.rank()) > out.target_trace) break;
    StreamRng rng(cfg.seed, StreamRng::stream_id({kHarvestStream, cfg.stage, attempt}));
    const bool coordinate = cfg.proposal == Proposal::coordinate ||
                            (cfg.proposal == Proposal::mixed && attempt % 2 == 0);
    Vector xi;
    if (coordinate) {
      xi = Vector::Zero(d);
      xi(static_cast<Index>(rng.below(static_cast<std::uint64_t>(d)))) = 1.0;
    } else {
      xi = random_unit_vector(d, rng);
    }
    const Matrix orbit = detail::orbit_matrix(alpha, xi, m);
    const double max_i = condition_I_max(orbit);
    if (!(max_i <= cfg.lambda)) {
      ++out.rejected_I;
      continue;
    }
    const double overlap = mean_projected_norm(q, orbit);
    if (!(overlap <= cfg.kappa)) {
      ++out.rejected_overlap;
      continue;
    }
    const double max_ii = condition_II_max(alpha, xi, m, orbit, cfg.lambda);
    if (!(max_ii <= cfg.lambda)) {
      ++out.rejected_II;
      continue;
    }
    Projection p = Projection::onto_span(orbit, cfg.policy);
    q = projection_join(q, p, cfg.policy);
    out.vectors.push_back(std::move(xi));
    out.orbit_projections.push_back(std::move(p));
    out.cumulative.push_back(q);
    out.max_I.push_back(max_i);
    out.max_II.push_back(max_ii);
    out.overlaps.push_back(overlap);
    out.accepted_attempts.push_back(attempt);
  }
  out.attempts = attempt;
  out.final_trace = static_cast<double>(q.rank());
  out.complete = out.final_trace > out.target_trace;
  if (!out.complete) {
    std::ostringstream os;
    os << "sample attempts exhausted after " << attempt << " (accepted " << out.vectors.size()
       << ", rejected: condition I " << out.rejected_I << ", overlap " << out.rejected_overlap
       << ", condition II " << out.rejected_II << ")";
    out.reason = os.str();
  }
  return out;
}

OrthonormalizationResult orthonormalize_orbit(const HyperlinearApproximation& alpha,
                                              const Vector& xi, const FolnerSet& m,
                                              const Projection& p_prev, double rho, double lambda,
                                              const NumericPolicy& policy) {
  detail::require_support(alpha, m.elements(), "orthonormalize_orbit");
  if (p_prev.dim() != alpha.dim() || xi.size() != alpha.dim()) {
    throw ExtractionError("orthonormalize_orbit: dimension mismatch");
  }
  const Index d = alpha.dim();
  const std::size_t n = m.size();
  const Matrix orbit = detail::orbit_matrix(alpha, xi, m);
  const Matrix& prev = p_prev.basis();
  const bool has_prev = prev.cols() > 0;

  OrthonormalizationResult r;
  r.rho_requested = rho;
  r.prev_norms.assign(n, 0.0);
  if (has_prev) {
    const Matrix coeff = prev.adjoint() * orbit;
    for (std::size_t i = 0; i < n; ++i) {
      r.prev_norms[i] = std::sqrt(kernels::norm2(column(coeff, static_cast<Index>(i))));
    }
  }
  double total = 0.0;
  for (double x : r.prev_norms) total += x;
  r.rho_measured = n ? total / static_cast<double>(n) : 0.0;
  r.rho_used = rho;
  if (r.rho_measured > rho) {
    r.rho_used = r.rho_measured;
    r.rho_replaced = true;
  }
  const double threshold = std::sqrt(r.rho_used);

  Matrix local(d, static_cast<Index>(n));
  Index t = 0;
  std::vector<Index> zeta_cols;
  r.deviations.assign(n, 2.0);
  std::size_t in_s = 0;
  auto project_out = [&](Vector& v) {
    if (has_prev) v.noalias() -= prev * (prev.adjoint() * v);
    if (t > 0) v.noalias() -= local.leftCols(t) * (local.leftCols(t).adjoint() * v);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const bool member_of_s = r.prev_norms[i] <= threshold;
    in_s += member_of_s;
    Vector v = orbit.col(static_cast<Index>(i));
    project_out(v);
    if (vector_norm(v) < policy.gram_schmidt_floor) {
      r.dropped.push_back(i);
      continue;
    }
    project_out(v);
    v /= vector_norm(v);
    local.col(t) = v;
    r.deviations[i] = std::sqrt(kernels::diff_norm2(view(v), column(orbit, static_cast<Index>(i))));
    if (member_of_s) {
      r.kept.push_back(i);
      zeta_cols.push_back(t);
    } else {
      r.excluded.push_back(i);
    }
    ++t;
  }
  r.orbit_basis = local.leftCols(t);
  r.zetas.resize(d, static_cast<Index>(zeta_cols.size()));
  for (std::size_t k = 0; k < zeta_cols.size(); ++k) r.zetas.col(static_cast<Index>(k)) = local.col(zeta_cols[k]);

  r.s_fraction = n ? static_cast<double>(in_s) / static_cast<double>(n) : 1.0;
  double kept_total = 0.0;
  for (auto i : r.kept) kept_total += r.deviations[i];
  r.deviation_kept = r.kept.empty() ? 0.0 : kept_total / static_cast<double>(r.kept.size());
  double full_total = 0.0;
  for (double x : r.deviations) full_total += x;
  r.deviation_full = n ? full_total / static_cast<double>(n) : 0.0;
  r.deviation_bound = 4.0 * (threshold + detail::mult_or_zero(constant_C(n), lambda));
  if (has_prev && r.zetas.cols() > 0) {
    r.orthogonality_error = (prev.adjoint() * r.zetas).cwiseAbs().maxCoeff();
  }
  return r;
}

OrthonormalFamily build_family(const HyperlinearApproximation& alpha, const VectorHarvest& harvest,
                               const LemmaConfig& cfg) {
  const Index d = alpha.dim();
  OrthonormalFamily fam;
  Matrix span(d, 0);
  std::vector<Matrix> blocks;
  for (std::size_t j = 0; j < harvest.vectors.size(); ++j) {
    const Projection p_prev =
        span.cols() == 0 ? Projection::zero(d) : Projection::from_orthonormal(span, cfg.policy);
    const double rho = j == 0 ? 0.0 : cfg.kappa;
    OrthonormalizationResult step =
        orthonormalize_orbit(alpha, harvest.vectors[j], cfg.m, p_prev, rho, cfg.lambda, cfg.policy);
    fam.xis.push_back(harvest.vectors[j]);
    fam.members.push_back(step.kept);
    fam.offsets.push_back(fam.deviations.size());
    for (auto i : step.kept) fam.deviations.push_back(step.deviations[i]);
    fam.block_deviation.push_back(step.deviation_kept);
    Matrix grown(d, span.cols() + step.orbit_basis.cols());
    grown << span, step.orbit_basis;
    span = std::move(grown);
    blocks.push_back(step.zetas);
    fam.steps.push_back(std::move(step));
  }
  Index k = 0;
  for (const auto& b : blocks) k += b.cols();
  fam.zetas.resize(d, k);
  Index at = 0;
  for (const auto& b : blocks) {
    fam.zetas.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  fam.span_basis = std::move(span);
  fam.gram_error = k > 0 ? unitarity_error(fam.zetas) : 0.0;
  return fam;
}

PartialPermutation build_partial_permutation(const FolnerSet& m, const Element& h,
                                             const std::vector<std::size_t>* restrict_to) {
  const Group& group = m.group();
  group.validate(h);
  PartialPermutation out;
  if (restrict_to) {
    out.base = *restrict_to;
    if (!std::is_sorted(out.base.begin(), out.base.end()) ||
        std::adjacent_find(out.base.begin(), out.base.end()) != out.base.end()) {
      throw ExtractionError("build_partial_permutation: subset must be strictly increasing");
    }
    if (!out.base.empty() && out.base.back() >= m.size()) {
      throw ExtractionError("build_partial_permutation: subset index out of range");
    }
  } else {
    out.base.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out.base[i] = i;
  }
  const std::size_t n = out.base.size();
  std::vector<std::ptrdiff_t> position(m.size(), -1);
  for (std::size_t i = 0; i < n; ++i) position[out.base[i]] = static_cast<std::ptrdiff_t>(i);

  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  out.mapping.assign(n, kUnset);
  std::vector<char> hit(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Element hg = group.multiply(h, m[out.base[i]]);
    if (!m.contains(hg)) continue;
    const std::ptrdiff_t pos = position[m.index_of(hg)];
    if (pos < 0) continue;
    out.mapping[i] = static_cast<std::size_t>(pos);
    hit[static_cast<std::size_t>(pos)] = 1;
  }
  std::size_t next_free = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.mapping[i] != kUnset) continue;
    while (hit[next_free]) ++next_free;
    out.mapping[i] = next_free;
    hit[next_free] = 1;
    ++out.mismatches;
  }
  out.mismatch_fraction = n ? static_cast<double>(out.mismatches) / static_cast<double>(n) : 0.0;
  return out;
}

std::vector<CornerDefect> orbit_corner_defect(const HyperlinearApproximation& alpha,
                                              const OrthonormalFamily& family, const FolnerSet& m,
                                              const ElementSet& l, double eta, double lambda) {
  const Group& group = alpha.group();
  detail::require_support(alpha, l, "orbit_corner_defect");
  detail::require_support(alpha, products(group, l, m.elements()), "orbit_corner_defect");
  const Index d = alpha.dim();
  const Matrix& z = family.zetas;
  const double md = static_cast<double>(family.blocks()) * static_cast<double>(m.size());
  const double stated =
      std::sqrt(md * (eta + 5.0 * detail::mult_or_zero(constant_C(m.size()), lambda)) / double(d));

  std::vector<Matrix> orbits;
  for (const auto& xi : family.xis) orbits.push_back(detail::orbit_matrix(alpha, xi, m));

  std::vector<CornerDefect> out;
  for (const auto& h : l) {
    CornerDefect c;
    c.h = h;
    const Matrix& ah = alpha.at(h);
    if (z.cols() > 0) {
      const Matrix az = ah * z;
      const Matrix outside = az - z * (z.adjoint() * az);
      c.corner = std::sqrt(kernels::norm2(view(outside)) / static_cast<double>(d));
    }
    for (std::size_t j = 0; j < family.blocks(); ++j) {
      detail::OrbitCache cache(alpha, family.xis[j], m, orbits[j]);
      const Matrix moved = ah * orbits[j];
      const auto& members = family.members[j];
      for (std::size_t pos = 0; pos < members.size(); ++pos) {
        const std::size_t gi = members[pos];
        const Vector& v_hg = cache(group.multiply(h, m[gi]));
        Vector rest = v_hg;
        if (z.cols() > 0) rest.noalias() -= z * (z.adjoint() * v_hg);
        c.sum_a += kernels::norm2(view(rest));
        c.sum_b += kernels::diff_norm2(column(moved, static_cast<Index>(gi)), view(v_hg));
        const double dev = family.deviations[family.offsets[j] + pos];
        c.sum_c += dev * dev;
      }
    }
    c.measured_bound = std::sqrt(3.0 * (c.sum_a + c.sum_b + c.sum_c) / static_cast<double>(d));
    c.stated_bound = stated;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sofic
