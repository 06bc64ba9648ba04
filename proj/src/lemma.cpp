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
#include <sstream>

#include "detail.hpp"
#include "sofic/extraction.hpp"
#include "sofic/kernels.hpp"

namespace sofic {

namespace {

std::string idx(std::size_t i) { return "[" + std::to_string(i) + "]"; }

Matrix off_block_commutator(const Matrix& z, const Matrix& op) {
  // p op - op p with p = z z*, without forming p.
  return z * (z.adjoint() * op) - (op * z) * z.adjoint();
}

void record_harvest_checks(const LemmaOutput& out, const LemmaConfig& cfg, CheckList& checks) {
  const auto& hv = out.harvest;
  for (std::size_t k = 0; k < hv.vectors.size(); ++k) {
    const std::string base = "harvest.vector" + idx(k);
    checks.le(base + ".condition_I", hv.max_I[k], cfg.lambda);
    checks.le(base + ".condition_II", hv.max_II[k], cfg.lambda);
    checks.le(base + ".overlap", hv.overlaps[k], cfg.kappa);
  }
  checks.ge("harvest.trace_exceeds_target", hv.final_trace, hv.target_trace, true, 0.0,
            "termination requires trace strictly above kappa/2 * dim");
  checks.le("harvest.hypothesis_multiplicativity", hv.hypothesis_multiplicativity,
            hv.hypothesis_level, false);
  checks.le("harvest.hypothesis_separation_margin", hv.hypothesis_separation_margin,
            hv.hypothesis_level, false);
}

}  // namespace

Matrix gamma_on_x(const LemmaOutput& out, const Element& h) {
  if (!out.gamma_sofic) throw ExtractionError("gamma_on_x: lemma step is incomplete");
  const Permutation& perm = out.gamma_sofic->at(h);
  const Matrix& z = out.family.zetas;
  Matrix moved(z.rows(), z.cols());
  for (Index x = 0; x < z.cols(); ++x) moved.col(x) = z.col(static_cast<Index>(perm[x]));
  return moved * z.adjoint();
}

LemmaOutput lemma_step(const HyperlinearApproximation& alpha, const LemmaConfig& cfg) {
  cfg.validate();
  const Group& group = alpha.group();
  const FolnerSet& m = cfg.m;
  const ElementSet& l = cfg.l;
  const NumericPolicy& pol = cfg.policy;
  const Index d = alpha.dim();
  detail::require_support(alpha, l, "lemma_step");
  detail::require_support(alpha, products(group, l, m.elements()), "lemma_step");
  detail::require_support(alpha, cfg.beta_support, "lemma_step");

  LemmaOutput out;
  out.dim_x = d;
  out.eta = cfg.eta;
  out.lambda = cfg.lambda;
  out.kappa = cfg.kappa;
  out.m_size = m.size();
  out.harvest = harvest_vectors(alpha, cfg);
  out.warnings = out.harvest.warnings;
  record_harvest_checks(out, cfg, out.checks);
  if (!out.harvest.complete) {
    out.failure = "harvest incomplete: " + out.harvest.reason;
    return out;
  }

  const double c_m = constant_C(m.size());
  const double c_lambda = detail::mult_or_zero(c_m, cfg.lambda);

  // Orthonormal family and the decomposition X = Y + Z.
  out.family = build_family(alpha, out.harvest, cfg);
  const OrthonormalFamily& fam = out.family;
  const Matrix& z = fam.zetas;
  const Index k = z.cols();
  const Projection p = k == 0 ? Projection::zero(d) : Projection::from_orthonormal(z, pol);
  out.y_basis = p.complement(pol).basis();
  const Matrix& yb = out.y_basis;
  out.dim_z = k;
  out.dim_y = yb.cols();

  CheckList& ck = out.checks;
  ck.ge("dim_z", static_cast<double>(k), 0.5 * cfg.kappa * static_cast<double>(d));
  ck.le("family.gram_error", fam.gram_error, pol.family_orthonormal_tol);
  const double q_rank = static_cast<double>(out.harvest.cumulative.back().rank());
  ck.le("family.orbit_span_rank_gap", std::abs(static_cast<double>(fam.span_basis.cols()) - q_rank),
        0.5, true, 0.0, "family plus excluded directions span the range of q_m");
  ck.le("family.dim_vs_trace_gap", std::abs(static_cast<double>(k) - out.harvest.final_trace), 0.5,
        false, 0.0, "differs when orbit vectors are excluded from M_j");
  for (std::size_t j = 0; j < fam.blocks(); ++j) {
    const auto& st = fam.steps[j];
    const std::string base = "family.block" + idx(j);
    ck.ge(base + ".s_fraction", st.s_fraction, 1.0 - std::sqrt(st.rho_used), true, pol.inequality_slack);
    ck.ge(base + ".size_fraction", static_cast<double>(st.kept.size()) / double(m.size()),
          1.0 - cfg.kappa, false);
    ck.le(base + ".deviation", st.deviation_full, st.deviation_bound, true, pol.inequality_slack);
    ck.le(base + ".orthogonality", st.orthogonality_error, pol.family_orthonormal_tol);
    if (st.rho_replaced) {
      std::ostringstream os;
      os << "block " << j << ": measured overlap " << st.rho_measured << " exceeds rho "
         << st.rho_requested << "; using the measured value";
      out.warnings.push_back(os.str());
    }
  }

  // gamma: block permutations on the union of the M_j.
  const ElementSet gamma_support = set_union(l, products(group, l, l));
  std::map<Element, Permutation> perms;
  std::map<Element, std::vector<PartialPermutation>> partials;
  for (const auto& h : gamma_support) {
    Permutation perm(static_cast<std::size_t>(k));
    std::vector<PartialPermutation> blocks;
    for (std::size_t j = 0; j < fam.blocks(); ++j) {
      PartialPermutation pp = build_partial_permutation(m, h, &fam.members[j]);
      const std::size_t off = fam.offsets[j];
      for (std::size_t i = 0; i < pp.mapping.size(); ++i) perm[off + i] = off + pp.mapping[i];
      blocks.push_back(std::move(pp));
    }
    perms.emplace(h, std::move(perm));
    partials.emplace(h, std::move(blocks));
  }
  out.gamma_sofic.emplace(group, static_cast<std::size_t>(k), std::move(perms));

  // beta: unitary polar factor of the compression to Y.
  ElementSet beta_support = cfg.beta_support;
  for (const auto& h : gamma_support) {
    if (alpha.supports(h)) beta_support.push_back(h);
  }
  beta_support = make_set(std::move(beta_support));
  std::map<Element, Matrix> betas;
  for (const auto& h : beta_support) betas.emplace(h, polar_on_range(alpha.at(h), yb));
  out.beta.emplace(group, out.dim_y, std::move(betas), pol);

  // Per-h metrics.
  const std::vector<CornerDefect> corners = orbit_corner_defect(alpha, fam, m, l, cfg.eta, cfg.lambda);
  std::vector<Matrix> orbits;
  for (const auto& xi : fam.xis) orbits.push_back(detail::orbit_matrix(alpha, xi, m));
  Matrix w(d, d);
  w << z, yb;
  const double dz = static_cast<double>(k);
  const double dy = static_cast<double>(out.dim_y);

  for (std::size_t t = 0; t < l.size(); ++t) {
    const Element& h = l[t];
    const std::string base = "h=" + group.format(h);
    StepMetrics sm;
    sm.h = h;
    sm.corner = corners[t];
    const Matrix& ah = alpha.at(h);
    const Matrix& bh = out.beta->at(h);
    const Permutation& perm = out.gamma_sofic->at(h);

    const Matrix az = ah * z;
    Matrix z_moved(d, k);
    for (Index x = 0; x < k; ++x) z_moved.col(x) = z.col(static_cast<Index>(perm[x]));
    std::vector<double> disp(static_cast<std::size_t>(k));
    double gamma_f2 = 0.0, disp_total = 0.0;
    for (Index x = 0; x < k; ++x) {
      const double v = kernels::diff_norm2(column(az, x), column(z_moved, x));
      gamma_f2 += v;
      disp[x] = std::sqrt(v);
      disp_total += disp[x];
    }
    const Matrix ay = ah * yb;
    const Matrix yb_beta = yb * bh;
    const double beta_f2 = out.dim_y ? kernels::diff_norm2(view(yb_beta), view(ay)) : 0.0;
    const Matrix corner_y = z.adjoint() * ay;
    sm.theta = kernels::norm2(view(corner_y)) / static_cast<double>(d);
    sm.beta_defect_sq = beta_f2 / static_cast<double>(d);

    for (std::size_t j = 0; j < fam.blocks(); ++j) {
      const auto& members = fam.members[j];
      const auto& pp = partials.at(h)[j];
      const std::size_t off = fam.offsets[j];
      const double nj = static_cast<double>(members.size());
      detail::OrbitCache cache(alpha, fam.xis[j], m, orbits[j]);
      const Matrix moved = ah * orbits[j];
      double sa = 0.0, sb = 0.0, sc = 0.0, sd = 0.0, sdisp = 0.0;
      for (std::size_t i = 0; i < members.size(); ++i) {
        const std::size_t gi = members[i];
        const std::size_t target = members[pp.mapping[i]];
        const Vector& v_hg = cache(group.multiply(h, m[gi]));
        sa += fam.deviations[off + i];
        sb += std::sqrt(kernels::diff_norm2(column(moved, static_cast<Index>(gi)), view(v_hg)));
        sc += std::sqrt(kernels::diff_norm2(view(v_hg), column(orbits[j], static_cast<Index>(target))));
        sd += fam.deviations[off + pp.mapping[i]];
        sdisp += disp[off + i];
      }
      const double inv = members.empty() ? 0.0 : 1.0 / nj;
      sm.displacement.push_back(sdisp * inv);
      sm.displacement_bound.push_back((sa + sb + sc + sd) * inv);
      sm.displacement_stated.push_back(cfg.eta + 2.0 * fam.block_deviation[j] + cfg.lambda);
      sm.condition_term.push_back(sb * inv);
      sm.mismatch.push_back(pp.mismatch_fraction);
      const double msize = static_cast<double>(m.size());
      sm.mismatch_bound.push_back(members.empty() ? 0.0
                                                  : ((msize - nj) + cfg.eta * msize) / nj);
    }
    sm.gamma_trace = k ? gamma_f2 / dz : 0.0;
    sm.gamma_trace_bound = k ? 2.0 * disp_total / dz : 0.0;
    sm.gamma_trace_stated = 2.0 * cfg.eta + 4.0 * cfg.kappa + 5.0 * c_lambda;
    sm.beta_trace = out.dim_y ? beta_f2 / dy : 0.0;
    sm.beta_trace_bound = out.dim_y ? 4.0 * sm.theta * static_cast<double>(d) / dy : 0.0;
    sm.beta_trace_stated = 16.0 * (cfg.eta + 5.0 * c_lambda);
    sm.gamma_trace_over_y = out.dim_y ? (gamma_f2 + kernels::norm2(view(ay))) / dy : 0.0;

    // Assemble gamma + beta on X and compare with the block formula.
    const Matrix gamma_x = z_moved * z.adjoint();
    const Matrix beta_x = yb_beta * yb.adjoint();
    const Matrix omega = gamma_x + beta_x;
    sm.combined_distance = hs_distance(ah, omega);
    sm.combined_from_parts = std::sqrt((gamma_f2 + beta_f2) / static_cast<double>(d));
    sm.commute_gamma = k ? off_block_commutator(z, gamma_x).cwiseAbs().maxCoeff() : 0.0;
    sm.commute_beta = k && out.dim_y ? off_block_commutator(z, beta_x).cwiseAbs().maxCoeff() : 0.0;
    sm.beta_unitarity = out.dim_y ? unitarity_error(bh) : 0.0;
    Matrix expected = Matrix::Zero(d, d);
    expected.topLeftCorner(k, k) = permutation_matrix(perm);
    expected.bottomRightCorner(out.dim_y, out.dim_y) = bh;
    sm.gamma_structure = max_abs_diff(w.adjoint() * omega * w, expected);

    // Recorded inequalities.
    const double tiny = pol.inequality_slack;
    ck.le(base + ".corner", sm.corner.corner, sm.corner.measured_bound, true, tiny);
    ck.le(base + ".corner_stated", sm.corner.corner, sm.corner.stated_bound, false);
    ck.le(base + ".beta_corner_unitarize", sm.beta_defect_sq, 4.0 * sm.theta, true, pol.commute_tol);
    for (std::size_t j = 0; j < fam.blocks(); ++j) {
      const std::string b = base + ".block" + idx(j);
      ck.le(b + ".displacement", sm.displacement[j], sm.displacement_bound[j], true, tiny);
      ck.le(b + ".displacement_stated", sm.displacement[j], sm.displacement_stated[j], false);
      ck.le(b + ".condition_II_term", sm.condition_term[j], cfg.lambda, m.contains(h), tiny,
            m.contains(h) ? "" : "h outside M");
      ck.le(b + ".mismatch", sm.mismatch[j], sm.mismatch_bound[j], true, tiny);
      ck.le(b + ".mismatch_stated", sm.mismatch[j], cfg.kappa + cfg.eta, false);
    }
    ck.le(base + ".gamma_trace", sm.gamma_trace, sm.gamma_trace_bound, true, tiny);
    ck.le(base + ".gamma_trace_stated", sm.gamma_trace, sm.gamma_trace_stated, false);
    if (out.dim_y) {
      ck.le(base + ".beta_trace", sm.beta_trace, sm.beta_trace_bound, true, pol.commute_tol);
      ck.le(base + ".beta_trace_stated", sm.beta_trace, sm.beta_trace_stated, false);
    } else {
      ck.skip(base + ".beta_trace", "Y is zero-dimensional");
    }
    ck.le(base + ".gamma_trace_over_y", sm.gamma_trace_over_y, sm.beta_trace_stated, false,
          0.0, "trace bound as printed with gamma in place of beta");
    ck.le(base + ".combined_split", std::abs(sm.combined_distance - sm.combined_from_parts),
          pol.unitary_tol);
    ck.le(base + ".commute_gamma", sm.commute_gamma, pol.commute_tol);
    ck.le(base + ".commute_beta", sm.commute_beta, pol.commute_tol);
    ck.le(base + ".beta_unitary", sm.beta_unitarity, pol.commute_tol);
    ck.le(base + ".gamma_permutes_basis", sm.gamma_structure, pol.permutation_entry_tol);
    out.per_h.push_back(std::move(sm));
  }

  out.gamma_defect = sofic_defect(*out.gamma_sofic, l);
  ck.le("gamma.multiplicativity", out.gamma_defect->worst_multiplicativity, cfg.kappa + cfg.eta,
        false);
  if (out.beta->supports_all(l)) {
    out.beta_defect = hyperlinear_defect(*out.beta, l);
    ck.le("beta.quality", out.beta_defect->epsilon(),
          4.0 * std::sqrt(cfg.eta + 5.0 * c_lambda), false);
  }
  out.complete = true;
  return out;
}

}  // namespace sofic
