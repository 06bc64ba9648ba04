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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sofic/approximations.hpp"
#include "sofic/checks.hpp"
#include "sofic/group.hpp"
#include "sofic/linalg.hpp"
#include "sofic/numeric_policy.hpp"

namespace sofic {

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sqrt(n) * (8n)^(2n); +inf once the value leaves double range.
double constant_C(std::size_t n);
/// Natural logarithm of constant_C(n), finite for all n >= 1.
double log_constant_C(std::size_t n);

struct ConditionResult {
  bool holds_I = false;
  bool holds_II = false;
  /// max |<alpha(g)xi, alpha(h)xi>| over distinct g, h in M (0 if |M| = 1).
  double max_I = 0.0;
  /// max |(alpha(gh) - alpha(g)alpha(h)) xi| over all g, h in M.
  double max_II = 0.0;
};

/// Throws ExtractionError if M or M*M is not in the support of alpha.
ConditionResult check_conditions(const HyperlinearApproximation& alpha, const Vector& xi,
                                 const FolnerSet& m, double lambda);

/// How harvest_vectors proposes candidate vectors. `coordinate` draws a
/// standard basis vector with a uniform index; `mixed` alternates coordinate
/// (even attempts) and Haar (odd attempts) proposals.
enum class Proposal { haar, coordinate, mixed };

const char* proposal_name(Proposal p);
Proposal parse_proposal(const std::string& name);

struct LemmaConfig {
  FolnerSet m;
  ElementSet l;
  double lambda = 1e-3;
  double kappa = 0.25;
  double eta = 0.0;
  std::size_t max_sample_attempts = 4000;
  std::uint64_t seed = 0;
  /// Stage label folded into every RNG stream.
  std::uint64_t stage = 0;
  Proposal proposal = Proposal::mixed;
  /// Elements beta must be evaluated on in addition to L and L*L (whichever
  /// of those alpha supports).
  ElementSet beta_support{};
  NumericPolicy policy = kDefaultPolicy;

  /// Uses the measured max invariance defect of M over L as eta.
  static LemmaConfig create(FolnerSet m, ElementSet l, double lambda, double kappa);
  /// Throws ExtractionError on out-of-range parameters or when some h in L
  /// has invariance_defect(M, h) > eta.
  void validate() const;
};

struct VectorHarvest {
  std::vector<Vector> vectors;
  /// Projection onto span{alpha(g) xi_k : g in M}.
  std::vector<Projection> orbit_projections;
  /// q_k = p_1 v ... v p_k.
  std::vector<Projection> cumulative;
  std::vector<double> max_I;
  std::vector<double> max_II;
  /// overlaps[k] = (1/|M|) sum_g |q_{k-1} alpha(g) xi_k| (0 for k = 0).
  std::vector<double> overlaps;
  /// Attempt index that produced each accepted vector.
  std::vector<std::size_t> accepted_attempts;

  std::size_t attempts = 0;
  std::size_t rejected_I = 0;
  std::size_t rejected_overlap = 0;
  std::size_t rejected_II = 0;
  double target_trace = 0.0;
  double final_trace = 0.0;
  bool complete = false;
  std::string reason;

  /// Measured quality of alpha on M against lambda / (8|M|^2); a shortfall
  /// is a warning only.
  double hypothesis_level = 0.0;
  double hypothesis_multiplicativity = 0.0;
  double hypothesis_separation_margin = 0.0;
  std::size_t hypothesis_pairs_checked = 0;
  bool hypothesis_met = false;
  std::vector<std::string> warnings;
};

VectorHarvest harvest_vectors(const HyperlinearApproximation& alpha, const LemmaConfig& cfg);

struct OrthonormalizationResult {
  /// M' as indices into M (canonical order).
  std::vector<std::size_t> kept;
  /// zeta_g for g in M', as columns in the order of `kept`.
  Matrix zetas;
  /// Orthonormal basis of span{(I - p) alpha(g) xi : g in M}: every
  /// non-degenerate residual, in M order.
  Matrix orbit_basis;
  /// Elements whose residual fell below the Gram-Schmidt floor.
  std::vector<std::size_t> dropped;
  /// Elements with |p alpha(g) xi| > sqrt(rho), left out of M'.
  std::vector<std::size_t> excluded;
  std::vector<double> prev_norms;
  /// |zeta_g - alpha(g) xi| per element of M; 2 for dropped elements.
  std::vector<double> deviations;
  double rho_requested = 0.0;
  double rho_measured = 0.0;
  double rho_used = 0.0;
  bool rho_replaced = false;
  /// |S| / |M| where S = {g : |p alpha(g) xi| <= sqrt(rho)}.
  double s_fraction = 1.0;
  /// Mean over M' and over all of M.
  double deviation_kept = 0.0;
  double deviation_full = 0.0;
  /// 4 (sqrt(rho) + C_|M| lambda).
  double deviation_bound = 0.0;
  /// max |<zeta, b>| over zetas and columns b of the basis of p.
  double orthogonality_error = 0.0;
};

OrthonormalizationResult orthonormalize_orbit(const HyperlinearApproximation& alpha,
                                              const Vector& xi, const FolnerSet& m,
                                              const Projection& p_prev, double rho,
                                              double lambda = 0.0,
                                              const NumericPolicy& policy = kDefaultPolicy);

/// Columns are grouped by block j, and within a block follow M_j.
struct OrthonormalFamily {
  std::vector<Vector> xis;
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::size_t> offsets;
  Matrix zetas;
  /// |zeta_{g,j} - alpha(g) xi_j| per column.
  std::vector<double> deviations;
  /// (1/|M_j|) sum_{g in M_j} |zeta_{g,j} - alpha(g) xi_j|.
  std::vector<double> block_deviation;
  std::vector<OrthonormalizationResult> steps;
  /// Orthonormal basis of the whole orbit span (family plus excluded directions).
  Matrix span_basis;
  double gram_error = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(zetas.cols()); }
  std::size_t blocks() const { return members.size(); }
};

/// Runs orthonormalize_orbit on each harvested vector in turn, with p_prev the
/// span of all previous orbits; rho = cfg.kappa for every vector after the
/// first and 0 for the first.
OrthonormalFamily build_family(const HyperlinearApproximation& alpha, const VectorHarvest& harvest,
                               const LemmaConfig& cfg);

struct PartialPermutation {
  /// Base set as indices into M, increasing.
  std::vector<std::size_t> base;
  /// mapping[i] = position in `base` of the image of base[i].
  Permutation mapping;
  std::size_t mismatches = 0;
  double mismatch_fraction = 0.0;
};

/// varsigma(h) on M (or on the subset restrict_to): g -> hg wherever hg stays
/// in the base set, remaining points matched in canonical order.
PartialPermutation build_partial_permutation(const FolnerSet& m, const Element& h,
                                             const std::vector<std::size_t>* restrict_to = nullptr);

struct CornerDefect {
  Element h;
  /// |(I - q) alpha(h) q|_HS
  double corner = 0.0;
  /// The three sums over (g, j) of |(I-q)alpha(hg)xi_j|^2,
  /// |(alpha(h)alpha(g) - alpha(hg))xi_j|^2 and |alpha(g)xi_j - zeta_{g,j}|^2.
  double sum_a = 0.0;
  double sum_b = 0.0;
  double sum_c = 0.0;
  /// sqrt(3/dim * (sum_a + sum_b + sum_c)); always >= corner.
  double measured_bound = 0.0;
  /// sqrt(m|M|(eta + 5 C_|M| lambda) / dim); may be +inf.
  double stated_bound = 0.0;
};

/// q is taken as the projection onto the family's span. Requires alpha on
/// L, M and L*M.
std::vector<CornerDefect> orbit_corner_defect(const HyperlinearApproximation& alpha,
                                              const OrthonormalFamily& family, const FolnerSet& m,
                                              const ElementSet& l, double eta, double lambda);

struct StepMetrics {
  Element h;
  CornerDefect corner;
  /// |p alpha(h) (I - p)|_HS^2, the corner seen from Y.
  double theta = 0.0;
  /// |(beta(h) - alpha(h))(I - p)|_HS^2 on X.
  double beta_defect_sq = 0.0;
  /// Per block: (1/|M_j|) sum |alpha(h) zeta_{g,j} - zeta_{varsigma_j(h)g, j}|.
  std::vector<double> displacement;
  /// Per block: the four-term triangle bound evaluated on measured terms.
  std::vector<double> displacement_bound;
  /// Per block: eta + 2 varpi_j + lambda.
  std::vector<double> displacement_stated;
  /// Per block: Condition II term (1/|M_j|) sum |alpha(h)alpha(g)xi - alpha(hg)xi|.
  std::vector<double> condition_term;
  std::vector<double> mismatch;
  /// ((|M| - |M_j|) + eta |M|) / |M_j|.
  std::vector<double> mismatch_bound;
  /// (1/dim Z) |(gamma(h) - alpha(h)) p|_F^2 and its bounds.
  double gamma_trace = 0.0;
  double gamma_trace_bound = 0.0;
  double gamma_trace_stated = 0.0;
  /// (1/dim Y) |(beta(h) - alpha(h))(I - p)|_F^2 and its bounds.
  double beta_trace = 0.0;
  double beta_trace_bound = 0.0;
  double beta_trace_stated = 0.0;
  /// (1/dim Y) |gamma(h) + 0 - alpha(h)|_F^2 with gamma extended by 0 on Y.
  double gamma_trace_over_y = 0.0;
  /// |gamma(h) + beta(h) - alpha(h)|_HS on X, directly and from the parts.
  double combined_distance = 0.0;
  double combined_from_parts = 0.0;
  double commute_gamma = 0.0;
  double commute_beta = 0.0;
  double beta_unitarity = 0.0;
  /// max |W* (gamma + beta) W - (Pi + beta)| entrywise, W = [zetas, Y basis].
  double gamma_structure = 0.0;
};

struct LemmaOutput {
  bool complete = false;
  std::string failure;
  VectorHarvest harvest;
  OrthonormalFamily family;
  Index dim_x = 0;
  Index dim_y = 0;
  Index dim_z = 0;
  double eta = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  std::size_t m_size = 0;
  /// Orthonormal basis of Y = range(I - p), coordinate-aligned.
  Matrix y_basis;
  /// gamma's underlying sofic approximation on the union of the blocks.
  std::optional<SoficApproximation> gamma_sofic;
  /// beta in coordinates of y_basis.
  std::optional<HyperlinearApproximation> beta;
  std::vector<StepMetrics> per_h;
  std::optional<DefectReport> gamma_defect;
  std::optional<DefectReport> beta_defect;
  CheckList checks;
  std::vector<std::string> warnings;
};

/// One decomposition X = Y + Z. An incomplete harvest yields complete ==
/// false with the partial harvest attached.
LemmaOutput lemma_step(const HyperlinearApproximation& alpha, const LemmaConfig& cfg);

/// gamma(h) as an operator on X: zetas * Pi(h) * zetas*.
Matrix gamma_on_x(const LemmaOutput& out, const Element& h);

}  // namespace sofic
