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

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "sofic/numeric_policy.hpp"
#include "sofic/rng.hpp"

namespace sofic {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::span<const cplx> view(const Matrix& a) {
  return {a.data(), static_cast<std::size_t>(a.size())};
}
inline std::span<const cplx> view(const Vector& a) {
  return {a.data(), static_cast<std::size_t>(a.size())};
}
inline std::span<const cplx> column(const Matrix& a, Index j) {
  return {a.col(j).data(), static_cast<std::size_t>(a.rows())};
}

/// sqrt(trace(a* a) / dim), the normalised Hilbert-Schmidt norm.
double hs_norm(const Matrix& a);
/// hs_norm(a - b) without forming the difference.
double hs_distance(const Matrix& a, const Matrix& b);
double vector_norm(const Vector& x);
/// conj(x) . y
cplx inner(const Vector& x, const Vector& y);

/// Largest |entry| of a* a - I.
double unitarity_error(const Matrix& a);
/// Largest |entry| of a - b.
double max_abs_diff(const Matrix& a, const Matrix& b);
bool is_finite(const Matrix& a);

struct SvdResult {
  Matrix left;
  Eigen::VectorXd singulars;  // nonincreasing
  Matrix right;
};

/// Full SVD a = left * diag(singulars) * right^*. Deterministic for a given
/// input. Throws LinalgError on non-finite input or non-convergence.
SvdResult svd(const Matrix& a);

/// Number of singular values above policy.rank_cutoff * s_max.
Index numerical_rank(const Eigen::VectorXd& singulars, const NumericPolicy& policy = kDefaultPolicy);

/// Orthogonal projection, stored both as a dense matrix and as an orthonormal
/// basis of its range.
class Projection {
 public:
  static Projection zero(Index dim);
  static Projection identity(Index dim);
  /// Projection onto the span of the columns of `vectors` (rank by SVD cutoff).
  static Projection onto_span(const Matrix& vectors, const NumericPolicy& policy = kDefaultPolicy);
  /// Takes ownership of an orthonormal basis (columns). Throws if the columns
  /// are not orthonormal within policy.orthonormal_tol.
  static Projection from_orthonormal(Matrix basis, const NumericPolicy& policy = kDefaultPolicy);

  Index dim() const { return matrix_.rows(); }
  Index rank() const { return basis_.cols(); }
  const Matrix& matrix() const { return matrix_; }
  const Matrix& basis() const { return basis_; }
  double trace() const { return matrix_.trace().real(); }

  Vector apply(const Vector& x) const;
  /// || p x || computed through the basis.
  double apply_norm(const Vector& x) const;
  /// I - p, with a coordinate-aligned basis (see aligned_basis).
  Projection complement(const NumericPolicy& policy = kDefaultPolicy) const;

  /// max(|p - p*|, |p^2 - p|_HS, |trace - rank|) checks, as booleans.
  bool is_hermitian(double tol) const;
  double idempotence_error() const;

 private:
  Projection(Matrix matrix, Matrix basis) : matrix_(std::move(matrix)), basis_(std::move(basis)) {}
  Matrix matrix_;
  Matrix basis_;
};

/// Orthogonal projection onto range(p) + range(q).
Projection projection_join(const Projection& p, const Projection& q,
                           const NumericPolicy& policy = kDefaultPolicy);
/// The closed form p + (I - p) q (I - p); idempotent only in special position.
Matrix projection_join_formula(const Projection& p, const Projection& q);

/// Orthonormal basis of range(p), built by pivoted Gram-Schmidt on the
/// columns of p. When p is a coordinate projection the result is exactly the
/// selected standard basis vectors, in index order.
Matrix aligned_basis(const Matrix& p, Index rank, const NumericPolicy& policy = kDefaultPolicy);

/// Haar-uniform point of the unit sphere (normalised complex Gaussian).
Vector random_unit_vector(Index dim, StreamRng& rng);
/// i.i.d. standard complex Gaussian entries, E|a_ij|^2 = 1.
Matrix random_gaussian(Index rows, Index cols, StreamRng& rng);
/// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
Matrix random_unitary(Index dim, StreamRng& rng);
/// Projection onto the span of `rank` Haar-random orthonormal vectors.
Projection random_projection(Index dim, Index rank, StreamRng& rng);

struct GramSchmidtResult {
  /// Orthonormal outputs as columns, one per kept input.
  Matrix zetas;
  std::vector<std::size_t> kept;
  /// Inputs whose residual fell below the floor.
  std::vector<std::size_t> dropped;
  /// deviations[i] = || zeta_i - xi_i || per input (NaN for dropped inputs).
  std::vector<double> deviations;
  /// proj_norms[i] = || p_i xi_i || where p_i projects onto span(xi_0..xi_{i-1}).
  std::vector<double> proj_norms;
  /// Residual norms t_i before normalisation.
  std::vector<double> residuals;
  double max_pairwise_inner = 0.0;
  bool lambda_respected = true;
};

/// Sequential Gram-Schmidt of near-orthogonal unit vectors. Inputs violating
/// |<xi_j, xi_k>| <= lambda are reported, not rejected.
GramSchmidtResult gram_schmidt_chain(const std::vector<Vector>& xs, double lambda,
                                     const NumericPolicy& policy = kDefaultPolicy);

/// (8n)^(2j) * lambda, the per-index deviation bound for a chain of length n
/// (j is 1-based). Saturates to +inf.
double chain_deviation_bound(std::size_t n, std::size_t j, double lambda);

struct CornerUnitarization {
  Matrix v;
  /// Measured || (I - p) u p ||_HS^2.
  double theta = 0.0;
  /// Measured || (u - v) p ||_HS^2.
  double defect_sq = 0.0;
  Eigen::VectorXd singulars;
};

/// Replaces the compression p u p by the partial isometry obtained from its
/// singular value decomposition with every singular value set to 1.
CornerUnitarization corner_unitarize(const Matrix& u, const Projection& p,
                                     const NumericPolicy& policy = kDefaultPolicy);

/// Same construction expressed in coordinates of an orthonormal basis B of
/// range(p): returns the k x k unitary polar factor of B* u B.
Matrix polar_on_range(const Matrix& u, const Matrix& basis);

}  // namespace sofic
