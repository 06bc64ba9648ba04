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

#include "sofic/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sofic/kernels.hpp"

namespace sofic {

namespace {

std::span<cplx> mutable_view(Vector& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

}  // namespace

double hs_norm(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  return std::sqrt(kernels::norm2(view(a)) / static_cast<double>(a.rows()));
}

double hs_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw LinalgError("hs_distance: shape mismatch");
  }
  if (a.rows() == 0) return 0.0;
  return std::sqrt(kernels::diff_norm2(view(a), view(b)) / static_cast<double>(a.rows()));
}

double vector_norm(const Vector& x) { return std::sqrt(kernels::norm2(view(x))); }

cplx inner(const Vector& x, const Vector& y) { return kernels::dotc(view(x), view(y)); }

double unitarity_error(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Matrix g = a.adjoint() * a;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_finite(const Matrix& a) { return a.allFinite(); }

constexpr double kSvdFactorTol = 1e-10;

SvdResult svd(const Matrix& a) {
  if (!a.allFinite()) throw LinalgError("svd: input has non-finite entries");
  if (a.size() == 0) return {Matrix(a.rows(), a.rows()), Eigen::VectorXd(0), Matrix(a.cols(), a.cols())};
  Eigen::BDCSVD<Matrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() == Eigen::Success) {
    SvdResult r{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    // BDCSVD can return non-unitary or NaN factors on exactly degenerate
    // spectra (partial isometries); Jacobi is slower but reliable there.
    if (r.left.allFinite() && r.right.allFinite() && unitarity_error(r.left) <= kSvdFactorTol &&
        unitarity_error(r.right) <= kSvdFactorTol) {
      return r;
    }
  }
  Eigen::JacobiSVD<Matrix> jacobi(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (jacobi.info() != Eigen::Success) {
    std::ostringstream os;
    os << "svd: decomposition of a " << a.rows() << "x" << a.cols()
       << " matrix did not converge (max |entry| " << a.cwiseAbs().maxCoeff() << ")";
    throw LinalgError(os.str());
  }
  return {jacobi.matrixU(), jacobi.singularValues(), jacobi.matrixV()};
}

Index numerical_rank(const Eigen::VectorXd& s, const NumericPolicy& policy) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  const double cut = policy.rank_cutoff * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return r;
}

Projection Projection::zero(Index dim) { return Projection(Matrix::Zero(dim, dim), Matrix(dim, 0)); }

Projection Projection::identity(Index dim) {
  return Projection(Matrix::Identity(dim, dim), Matrix::Identity(dim, dim));
}

Projection Projection::onto_span(const Matrix& vectors, const NumericPolicy& policy) {
  const Index d = vectors.rows();
  if (vectors.cols() == 0) return zero(d);
  if (!vectors.allFinite()) throw LinalgError("onto_span: non-finite vectors");
  Eigen::BDCSVD<Matrix> solver(vectors, Eigen::ComputeThinU);
  Eigen::VectorXd sv;
  Matrix u;
  if (solver.info() == Eigen::Success && solver.matrixU().allFinite() &&
      unitarity_error(solver.matrixU()) <= kSvdFactorTol) {
    sv = solver.singularValues();
    u = solver.matrixU();
  } else {
    Eigen::JacobiSVD<Matrix> jacobi(vectors, Eigen::ComputeThinU);
    if (jacobi.info() != Eigen::Success) throw LinalgError("onto_span: SVD did not converge");
    sv = jacobi.singularValues();
    u = jacobi.matrixU();
  }
  const Index r = numerical_rank(sv, policy);
  Matrix basis = u.leftCols(r);
  Matrix m = basis * basis.adjoint();
  return Projection(std::move(m), std::move(basis));
}

Projection Projection::from_orthonormal(Matrix basis, const NumericPolicy& policy) {
  if (basis.cols() > 0 && unitarity_error(basis) > policy.orthonormal_tol) {
    throw LinalgError("from_orthonormal: columns are not orthonormal");
  }
  Matrix m = basis * basis.adjoint();
  return Projection(std::move(m), std::move(basis));
}

Vector Projection::apply(const Vector& x) const {
  if (rank() == 0) return Vector::Zero(dim());
  return basis_ * (basis_.adjoint() * x);
}

double Projection::apply_norm(const Vector& x) const {
  if (rank() == 0) return 0.0;
  Vector c = basis_.adjoint() * x;
  return vector_norm(c);
}

Projection Projection::complement(const NumericPolicy& policy) const {
  const Index d = dim();
  Matrix m = Matrix::Identity(d, d) - matrix_;
  Matrix basis = aligned_basis(m, d - rank(), policy);
  Matrix proj = basis * basis.adjoint();
  return Projection(std::move(proj), std::move(basis));
}

bool Projection::is_hermitian(double tol) const {
  if (matrix_.size() == 0) return true;
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double Projection::idempotence_error() const {
  if (matrix_.size() == 0) return 0.0;
  return hs_distance(matrix_ * matrix_, matrix_);
}

Projection projection_join(const Projection& p, const Projection& q, const NumericPolicy& policy) {
  if (p.dim() != q.dim()) throw LinalgError("projection_join: dimension mismatch");
  if (q.rank() == 0) return p;
  if (p.rank() == 0) return q;
  Matrix stacked(p.dim(), p.rank() + q.rank());
  stacked << p.basis(), q.basis();
  return Projection::onto_span(stacked, policy);
}

Matrix projection_join_formula(const Projection& p, const Projection& q) {
  if (p.dim() != q.dim()) throw LinalgError("projection_join_formula: dimension mismatch");
  const Matrix rest = Matrix::Identity(p.dim(), p.dim()) - p.matrix();
  return p.matrix() + rest * q.matrix() * rest;
}

Matrix aligned_basis(const Matrix& p, Index rank, const NumericPolicy& policy) {
  const Index d = p.rows();
  Matrix basis(d, rank);
  if (rank == 0) return basis;
  Matrix residual = p;
  Eigen::VectorXd col_norm2(d);
  for (Index j = 0; j < d; ++j) col_norm2(j) = kernels::norm2(column(residual, j));
  for (Index k = 0; k < rank; ++k) {
    Index pivot = 0;
    col_norm2.maxCoeff(&pivot);  // first maximal index on ties
    if (col_norm2(pivot) <= policy.gram_schmidt_floor * policy.gram_schmidt_floor) {
      throw LinalgError("aligned_basis: projection has smaller rank than requested");
    }
    Vector q = residual.col(pivot);
    // Re-orthogonalise against the basis built so far.
    if (k > 0) q -= basis.leftCols(k) * (basis.leftCols(k).adjoint() * q);
    q /= vector_norm(q);
    basis.col(k) = q;
    Eigen::RowVectorXcd coeff = q.adjoint() * residual;
    residual.noalias() -= q * coeff;
    for (Index j = 0; j < d; ++j) col_norm2(j) = kernels::norm2(column(residual, j));
  }
  return basis;
}

Vector random_unit_vector(Index dim, StreamRng& rng) {
  if (dim < 1) throw LinalgError("random_unit_vector: dim must be positive");
  Vector x(dim);
  double n2 = 0.0;
  do {
    for (Index i = 0; i < dim; ++i) x(i) = cplx(rng.standard_normal(), rng.standard_normal());
    n2 = kernels::norm2(view(x));
  } while (n2 == 0.0);
  kernels::scale(1.0 / std::sqrt(n2), mutable_view(x));
  return x;
}

Matrix random_gaussian(Index rows, Index cols, StreamRng& rng) {
  Matrix a(rows, cols);
  const double s = std::sqrt(0.5);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) a(i, j) = cplx(s * rng.standard_normal(), s * rng.standard_normal());
  }
  return a;
}

Matrix random_unitary(Index dim, StreamRng& rng) {
  Matrix z = random_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    const cplx rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= a > 0.0 ? rjj / a : cplx(1.0, 0.0);
  }
  return q;
}

Projection random_projection(Index dim, Index rank, StreamRng& rng) {
  if (rank < 0 || rank > dim) throw LinalgError("random_projection: rank out of range");
  Matrix u = random_unitary(dim, rng);
  return Projection::from_orthonormal(u.leftCols(rank));
}

GramSchmidtResult gram_schmidt_chain(const std::vector<Vector>& xs, double lambda,
                                     const NumericPolicy& policy) {
  GramSchmidtResult out;
  const std::size_t n = xs.size();
  if (n == 0) return out;
  const Index d = xs.front().size();
  for (const auto& x : xs) {
    if (x.size() != d) throw LinalgError("gram_schmidt_chain: inputs differ in dimension");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.max_pairwise_inner = std::max(out.max_pairwise_inner, std::abs(inner(xs[i], xs[j])));
    }
  }
  out.lambda_respected = out.max_pairwise_inner <= lambda;

  Matrix zetas(d, static_cast<Index>(n));
  Index count = 0;
  out.deviations.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.proj_norms.assign(n, 0.0);
  out.residuals.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector& x = xs[i];
    Vector r = x;
    double proj2 = 0.0;
    for (Index k = 0; k < count; ++k) {
      const cplx c = kernels::dotc(column(zetas, k), view(x));
      proj2 += std::norm(c);
      kernels::axpy(-c, column(zetas, k), mutable_view(r));
    }
    out.proj_norms[i] = std::sqrt(proj2);
    const double t = vector_norm(r);
    out.residuals[i] = t;
    if (t < policy.gram_schmidt_floor) {
      out.dropped.push_back(i);
      continue;
    }
    // Second pass restores orthogonality lost to cancellation.
    for (Index k = 0; k < count; ++k) {
      const cplx c = kernels::dotc(column(zetas, k), view(r));
      kernels::axpy(-c, column(zetas, k), mutable_view(r));
    }
    r /= vector_norm(r);
    zetas.col(count) = r;
    out.deviations[i] = std::sqrt(kernels::diff_norm2(view(r), view(x)));
    out.kept.push_back(i);
    ++count;
  }
  out.zetas = zetas.leftCols(count);
  return out;
}

double chain_deviation_bound(std::size_t n, std::size_t j, double lambda) {
  const double base = 8.0 * static_cast<double>(n);
  const double v = std::pow(base, 2.0 * static_cast<double>(j)) * lambda;
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

Matrix polar_on_range(const Matrix& u, const Matrix& basis) {
  const Index k = basis.cols();
  if (k == 0) return Matrix(0, 0);
  Matrix w = basis.adjoint() * u * basis;
  SvdResult s = svd(w);
  return s.left * s.right.adjoint();
}

CornerUnitarization corner_unitarize(const Matrix& u, const Projection& p, const NumericPolicy&) {
  const Index d = u.rows();
  if (u.cols() != d || p.dim() != d) throw LinalgError("corner_unitarize: dimension mismatch");
  CornerUnitarization out;
  const Index k = p.rank();
  if (k == 0) {
    out.v = Matrix::Zero(d, d);
    return out;
  }
  const Matrix& b = p.basis();
  Matrix ub = u * b;
  Matrix w = b.adjoint() * ub;
  Matrix corner = ub - b * w;
  out.theta = kernels::norm2(view(corner)) / static_cast<double>(d);
  SvdResult s = svd(w);
  Matrix vr = s.left * s.right.adjoint();
  out.singulars = s.singulars;
  Matrix bv = b * vr;
  out.v = bv * b.adjoint();
  out.defect_sq = kernels::diff_norm2(view(ub), view(bv)) / static_cast<double>(d);
  return out;
}

}  // namespace sofic
