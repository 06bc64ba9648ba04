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

#include "sofic/approximations.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sofic/kernels.hpp"
#include "sofic/rng.hpp"

namespace sofic {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6E6F697365ULL;
constexpr std::uint64_t kConjugateStream = 0x636F6E6AULL;

std::string outside_support(const Group& group, const Element& g) {
  return "element " + group.format(g) + " is outside the support";
}

std::int64_t mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

template <typename Map>
ElementSet keys_of(const Map& m) {
  ElementSet out;
  out.reserve(m.size());
  for (const auto& [g, _] : m) out.push_back(g);
  return out;
}

void summarise(DefectReport& r) {
  double total = 0.0;
  for (const auto& pv : r.multiplicativity) {
    r.worst_multiplicativity = std::max(r.worst_multiplicativity, pv.value);
    total += pv.value;
  }
  if (!r.multiplicativity.empty()) r.mean_multiplicativity = total / r.multiplicativity.size();
  total = 0.0;
  for (std::size_t i = 0; i < r.separation_margin.size(); ++i) {
    const double m = r.separation_margin[i];
    r.worst_margin = i == 0 ? m : std::max(r.worst_margin, m);
    total += m;
  }
  if (!r.separation_margin.empty()) r.mean_margin = total / r.separation_margin.size();
}

}  // namespace

bool is_bijection(const Permutation& perm, std::size_t n) {
  if (perm.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (auto v : perm) {
    if (v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation out(b.size());
  for (std::size_t v = 0; v < b.size(); ++v) out[v] = a[b[v]];
  return out;
}

Permutation invert(const Permutation& perm) {
  Permutation out(perm.size());
  for (std::size_t v = 0; v < perm.size(); ++v) out[perm[v]] = v;
  return out;
}

Permutation identity_permutation(std::size_t n) {
  Permutation out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

SoficApproximation::SoficApproximation(Group group, std::size_t index_size,
                                       std::map<Element, Permutation> perms)
    : group_(std::move(group)), n_(index_size), perms_(std::move(perms)) {
  for (const auto& [g, p] : perms_) {
    group_.validate(g);
    if (!is_bijection(p, n_)) {
      throw ApproximationError("permutation for " + group_.format(g) + " is not a bijection of " +
                               std::to_string(n_) + " points");
    }
  }
}

ElementSet SoficApproximation::support() const { return keys_of(perms_); }

const Permutation& SoficApproximation::at(const Element& g) const {
  auto it = perms_.find(g);
  if (it == perms_.end()) throw ApproximationError(outside_support(group_, g));
  return it->second;
}

HyperlinearApproximation::HyperlinearApproximation(Group group, Index dim,
                                                   std::map<Element, Matrix> unitaries,
                                                   const NumericPolicy& policy)
    : group_(std::move(group)), dim_(dim), unitaries_(std::move(unitaries)) {
  for (const auto& [g, u] : unitaries_) {
    group_.validate(g);
    if (u.rows() != dim_ || u.cols() != dim_) {
      throw ApproximationError("matrix for " + group_.format(g) + " has the wrong shape");
    }
    const double err = unitarity_error(u);
    if (!(err <= policy.unitary_tol)) {
      std::ostringstream os;
      os << "matrix for " << group_.format(g) << " is not unitary (error " << err << ")";
      throw ApproximationError(os.str());
    }
  }
}

ElementSet HyperlinearApproximation::support() const { return keys_of(unitaries_); }

bool HyperlinearApproximation::supports_all(const ElementSet& set) const {
  return std::all_of(set.begin(), set.end(), [&](const Element& g) { return supports(g); });
}

const Matrix& HyperlinearApproximation::at(const Element& g) const {
  auto it = unitaries_.find(g);
  if (it == unitaries_.end()) throw ApproximationError(outside_support(group_, g));
  return it->second;
}

double DefectReport::epsilon() const { return std::max(worst_multiplicativity, worst_margin); }

DefectReport sofic_defect(const SoficApproximation& sigma, const ElementSet& test) {
  const Group& group = sigma.group();
  const std::size_t n = sigma.index_size();
  DefectReport r;
  r.test_set = test;
  for (const auto& g : test) {
    const Permutation& pg = sigma.at(g);
    for (const auto& h : test) {
      const Permutation& ph = sigma.at(h);
      const Element gh = group.multiply(g, h);
      if (!sigma.supports(gh)) {
        r.gaps.push_back({g, h, 0.0});
        continue;
      }
      const Permutation& pgh = sigma.at(gh);
      std::size_t bad = 0;
      for (std::size_t v = 0; v < n; ++v) bad += pg[ph[v]] != pgh[v];
      r.multiplicativity.push_back({g, h, n ? double(bad) / n : 0.0});
    }
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (std::size_t j = i + 1; j < test.size(); ++j) {
      const Permutation& a = sigma.at(test[i]);
      const Permutation& b = sigma.at(test[j]);
      std::size_t differ = 0;
      for (std::size_t v = 0; v < n; ++v) differ += a[v] != b[v];
      const double frac = n ? double(differ) / n : 0.0;
      r.separation.push_back({test[i], test[j], frac});
      r.separation_margin.push_back(1.0 - frac);
    }
  }
  summarise(r);
  return r;
}

DefectReport hyperlinear_defect(const HyperlinearApproximation& alpha, const ElementSet& test) {
  const Group& group = alpha.group();
  DefectReport r;
  r.test_set = test;
  for (const auto& g : test) {
    const Matrix& ag = alpha.at(g);
    for (const auto& h : test) {
      const Matrix& ah = alpha.at(h);
      const Element gh = group.multiply(g, h);
      if (!alpha.supports(gh)) {
        r.gaps.push_back({g, h, 0.0});
        continue;
      }
      Matrix prod = ag * ah;
      r.multiplicativity.push_back({g, h, hs_distance(alpha.at(gh), prod)});
    }
  }
  const double root2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (std::size_t j = i + 1; j < test.size(); ++j) {
      const double dist = hs_distance(alpha.at(test[i]), alpha.at(test[j]));
      r.separation.push_back({test[i], test[j], dist});
      r.separation_margin.push_back(root2 - dist);
    }
  }
  summarise(r);
  return r;
}

Matrix permutation_matrix(const Permutation& perm) {
  const Index n = static_cast<Index>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (Index v = 0; v < n; ++v) p(static_cast<Index>(perm[v]), v) = 1.0;
  return p;
}

HyperlinearApproximation induced_hyperlinear(const SoficApproximation& sigma) {
  std::map<Element, Matrix> mats;
  for (const auto& [g, perm] : sigma.perms()) mats.emplace(g, permutation_matrix(perm));
  return HyperlinearApproximation(sigma.group(), static_cast<Index>(sigma.index_size()),
                                  std::move(mats));
}

std::vector<double> hs_distances(const HyperlinearApproximation& alpha,
                                 const HyperlinearApproximation& beta, const ElementSet& test) {
  if (alpha.dim() != beta.dim()) throw ApproximationError("hs_distances: dimension mismatch");
  std::vector<double> out;
  out.reserve(test.size());
  for (const auto& g : test) out.push_back(hs_distance(alpha.at(g), beta.at(g)));
  return out;
}

HyperlinearApproximation direct_sum(const HyperlinearApproximation& a,
                                    const HyperlinearApproximation& b,
                                    std::vector<Element>* dropped) {
  if (!(a.group() == b.group())) throw ApproximationError("direct_sum: groups differ");
  const Index d1 = a.dim(), d2 = b.dim();
  std::map<Element, Matrix> mats;
  for (const auto& [g, u] : a.unitaries()) {
    if (!b.supports(g)) {
      if (dropped) dropped->push_back(g);
      continue;
    }
    Matrix m = Matrix::Zero(d1 + d2, d1 + d2);
    m.topLeftCorner(d1, d1) = u;
    m.bottomRightCorner(d2, d2) = b.at(g);
    mats.emplace(g, std::move(m));
  }
  if (dropped) {
    for (const auto& [g, _] : b.unitaries()) {
      if (!a.supports(g)) dropped->push_back(g);
    }
  }
  return HyperlinearApproximation(a.group(), d1 + d2, std::move(mats));
}

SoficApproximation disjoint_union(const SoficApproximation& a, const SoficApproximation& b,
                                  std::vector<Element>* dropped) {
  if (!(a.group() == b.group())) throw ApproximationError("disjoint_union: groups differ");
  const std::size_t n1 = a.index_size(), n2 = b.index_size();
  std::map<Element, Permutation> perms;
  for (const auto& [g, p] : a.perms()) {
    if (!b.supports(g)) {
      if (dropped) dropped->push_back(g);
      continue;
    }
    Permutation joined(n1 + n2);
    std::copy(p.begin(), p.end(), joined.begin());
    const Permutation& q = b.at(g);
    for (std::size_t v = 0; v < n2; ++v) joined[n1 + v] = n1 + q[v];
    perms.emplace(g, std::move(joined));
  }
  if (dropped) {
    for (const auto& [g, _] : b.perms()) {
      if (!a.supports(g)) dropped->push_back(g);
    }
  }
  return SoficApproximation(a.group(), n1 + n2, std::move(perms));
}

HyperlinearApproximation from_sofic_with_noise(const SoficApproximation& sigma, double noise,
                                               std::uint64_t seed) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw ApproximationError("noise level must be a finite nonnegative number");
  }
  if (noise == 0.0) return induced_hyperlinear(sigma);
  const Index d = static_cast<Index>(sigma.index_size());
  std::map<Element, Matrix> mats;
  std::uint64_t idx = 0;
  for (const auto& [g, perm] : sigma.perms()) {
    StreamRng rng(seed, StreamRng::stream_id({kNoiseStream, idx++}));
    Matrix a = random_gaussian(d, d, rng);
    Matrix h = (a + a.adjoint()) * 0.5;
    h /= hs_norm(h);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    if (eig.info() != Eigen::Success) throw LinalgError("noise generator: eigensolver failed");
    Eigen::VectorXcd phases(d);
    for (Index k = 0; k < d; ++k) phases(k) = std::polar(1.0, noise * eig.eigenvalues()(k));
    const Matrix& v = eig.eigenvectors();
    Matrix e = v * phases.asDiagonal() * v.adjoint();
    mats.emplace(g, e * permutation_matrix(perm));
  }
  return HyperlinearApproximation(sigma.group(), d, std::move(mats));
}

HyperlinearApproximation random_conjugated(const HyperlinearApproximation& alpha,
                                           std::uint64_t seed) {
  StreamRng rng(seed, StreamRng::stream_id({kConjugateStream}));
  const Matrix w = random_unitary(alpha.dim(), rng);
  std::map<Element, Matrix> mats;
  for (const auto& [g, u] : alpha.unitaries()) mats.emplace(g, w * u * w.adjoint());
  return HyperlinearApproximation(alpha.group(), alpha.dim(), std::move(mats));
}

std::size_t genuine_action_points(const Group& group, std::int64_t size) {
  if (size < 1) throw ApproximationError("action size must be positive");
  switch (group.family()) {
    case Family::integer_lattice: {
      double pts = std::pow(double(size), double(group.parameter()));
      if (pts > 1e8) throw ApproximationError("action has too many points");
      return static_cast<std::size_t>(pts);
    }
    case Family::finite_cyclic:
    case Family::finite_symmetric:
      return static_cast<std::size_t>(size * group.order());
    case Family::heisenberg:
      if (size > 400) throw ApproximationError("action has too many points");
      return static_cast<std::size_t>(size * size * size);
  }
  return 0;
}

SoficApproximation genuine_action(const Group& group, std::int64_t size, const ElementSet& support) {
  const std::size_t n = genuine_action_points(group, size);
  std::map<Element, Permutation> perms;
  switch (group.family()) {
    case Family::integer_lattice: {
      const auto rank = static_cast<std::size_t>(group.parameter());
      for (const auto& g : support) {
        group.validate(g);
        Permutation p(n);
        std::vector<std::int64_t> digits(rank);
        for (std::size_t v = 0; v < n; ++v) {
          std::size_t rest = v, image = 0, place = 1;
          for (std::size_t i = 0; i < rank; ++i) {
            const auto c = static_cast<std::int64_t>(rest % size);
            rest /= size;
            image += static_cast<std::size_t>(mod(c + g.coords[i], size)) * place;
            place *= static_cast<std::size_t>(size);
          }
          p[v] = image;
        }
        perms.emplace(g, std::move(p));
      }
      break;
    }
    case Family::finite_cyclic:
    case Family::finite_symmetric: {
      const ElementSet all = group.enumerate();
      const std::size_t order = all.size();
      std::map<Element, std::size_t> index;
      for (std::size_t i = 0; i < order; ++i) index.emplace(all[i], i);
      for (const auto& g : support) {
        group.validate(g);
        Permutation p(n);
        for (std::size_t c = 0; c < static_cast<std::size_t>(size); ++c) {
          for (std::size_t i = 0; i < order; ++i) {
            p[c * order + i] = c * order + index.at(group.multiply(g, all[i]));
          }
        }
        perms.emplace(g, std::move(p));
      }
      break;
    }
    case Family::heisenberg: {
      const auto s = static_cast<std::size_t>(size);
      auto encode = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        return (static_cast<std::size_t>(mod(x, size)) * s + static_cast<std::size_t>(mod(y, size))) * s +
               static_cast<std::size_t>(mod(z, size));
      };
      for (const auto& g : support) {
        group.validate(g);
        const std::int64_t a = g.coords[0], b = g.coords[1], c = g.coords[2];
        Permutation p(n);
        for (std::int64_t x = 0; x < size; ++x) {
          for (std::int64_t y = 0; y < size; ++y) {
            for (std::int64_t z = 0; z < size; ++z) {
              // (a,b,c)(x,y,z) = (a+x, b+y, c+z+a*y)
              p[encode(x, y, z)] = encode(a + x, b + y, mod(c, size) + z + mod(a, size) * y);
            }
          }
        }
        perms.emplace(g, std::move(p));
      }
      break;
    }
  }
  return SoficApproximation(group, n, std::move(perms));
}

}  // namespace sofic
