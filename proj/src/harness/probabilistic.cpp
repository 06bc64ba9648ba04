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

#include "sofic/harness/probabilistic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "sofic/kernels.hpp"
#include "sofic/rng.hpp"
#include "sofic/serialize.hpp"

namespace sofic::harness {

namespace {

constexpr std::uint64_t kPropsStream = 0x70726f70ULL;
constexpr std::uint64_t kSetupLabel = 0;
constexpr std::uint64_t kSampleLabel = 1;
constexpr std::size_t kAveragedUnitaries = 4;

std::string fmt_c(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", c);
  return buf;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  double mean(double n) const { return sum / n; }
  double std_error(double n) const {
    const double m = sum / n;
    const double var = std::max(0.0, (sum_sq / n - m * m) * n / (n - 1.0));
    return std::sqrt(var / n);
  }
};

}  // namespace

PropsReport verify_probabilistic_props(const PropsOptions& options) {
  if (options.samples < kMinPropSamples) {
    throw std::invalid_argument("verify-props needs at least " + std::to_string(kMinPropSamples) + " samples");
  }
  for (Index d : options.dims) {
    if (d < 1) throw std::invalid_argument("dimensions must be positive");
  }
  for (double c : options.tail_c) {
    if (!(c > 1.0)) throw std::invalid_argument("tail constants must exceed 1");
  }
  PropsReport rep;
  rep.options = options;
  const double n = static_cast<double>(options.samples);
  const std::size_t nc = options.tail_c.size();

  for (Index d : options.dims) {
    const auto du = static_cast<std::uint64_t>(d);
    StreamRng setup(options.seed, StreamRng::stream_id({kPropsStream, du, kSetupLabel}));
    const Matrix a = random_gaussian(d, d, setup);
    const Index rank = std::max<Index>(1, d / 4);
    const Projection p = random_projection(d, rank, setup);
    // Rows of B* u_k for the averaged projection statistic.
    std::vector<Matrix> compressed;
    for (std::size_t k = 0; k < kAveragedUnitaries; ++k) {
      compressed.push_back(p.basis().adjoint() * random_unitary(d, setup));
    }

    DimStats st;
    st.dim = d;
    st.hs_sq = std::pow(hs_norm(a), 2);
    st.proj_trace_fraction = static_cast<double>(rank) / static_cast<double>(d);
    std::vector<std::size_t> tail(nc, 0), ptail(nc, 0);
    Moments ma, mp, mc;
    Vector y(d), z(rank);
    for (std::size_t i = 0; i < options.samples; ++i) {
      StreamRng rng(options.seed, StreamRng::stream_id({kPropsStream, du, kSampleLabel, i}));
      const Vector xi = random_unit_vector(d, rng);
      y.noalias() = a * xi;
      const double ya = kernels::norm2(view(y));
      double yp = 0.0;
      for (const auto& c : compressed) {
        z.noalias() = c * xi;
        yp += kernels::norm2(view(z));
      }
      yp /= static_cast<double>(compressed.size());
      const double yc = std::norm(xi(0));
      ma.add(ya);
      mp.add(yp);
      mc.add(yc);
      for (std::size_t k = 0; k < nc; ++k) {
        const double c = options.tail_c[k];
        if (ya > c * c * st.hs_sq) ++tail[k];
        if (yp > c * st.proj_trace_fraction) ++ptail[k];
      }
    }
    st.mean = ma.mean(n);
    st.std_error = ma.std_error(n);
    st.proj_mean = mp.mean(n);
    st.proj_std_error = mp.std_error(n);
    st.coord_mean = mc.mean(n);
    st.coord_std_error = mc.std_error(n);

    const std::string base = "props.d=" + std::to_string(d) + ".";
    auto& ck = rep.checks;
    const double slack = 1e-12;
    ck.le(base + "mean_within_3se", std::abs(st.mean - st.hs_sq), 3.0 * st.std_error, true, slack * st.hs_sq);
    ck.le(base + "mean_relative", std::abs(st.mean - st.hs_sq) / st.hs_sq, 0.02);
    ck.le(base + "proj_mean_within_3se", std::abs(st.proj_mean - st.proj_trace_fraction),
          3.0 * st.proj_std_error, true, slack);
    ck.le(base + "coordinate_mean_within_3se", std::abs(st.coord_mean - 1.0 / static_cast<double>(d)),
          3.0 * st.coord_std_error, true, slack);
    for (std::size_t k = 0; k < nc; ++k) {
      const double c = options.tail_c[k];
      const double sigma = std::sqrt((1.0 / c) * (1.0 - 1.0 / c) / n);
      st.tail_freq.push_back(static_cast<double>(tail[k]) / n);
      st.proj_tail_freq.push_back(static_cast<double>(ptail[k]) / n);
      ck.le(base + "tail_c=" + fmt_c(c), st.tail_freq.back(), 1.0 / c + 3.0 * sigma);
      ck.le(base + "proj_tail_c=" + fmt_c(c), st.proj_tail_freq.back(), 1.0 / c + 3.0 * sigma);
    }
    rep.dims.push_back(std::move(st));
  }
  return rep;
}

nlohmann::json PropsReport::to_json() const {
  using serialize::number;
  nlohmann::json dims_j = nlohmann::json::array();
  for (const auto& s : dims) {
    nlohmann::json tails = nlohmann::json::array(), ptails = nlohmann::json::array();
    for (double x : s.tail_freq) tails.push_back(number(x));
    for (double x : s.proj_tail_freq) ptails.push_back(number(x));
    dims_j.push_back({{"dim", s.dim},
                      {"hs_sq", number(s.hs_sq)},
                      {"mean", number(s.mean)},
                      {"std_error", number(s.std_error)},
                      {"tail_freq", tails},
                      {"proj_trace_fraction", number(s.proj_trace_fraction)},
                      {"proj_mean", number(s.proj_mean)},
                      {"proj_std_error", number(s.proj_std_error)},
                      {"proj_tail_freq", ptails},
                      {"coord_mean", number(s.coord_mean)},
                      {"coord_std_error", number(s.coord_std_error)}});
  }
  nlohmann::json cs = nlohmann::json::array();
  for (double c : options.tail_c) cs.push_back(c);
  return {{"experiment", "verify-props"},
          {"samples", options.samples},
          {"seed", options.seed},
          {"tail_c", cs},
          {"dims", dims_j},
          {"checks", serialize::checks(checks)}};
}

}  // namespace sofic::harness
