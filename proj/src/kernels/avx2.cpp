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

// AVX2 + FMA kernels. A __m256d holds two interleaved complex values
// (re0, im0, re1, im1). Loops are unrolled by two registers; the tail falls
// back to the scalar reference.

#include <immintrin.h>

#include "sofic/kernels.hpp"

namespace sofic::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline const double* as_doubles(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(cplx* p) { return reinterpret_cast<double*>(p); }

}  // namespace

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
  const double* xd = as_doubles(x);
  const double* yd = as_doubles(y);
  // re_acc lanes: xr*yr, xi*yi ; im_acc lanes: xr*yi, xi*yr
  __m256d re0 = _mm256_setzero_pd(), re1 = _mm256_setzero_pd();
  __m256d im0 = _mm256_setzero_pd(), im1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xa = _mm256_loadu_pd(xd + 2 * i);
    __m256d ya = _mm256_loadu_pd(yd + 2 * i);
    __m256d xb = _mm256_loadu_pd(xd + 2 * i + 4);
    __m256d yb = _mm256_loadu_pd(yd + 2 * i + 4);
    re0 = _mm256_fmadd_pd(xa, ya, re0);
    re1 = _mm256_fmadd_pd(xb, yb, re1);
    im0 = _mm256_fmadd_pd(xa, _mm256_permute_pd(ya, 0b0101), im0);
    im1 = _mm256_fmadd_pd(xb, _mm256_permute_pd(yb, 0b0101), im1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d xa = _mm256_loadu_pd(xd + 2 * i);
    __m256d ya = _mm256_loadu_pd(yd + 2 * i);
    re0 = _mm256_fmadd_pd(xa, ya, re0);
    im0 = _mm256_fmadd_pd(xa, _mm256_permute_pd(ya, 0b0101), im0);
  }
  const double re = hsum(_mm256_add_pd(re0, re1));
  // im lanes alternate +xr*yi, +xi*yr; the second must be subtracted.
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  const double im = hsum(_mm256_mul_pd(_mm256_add_pd(im0, im1), sign));
  cplx tail = scalar::dotc(x + i, y + i, n - i);
  return {re + tail.real(), im + tail.imag()};
}

double norm2(const cplx* x, std::size_t n) {
  const double* xd = as_doubles(x);
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d u = _mm256_loadu_pd(xd + 2 * i);
    __m256d v = _mm256_loadu_pd(xd + 2 * i + 4);
    a0 = _mm256_fmadd_pd(u, u, a0);
    a1 = _mm256_fmadd_pd(v, v, a1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d u = _mm256_loadu_pd(xd + 2 * i);
    a0 = _mm256_fmadd_pd(u, u, a0);
  }
  return hsum(_mm256_add_pd(a0, a1)) + scalar::norm2(x + i, n - i);
}

double diff_norm2(const cplx* x, const cplx* y, std::size_t n) {
  const double* xd = as_doubles(x);
  const double* yd = as_doubles(y);
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d u = _mm256_sub_pd(_mm256_loadu_pd(xd + 2 * i), _mm256_loadu_pd(yd + 2 * i));
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(xd + 2 * i + 4), _mm256_loadu_pd(yd + 2 * i + 4));
    a0 = _mm256_fmadd_pd(u, u, a0);
    a1 = _mm256_fmadd_pd(v, v, a1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d u = _mm256_sub_pd(_mm256_loadu_pd(xd + 2 * i), _mm256_loadu_pd(yd + 2 * i));
    a0 = _mm256_fmadd_pd(u, u, a0);
  }
  return hsum(_mm256_add_pd(a0, a1)) + scalar::diff_norm2(x + i, y + i, n - i);
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double* xd = as_doubles(x);
  double* yd = as_doubles(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    // (yr + ar*xr - ai*xi, yi + ar*xi + ai*xr)
    __m256d t = _mm256_fmadd_pd(ar, xv, yv);
    __m256d sw = _mm256_mul_pd(ai, _mm256_permute_pd(xv, 0b0101));
    _mm256_storeu_pd(yd + 2 * i, _mm256_addsub_pd(t, sw));
  }
  scalar::axpy(a, x + i, y + i, n - i);
}

void scale(double a, cplx* x, std::size_t n) {
  double* xd = as_doubles(x);
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(xd + 2 * i, _mm256_mul_pd(av, _mm256_loadu_pd(xd + 2 * i)));
  }
  scalar::scale(a, x + i, n - i);
}

}  // namespace sofic::kernels::avx2
