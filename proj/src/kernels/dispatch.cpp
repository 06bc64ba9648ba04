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

#include <atomic>
#include <cassert>
#include <stdexcept>

#include "sofic/kernels.hpp"

namespace sofic::kernels {

namespace {

struct Table {
  Isa isa;
  cplx (*dotc)(const cplx*, const cplx*, std::size_t);
  double (*norm2)(const cplx*, std::size_t);
  double (*diff_norm2)(const cplx*, const cplx*, std::size_t);
  void (*axpy)(cplx, const cplx*, cplx*, std::size_t);
  void (*scale)(double, cplx*, std::size_t);
};

constexpr Table kScalar{Isa::scalar, scalar::dotc, scalar::norm2, scalar::diff_norm2,
                        scalar::axpy, scalar::scale};
#if defined(SOFIC_HAVE_AVX2_TU)
constexpr Table kAvx2{Isa::avx2, avx2::dotc, avx2::norm2, avx2::diff_norm2, avx2::axpy,
                      avx2::scale};
#endif

bool cpu_has_avx2() {
#if defined(SOFIC_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* best_table() {
#if defined(SOFIC_HAVE_AVX2_TU)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{best_table()};
  return table;
}

inline const Table& table() { return *current().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "?";
}

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
  return cpu_has_avx2();
}

Isa active_isa() { return table().isa; }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel ISA " + std::string(isa_name(isa)) +
                                " is not available on this CPU");
  }
#if defined(SOFIC_HAVE_AVX2_TU)
  if (isa == Isa::avx2) {
    current().store(&kAvx2);
    return;
  }
#endif
  current().store(&kScalar);
}

void reset_isa() { current().store(best_table()); }

cplx dotc(std::span<const cplx> x, std::span<const cplx> y) {
  assert(x.size() == y.size());
  return table().dotc(x.data(), y.data(), x.size());
}

double norm2(std::span<const cplx> x) { return table().norm2(x.data(), x.size()); }

double diff_norm2(std::span<const cplx> x, std::span<const cplx> y) {
  assert(x.size() == y.size());
  return table().diff_norm2(x.data(), y.data(), x.size());
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  assert(x.size() == y.size());
  table().axpy(a, x.data(), y.data(), x.size());
}

void scale(double a, std::span<cplx> x) { table().scale(a, x.data(), x.size()); }

}  // namespace sofic::kernels
