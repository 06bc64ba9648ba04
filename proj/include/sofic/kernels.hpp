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

#include <complex>
#include <span>
#include <string_view>

/// Reduction and update kernels over contiguous complex<double> arrays.
///
/// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
/// variant. The variant is chosen once at first use from the running CPU and
/// can be pinned with force_isa() (tests do this to compare the two paths).
namespace sofic::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
/// Pins the dispatch target. Throws std::invalid_argument if unavailable.
void force_isa(Isa isa);
/// Reverts to the best ISA available on this CPU.
void reset_isa();

/// sum_i conj(x_i) * y_i
cplx dotc(std::span<const cplx> x, std::span<const cplx> y);
/// sum_i |x_i|^2
double norm2(std::span<const cplx> x);
/// sum_i |x_i - y_i|^2
double diff_norm2(std::span<const cplx> x, std::span<const cplx> y);
/// y += a * x
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);
/// x *= a (real scale)
void scale(double a, std::span<cplx> x);

/// Per-ISA entry points, exposed for equivalence tests.
namespace scalar {
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
double norm2(const cplx* x, std::size_t n);
double diff_norm2(const cplx* x, const cplx* y, std::size_t n);
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
void scale(double a, cplx* x, std::size_t n);
}  // namespace scalar

namespace avx2 {
cplx dotc(const cplx* x, const cplx* y, std::size_t n);
double norm2(const cplx* x, std::size_t n);
double diff_norm2(const cplx* x, const cplx* y, std::size_t n);
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
void scale(double a, cplx* x, std::size_t n);
}  // namespace avx2

}  // namespace sofic::kernels
