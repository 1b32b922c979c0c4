// Copyright 2026 The k3dyn Authors.
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

// Data-parallel hot loops. Every kernel has a scalar reference in
// namespace scalar and an AVX2 variant in namespace avx2; the unqualified
// entry points dispatch at runtime.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace k3dyn::simd {

enum class Isa { kScalar, kAvx2 };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);
// Highest available ISA unless overridden by force_isa or the
// K3DYN_SIMD=scalar environment variable.
Isa active_isa();
void force_isa(Isa isa);
void reset_isa();

// Structure-of-arrays point set: coords[d][i] for d < dim, i < n.
struct Soa {
  std::vector<std::vector<double>> coords;
  explicit Soa(int dim = 0, std::size_t n = 0)
      : coords(static_cast<std::size_t>(dim), std::vector<double>(n)) {}
  int dim() const { return static_cast<int>(coords.size()); }
  std::size_t size() const { return coords.empty() ? 0 : coords[0].size(); }
};

// sum_i exp(2 pi i * sum_d freq[d] * x_d[i])
std::complex<double> character_sum(const Soa& pts, std::span<const int> freq);

// counts[(i - row_begin) * R + r] = #{ j != i : |x_i - x_j|^2 < radii2[r] }.
// periodic selects the flat metric of R^dim / Z^dim.
void neighbor_counts(const Soa& pts, std::span<const double> radii2,
                     bool periodic, std::size_t row_begin,
                     std::size_t row_end, std::uint32_t* counts);

// out[q] = min_j |query_q - set_j|^2 (infinity when set is empty).
void min_dist2(const Soa& queries, const Soa& set, bool periodic, double* out);

// Unit phasor of a phase measured in turns; shared polynomial core.
std::complex<double> unit_phasor(double turns);

namespace scalar {
std::complex<double> character_sum(const Soa& pts, std::span<const int> freq);
void neighbor_counts(const Soa& pts, std::span<const double> radii2,
                     bool periodic, std::size_t row_begin,
                     std::size_t row_end, std::uint32_t* counts);
void min_dist2(const Soa& queries, const Soa& set, bool periodic, double* out);
}  // namespace scalar

namespace avx2 {
std::complex<double> character_sum(const Soa& pts, std::span<const int> freq);
void neighbor_counts(const Soa& pts, std::span<const double> radii2,
                     bool periodic, std::size_t row_begin,
                     std::size_t row_end, std::uint32_t* counts);
void min_dist2(const Soa& queries, const Soa& set, bool periodic, double* out);
}  // namespace avx2

}  // namespace k3dyn::simd
