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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "k3dyn/simd/kernels.hpp"

namespace k3dyn::simd {
namespace {

// -1 means "not forced".
std::atomic<int> g_forced{-1};

Isa detect() {
  const char* env = std::getenv("K3DYN_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::kScalar;
  return isa_available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

}  // namespace

const char* isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool isa_available(Isa isa) {
  if (isa == Isa::kScalar) return true;
#if K3DYN_HAVE_AVX2
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

void force_isa(Isa isa) {
  if (!isa_available(isa)) isa = Isa::kScalar;
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

std::complex<double> character_sum(const Soa& pts, std::span<const int> freq) {
#if K3DYN_HAVE_AVX2
  if (active_isa() == Isa::kAvx2) return avx2::character_sum(pts, freq);
#endif
  return scalar::character_sum(pts, freq);
}

void neighbor_counts(const Soa& pts, std::span<const double> radii2,
                     bool periodic, std::size_t row_begin,
                     std::size_t row_end, std::uint32_t* counts) {
#if K3DYN_HAVE_AVX2
  if (active_isa() == Isa::kAvx2) {
    avx2::neighbor_counts(pts, radii2, periodic, row_begin, row_end, counts);
    return;
  }
#endif
  scalar::neighbor_counts(pts, radii2, periodic, row_begin, row_end, counts);
}

void min_dist2(const Soa& queries, const Soa& set, bool periodic, double* out) {
#if K3DYN_HAVE_AVX2
  if (active_isa() == Isa::kAvx2) {
    avx2::min_dist2(queries, set, periodic, out);
    return;
  }
#endif
  scalar::min_dist2(queries, set, periodic, out);
}

}  // namespace k3dyn::simd
