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

// Compiled with -mavx2 -mfma -ffp-contract=off; only reached when the CPU
// reports AVX2 support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "k3dyn/simd/kernels.hpp"
#include "phasor_poly.hpp"

namespace k3dyn::simd::avx2 {
namespace {

constexpr int kRound = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;

inline void sincos_turns4(__m256d t, __m256d* c, __m256d* s) {
  const __m256d r = _mm256_sub_pd(t, _mm256_round_pd(t, kRound));
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(_mm256_set1_pd(4.0), r), kRound);
  const __m256d f = _mm256_sub_pd(r, _mm256_mul_pd(_mm256_set1_pd(0.25), q));
  const __m256d x = _mm256_mul_pd(_mm256_set1_pd(detail::kTwoPi), f);
  const __m256d x2 = _mm256_mul_pd(x, x);
  __m256d sp = _mm256_set1_pd(detail::kSin[7]);
  for (int k = 6; k >= 0; --k) sp = _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(detail::kSin[k]));
  __m256d cp = _mm256_set1_pd(detail::kCos[8]);
  for (int k = 7; k >= 0; --k) cp = _mm256_fmadd_pd(cp, x2, _mm256_set1_pd(detail::kCos[k]));
  const __m256d sv = _mm256_mul_pd(x, sp);
  const __m256d qm = _mm256_sub_pd(
      q, _mm256_mul_pd(_mm256_set1_pd(4.0),
                       _mm256_floor_pd(_mm256_mul_pd(q, _mm256_set1_pd(0.25)))));
  const __m256d one = _mm256_set1_pd(1.0), two = _mm256_set1_pd(2.0),
                three = _mm256_set1_pd(3.0);
  const __m256d is1 = _mm256_cmp_pd(qm, one, _CMP_EQ_OQ);
  const __m256d is2 = _mm256_cmp_pd(qm, two, _CMP_EQ_OQ);
  const __m256d is3 = _mm256_cmp_pd(qm, three, _CMP_EQ_OQ);
  const __m256d odd = _mm256_or_pd(is1, is3);
  __m256d cr = _mm256_blendv_pd(cp, sv, odd);
  __m256d sr = _mm256_blendv_pd(sv, cp, odd);
  const __m256d sign = _mm256_set1_pd(-0.0);
  cr = _mm256_xor_pd(cr, _mm256_and_pd(_mm256_or_pd(is1, is2), sign));
  sr = _mm256_xor_pd(sr, _mm256_and_pd(_mm256_or_pd(is2, is3), sign));
  *c = cr;
  *s = sr;
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline __m256d wrap(__m256d dx) {
  return _mm256_sub_pd(dx, _mm256_round_pd(dx, kRound));
}

}  // namespace

std::complex<double> character_sum(const Soa& pts, std::span<const int> freq) {
  const std::size_t n = pts.size();
  const int dim = pts.dim();
  __m256d acc_c = _mm256_setzero_pd(), acc_s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d phase = _mm256_setzero_pd();
    for (int d = 0; d < dim; ++d) {
      phase = _mm256_fmadd_pd(_mm256_set1_pd(static_cast<double>(freq[d])),
                              _mm256_loadu_pd(pts.coords[d].data() + i), phase);
    }
    __m256d c, s;
    sincos_turns4(phase, &c, &s);
    acc_c = _mm256_add_pd(acc_c, c);
    acc_s = _mm256_add_pd(acc_s, s);
  }
  double re = hsum(acc_c), im = hsum(acc_s);
  for (; i < n; ++i) {
    double phase = 0.0;
    for (int d = 0; d < dim; ++d) {
      phase = std::fma(static_cast<double>(freq[d]), pts.coords[d][i], phase);
    }
    double c, s;
    detail::sincos_turns(phase, &c, &s);
    re += c;
    im += s;
  }
  return {re, im};
}

void neighbor_counts(const Soa& pts, std::span<const double> radii2,
                     bool periodic, std::size_t row_begin,
                     std::size_t row_end, std::uint32_t* counts) {
  const std::size_t n = pts.size();
  const int dim = pts.dim();
  const std::size_t nr = radii2.size();
  // Wrapped so std::vector keeps the 32-byte alignment of the lane types.
  struct Acc { __m256i v; };
  struct Rad { __m256d v; };
  std::vector<Acc> acc(nr);
  std::vector<Rad> r2v(nr);
  for (std::size_t r = 0; r < nr; ++r) r2v[r].v = _mm256_set1_pd(radii2[r]);
  std::vector<double> xi(static_cast<std::size_t>(dim));
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (int d = 0; d < dim; ++d) xi[d] = pts.coords[d][i];
    for (auto& a : acc) a.v = _mm256_setzero_si256();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d d2 = _mm256_setzero_pd();
      for (int d = 0; d < dim; ++d) {
        __m256d dx = _mm256_sub_pd(_mm256_set1_pd(xi[d]),
                                   _mm256_loadu_pd(pts.coords[d].data() + j));
        if (periodic) dx = wrap(dx);
        d2 = _mm256_add_pd(d2, _mm256_mul_pd(dx, dx));
      }
      for (std::size_t r = 0; r < nr; ++r) {
        const __m256d m = _mm256_cmp_pd(d2, r2v[r].v, _CMP_LT_OQ);
        acc[r].v = _mm256_sub_epi64(acc[r].v, _mm256_castpd_si256(m));
      }
    }
    std::uint32_t* row = counts + (i - row_begin) * nr;
    for (std::size_t r = 0; r < nr; ++r) {
      alignas(32) std::int64_t lanes[4];
      _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc[r].v);
      row[r] = static_cast<std::uint32_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
    }
    for (; j < n; ++j) {
      double d2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        double dx = xi[d] - pts.coords[d][j];
        if (periodic) dx -= std::nearbyint(dx);
        d2 += dx * dx;
      }
      for (std::size_t r = 0; r < nr; ++r) row[r] += d2 < radii2[r] ? 1u : 0u;
    }
    // The self pair always sits at distance zero.
    for (std::size_t r = 0; r < nr; ++r) {
      if (radii2[r] > 0.0) row[r] -= 1u;
    }
  }
}

void min_dist2(const Soa& queries, const Soa& set, bool periodic, double* out) {
  const int dim = queries.dim();
  const std::size_t m = set.size();
  for (std::size_t q = 0; q < queries.size(); ++q) {
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      __m256d d2 = _mm256_setzero_pd();
      for (int d = 0; d < dim; ++d) {
        __m256d dx = _mm256_sub_pd(_mm256_set1_pd(queries.coords[d][q]),
                                   _mm256_loadu_pd(set.coords[d].data() + j));
        if (periodic) dx = wrap(dx);
        d2 = _mm256_add_pd(d2, _mm256_mul_pd(dx, dx));
      }
      best = _mm256_min_pd(best, d2);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, best);
    double b = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
    for (; j < m; ++j) {
      double d2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        double dx = queries.coords[d][q] - set.coords[d][j];
        if (periodic) dx -= std::nearbyint(dx);
        d2 += dx * dx;
      }
      b = std::min(b, d2);
    }
    out[q] = b;
  }
}

}  // namespace k3dyn::simd::avx2
