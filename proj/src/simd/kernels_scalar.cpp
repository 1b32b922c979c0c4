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

#include <algorithm>
#include <cmath>
#include <limits>

#include "k3dyn/simd/kernels.hpp"
#include "phasor_poly.hpp"

namespace k3dyn::simd {

std::complex<double> unit_phasor(double turns) {
  double c, s;
  detail::sincos_turns(turns, &c, &s);
  return {c, s};
}

namespace scalar {

std::complex<double> character_sum(const Soa& pts, std::span<const int> freq) {
  const std::size_t n = pts.size();
  const int dim = pts.dim();
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = row_begin; i < row_end; ++i) {
    std::uint32_t* row = counts + (i - row_begin) * nr;
    std::fill(row, row + nr, 0u);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        double dx = pts.coords[d][i] - pts.coords[d][j];
        if (periodic) dx -= std::nearbyint(dx);
        d2 += dx * dx;
      }
      for (std::size_t r = 0; r < nr; ++r) row[r] += d2 < radii2[r] ? 1u : 0u;
    }
  }
}

void min_dist2(const Soa& queries, const Soa& set, bool periodic, double* out) {
  const int dim = queries.dim();
  for (std::size_t q = 0; q < queries.size(); ++q) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < set.size(); ++j) {
      double d2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        double dx = queries.coords[d][q] - set.coords[d][j];
        if (periodic) dx -= std::nearbyint(dx);
        d2 += dx * dx;
      }
      best = std::min(best, d2);
    }
    out[q] = best;
  }
}

}  // namespace scalar
}  // namespace k3dyn::simd
