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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace k3dyn::test {

cplx naive_eval(const wehler::Surface& s, cplx x1, cplx x2, cplx x3) {
  cplx sum = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        cplx m = s.coeff(i, j, k);
        for (int e = 0; e < i; ++e) m *= x1;
        for (int e = 0; e < j; ++e) m *= x2;
        for (int e = 0; e < k; ++e) m *= x3;
        sum += m;
      }
  return sum;
}

std::array<cplx, 3> naive_axis_quadratic(const wehler::Surface& s, const std::array<cplx, 3>& x,
                                         int k) {
  std::array<cplx, 3> abc{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        const std::array<int, 3> e{i, j, l};
        cplx m = s.coeff(i, j, l);
        for (int t = 0; t < 3; ++t) {
          if (t == k) continue;
          for (int r = 0; r < e[t]; ++r) m *= x[t];
        }
        abc[2 - e[k]] += m;
      }
  return abc;
}

std::array<cplx, 3> naive_gradient(const wehler::Surface& s, const std::array<cplx, 3>& x,
                                   double h) {
  std::array<cplx, 3> g;
  for (int t = 0; t < 3; ++t) {
    auto xp = x, xm = x;
    xp[t] += h;
    xm[t] -= h;
    g[t] = (naive_eval(s, xp[0], xp[1], xp[2]) - naive_eval(s, xm[0], xm[1], xm[2])) / (2.0 * h);
  }
  return g;
}

std::array<cplx, 3> affine(const wehler::SurfacePoint& p) {
  std::array<cplx, 3> x;
  for (int t = 0; t < 3; ++t) x[t] = p.z[t].a / p.z[t].b;
  return x;
}

double p1_distance(const wehler::SurfacePoint& p, const wehler::SurfacePoint& q) {
  double d = 0.0;
  for (int t = 0; t < 3; ++t) {
    const auto& u = p.z[t];
    const auto& v = q.z[t];
    d = std::max(d, std::abs(u.a * v.b - u.b * v.a));
  }
  return d;
}

}  // namespace k3dyn::test
