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

#include <cmath>

namespace k3dyn::simd::detail {

// Taylor coefficients for sin and cos on [-pi/4, pi/4]; truncation error
// stays below 1e-16 there.
inline constexpr double kSin[8] = {
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
};
inline constexpr double kCos[9] = {
    1.0,
    -1.0 / 2.0,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0,
};
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

inline void sincos_turns(double t, double* c, double* s) {
  const double r = t - std::nearbyint(t);
  const double q = std::nearbyint(4.0 * r);
  const double x = kTwoPi * (r - 0.25 * q);
  const double x2 = x * x;
  double sp = kSin[7];
  for (int k = 6; k >= 0; --k) sp = std::fma(sp, x2, kSin[k]);
  double cp = kCos[8];
  for (int k = 7; k >= 0; --k) cp = std::fma(cp, x2, kCos[k]);
  const double sv = x * sp;
  const double cv = cp;
  const double qm = q - 4.0 * std::floor(q * 0.25);
  const bool odd = qm == 1.0 || qm == 3.0;
  double cr = odd ? sv : cv;
  double sr = odd ? cv : sv;
  if (qm == 1.0 || qm == 2.0) cr = -cr;
  if (qm == 2.0 || qm == 3.0) sr = -sr;
  *c = cr;
  *s = sr;
}

}  // namespace k3dyn::simd::detail
