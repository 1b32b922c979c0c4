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

#include "k3dyn/error.hpp"
#include "k3dyn/torus.hpp"

namespace k3dyn::torus {

std::vector<RealStructureSolution> real_structure_classify(double t, double tol) {
  if (!(t > 0.0)) throw Error(ErrorCode::kInput, "t must be positive");
  const cplx tau(0.5, t);
  const double n = std::norm(tau);
  // 1 = b |tau|^2 and 3/4 - t^2 = d |tau|^2 with a = c = -1, 1 <= b <= 3.
  const double b = 1.0 / n;
  const double d = (0.75 - t * t) / n;
  std::vector<RealStructureSolution> out;
  for (int bi = 1; bi <= 3; ++bi) {
    if (std::abs(b - bi) > tol * bi) continue;
    const double dr = std::round(d);
    if (std::abs(d - dr) > tol * std::max(1.0, std::abs(d))) continue;
    RealStructureSolution s;
    s.t = t;
    s.b = bi;
    s.d = static_cast<int>(dr);
    s.beta = tau / std::conj(tau);
    out.push_back(s);
  }
  return out;
}

std::vector<double> real_structure_grid() {
  constexpr int kUniform = 9997;
  std::vector<double> g;
  g.reserve(kUniform + 3);
  for (int i = 1; i <= kUniform; ++i) g.push_back(2.0 * i / kUniform);
  g.push_back(std::sqrt(3.0) / 2.0);
  g.push_back(0.5);
  g.push_back(std::sqrt(3.0) / 6.0);
  std::sort(g.begin(), g.end());
  return g;
}

}  // namespace k3dyn::torus
