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
#include <cstdlib>
#include <numeric>

#include "k3dyn/error.hpp"
#include "k3dyn/fiber.hpp"

namespace k3dyn::fiber {

RotationVector rotation_vector(std::span<const Vec2> orbit, const RotationOptions& opt) {
  if (orbit.size() < 2) throw Error(ErrorCode::kInput, "rotation vector needs at least two points");
  const std::size_t n = orbit.size() - 1;
  std::vector<Vec2> steps(n);
  Vec2 lift{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < 2; ++d) {
      steps[i][d] = wrap_half(orbit[i + 1][d] - orbit[i][d]);
      lift[d] += steps[i][d];
    }
  }
  const Vec2 mean{lift[0] / n, lift[1] / n};
  double dev = 0.0;
  for (const auto& s : steps)
    for (int d = 0; d < 2; ++d) dev = std::max(dev, std::abs(s[d] - mean[d]));
  if (dev > opt.max_step_deviation) {
    throw Error(ErrorCode::kNotATranslation,
                "step deviation " + std::to_string(dev) + " exceeds the translation guard");
  }
  RotationVector rv;
  rv.T = {frac(mean[0]), frac(mean[1])};
  rv.err = (2.0 * opt.coord_uncertainty + dev) / static_cast<double>(n);
  rv.n = n;
  return rv;
}

const char* slope_kind_name(SlopeKind k) {
  switch (k) {
    case SlopeKind::kTorsion: return "Torsion";
    case SlopeKind::kCircles: return "Circles";
    case SlopeKind::kDense: return "Dense";
    case SlopeKind::kAmbiguous: return "Ambiguous";
  }
  return "?";
}

SlopeResult slope_detect(const RotationVector& T, int dmax, double margin) {
  if (dmax < 1) throw Error(ErrorCode::kInput, "dmax must be positive");
  const double e = T.err;
  SlopeResult res;
  for (int n = 1; n <= dmax; ++n) {
    const double tol = margin * e * n;
    if (std::abs(wrap_half(n * T.T[0])) <= tol && std::abs(wrap_half(n * T.T[1])) <= tol) {
      res.kind = SlopeKind::kTorsion;
      res.torsion_order = n;
      return res;
    }
  }
  std::vector<CircleDescriptor> found;
  for (int q = 0; q <= dmax; ++q) {
    for (int p = -dmax; p <= dmax; ++p) {
      if (q == 0 && p != 1) continue;
      if (std::gcd(std::abs(p), q) != 1) continue;
      const double r = q * T.T[0] - p * T.T[1];
      const double scale = margin * e * (std::abs(p) + q);
      for (int k = 1; k <= dmax; ++k) {
        if (std::abs(wrap_half(k * r)) <= scale * k) {
          found.push_back({k, p, q});
          break;
        }
      }
    }
  }
  if (found.empty()) {
    res.kind = SlopeKind::kDense;
  } else if (found.size() == 1) {
    res.kind = SlopeKind::kCircles;
    res.circles = found[0];
  } else {
    res.kind = SlopeKind::kAmbiguous;
    res.candidates = std::move(found);
  }
  return res;
}

}  // namespace k3dyn::fiber
