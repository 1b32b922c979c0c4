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

#include "k3dyn/error.hpp"
#include "k3dyn/parallel.hpp"
#include "k3dyn/simd/kernels.hpp"
#include "k3dyn/torus.hpp"

namespace k3dyn::torus {
namespace {

simd::Soa to_soa(const std::array<std::vector<double>, 3>& orbit, std::size_t n) {
  simd::Soa s(3, n);
  for (int d = 0; d < 3; ++d) std::copy_n(orbit[d].begin(), n, s.coords[d].begin());
  return s;
}

double max_character_average(const simd::Soa& pts, const std::vector<std::array<int, 3>>& chars,
                             std::vector<double>* per_char) {
  std::vector<double> mod(chars.size());
  const double n = static_cast<double>(pts.size());
  parallel_blocks(chars.size(), [&](std::size_t c) {
    const std::array<int, 3>& f = chars[c];
    mod[c] = std::abs(simd::character_sum(pts, std::span<const int>(f.data(), 3))) / n;
  });
  if (per_char) *per_char = mod;
  return *std::max_element(mod.begin(), mod.end());
}

}  // namespace

const char* ue_verdict_name(UeVerdict v) {
  switch (v) {
    case UeVerdict::kEquidistributed: return "Equidistributed";
    case UeVerdict::kNotEquidistributed: return "NotEquidistributed";
    case UeVerdict::kInconclusive: return "Inconclusive";
  }
  return "?";
}

std::vector<std::array<int, 3>> characters_up_to_conjugation(int K) {
  std::vector<std::array<int, 3>> out;
  for (int k = -K; k <= K; ++k)
    for (int l = -K; l <= K; ++l)
      for (int m = -K; m <= K; ++m) {
        const int first = k != 0 ? k : (l != 0 ? l : m);
        if (first > 0) out.push_back({k, l, m});
      }
  return out;
}

std::array<std::vector<double>, 3> skew_orbit(const SkewProduct& g, std::array<double, 3> x,
                                              std::size_t n) {
  std::array<std::vector<double>, 3> out;
  for (auto& v : out) v.resize(n);
  const double shift3 = fiber::frac(static_cast<double>(g.a) * g.s1);
  const double shift4 = fiber::frac(static_cast<double>(g.c) * g.s1);
  const double s2 = fiber::frac(g.s2);
  for (auto& c : x) c = fiber::frac(c);
  for (std::size_t i = 0; i < n; ++i) {
    out[0][i] = x[0];
    out[1][i] = x[1];
    out[2][i] = x[2];
    const double x2 = x[0];
    x[0] = fiber::frac(x2 + s2);
    x[1] = fiber::frac(x[1] + shift3 + fiber::frac(static_cast<double>(g.b) * x2));
    x[2] = fiber::frac(x[2] + shift4 + fiber::frac(static_cast<double>(g.d) * x2));
  }
  return out;
}

std::optional<std::array<int, 3>> invariant_character(const SkewProduct& g, int height, double tol) {
  for (int h = 1; h <= height; ++h) {
    for (int k = -h; k <= h; ++k)
      for (int l = -h; l <= h; ++l)
        for (int m = -h; m <= h; ++m) {
          if (std::max({std::abs(k), std::abs(l), std::abs(m)}) != h) continue;
          const int first = k != 0 ? k : (l != 0 ? l : m);
          if (first <= 0) continue;
          if (l * g.b + m * g.d != 0) continue;
          const double phase = k * g.s2 + static_cast<double>(l * g.a + m * g.c) * g.s1;
          if (std::abs(fiber::wrap_half(phase)) <= tol * (1.0 + std::abs(phase))) {
            return std::array<int, 3>{k, l, m};
          }
        }
  }
  return std::nullopt;
}

UeReport unique_ergodicity_test(const SkewProduct& g, std::size_t n, int K, std::uint64_t seed,
                                int starts) {
  if (n < 16 || K < 1 || starts < 1) throw Error(ErrorCode::kInput, "need n >= 16, K >= 1, starts >= 1");
  UeReport rep;
  rep.threshold = ue_threshold(n);
  rep.determinant_nonzero = g.a * g.d - g.b * g.c != 0;
  rep.invariant_character = invariant_character(g);
  rep.ergodic = !rep.invariant_character.has_value();
  const auto chars = characters_up_to_conjugation(K);
  std::vector<double> worst(chars.size(), 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < starts; ++s) {
    const std::array<double, 3> x0{unit(rng), unit(rng), unit(rng)};
    const auto orbit = skew_orbit(g, x0, n);
    std::vector<double> mod;
    max_character_average(to_soa(orbit, n), chars, &mod);
    for (std::size_t c = 0; c < chars.size(); ++c) worst[c] = std::max(worst[c], mod[c]);
  }
  for (std::size_t c = 0; c < chars.size(); ++c) {
    rep.averages.push_back({chars[c], worst[c]});
    if (worst[c] > rep.max_average) {
      rep.max_average = worst[c];
      rep.worst = chars[c];
    }
  }
  if (rep.max_average > 10.0 * rep.threshold) {
    rep.verdict = UeVerdict::kNotEquidistributed;
  } else if (rep.max_average <= rep.threshold && rep.determinant_nonzero) {
    rep.verdict = UeVerdict::kEquidistributed;
  } else {
    rep.verdict = UeVerdict::kInconclusive;
  }
  return rep;
}

double ue_decay_exponent(const SkewProduct& g, const std::vector<std::size_t>& checkpoints, int K,
                         std::uint64_t seed) {
  if (checkpoints.size() < 2) throw Error(ErrorCode::kInput, "need at least two checkpoints");
  const std::size_t n = *std::max_element(checkpoints.begin(), checkpoints.end());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto orbit = skew_orbit(g, {unit(rng), unit(rng), unit(rng)}, n);
  const auto chars = characters_up_to_conjugation(K);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t N : checkpoints) {
    const double y = std::log(max_character_average(to_soa(orbit, N), chars, nullptr));
    const double x = std::log(static_cast<double>(N));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(checkpoints.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace k3dyn::torus
