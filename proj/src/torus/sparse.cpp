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
#include <numeric>
#include <set>

#include "k3dyn/error.hpp"
#include "k3dyn/parallel.hpp"
#include "k3dyn/simd/kernels.hpp"
#include "k3dyn/torus.hpp"

namespace k3dyn::torus {
namespace {

long long mod(long long x, long long n) { return ((x % n) + n) % n; }

// Smallest generator of <(a, b)> in (Z/n)^2 up to units.
std::array<long long, 2> canonical_generator(long long a, long long b, long long n) {
  std::array<long long, 2> best{a, b};
  for (long long k = 1; k < n; ++k) {
    if (std::gcd(k, n) != 1) continue;
    best = std::min(best, std::array<long long, 2>{mod(k * a, n), mod(k * b, n)});
  }
  return best;
}

}  // namespace

std::vector<Kernel> sparse_subgroups(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInput, "eps must be positive");
  // {0} is the only subgroup that is not eps-dense once eps exceeds the
  // covering radius of every order-two subgroup; sqrt(2)/2 is safe.
  if (eps >= std::sqrt(0.5)) return {Kernel{1, 1, 0}};
  const int pmax = static_cast<int>(std::floor(1.0 / eps));
  const long long mmax = std::max(static_cast<long long>(std::ceil(1.0 / eps)),
                                  static_cast<long long>(std::ceil(4.0 / (M_PI * eps * eps))));
  std::vector<Kernel> out;
  for (int q = 0; q <= pmax; ++q)
    for (int p = -pmax; p <= pmax; ++p) {
      if (p * p + q * q == 0 || p * p + q * q > 1.0 / (eps * eps)) continue;
      if (std::gcd(std::abs(p), q) != 1) continue;
      if (q == 0 && p != 1) continue;  // (-1, 0) is the same line
      for (long long m = 1; m <= mmax; ++m) out.push_back({m, p, q});
    }
  return out;
}

bool contains(const Kernel& k, long long a, long long b, long long n) {
  if (n <= 0) throw Error(ErrorCode::kInput, "denominator must be positive");
  return mod(k.m * mod(k.p * a - k.q * b, n), n) == 0;
}

double covering_radius_grid(long long a, long long b, long long n, int grid) {
  if (n <= 0 || grid < 2) throw Error(ErrorCode::kInput, "bad covering-radius input");
  simd::Soa set(2, static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    set.coords[0][k] = static_cast<double>(mod(k * a, n)) / n;
    set.coords[1][k] = static_cast<double>(mod(k * b, n)) / n;
  }
  const std::size_t g = static_cast<std::size_t>(grid);
  simd::Soa q(2, g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      q.coords[0][i * g + j] = (i + 0.5) / grid;
      q.coords[1][i * g + j] = (j + 0.5) / grid;
    }
  std::vector<double> d2(g * g);
  simd::min_dist2(q, set, true, d2.data());
  return std::sqrt(*std::max_element(d2.begin(), d2.end()));
}

SparseCheck sparse_bruteforce(const std::vector<Kernel>& list, double eps, int max_den, int grid) {
  if (max_den < 1) throw Error(ErrorCode::kInput, "max_den must be >= 1");
  std::vector<std::array<long long, 3>> subgroups;
  for (long long n = 1; n <= max_den; ++n) {
    std::set<std::array<long long, 2>> seen;
    for (long long a = 0; a < n; ++a)
      for (long long b = 0; b < n; ++b) {
        if (std::gcd(std::gcd(a, b), n) != 1) continue;
        const auto c = canonical_generator(a, b, n);
        if (seen.insert(c).second) subgroups.push_back({c[0], c[1], n});
      }
  }
  const double margin = eps - std::sqrt(2.0) / grid / 2.0;
  std::vector<char> dense(subgroups.size());
  parallel_blocks(subgroups.size(), [&](std::size_t i) {
    const auto& s = subgroups[i];
    dense[i] = covering_radius_grid(s[0], s[1], s[2], grid) <= margin;
  });
  SparseCheck out;
  out.subgroups = static_cast<int>(subgroups.size());
  for (std::size_t i = 0; i < subgroups.size(); ++i) {
    if (dense[i]) continue;
    const auto& s = subgroups[i];
    ++out.non_dense;
    if (s[2] > 1) out.nontrivial_non_dense.push_back(s);
    const bool covered = std::any_of(list.begin(), list.end(),
                                     [&](const Kernel& k) { return contains(k, s[0], s[1], s[2]); });
    if (!covered) {
      ++out.uncovered;
      out.uncovered_examples.push_back(s);
    }
  }
  return out;
}

}  // namespace k3dyn::torus
