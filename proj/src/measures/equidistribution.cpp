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

#include "k3dyn/cluster.hpp"
#include "k3dyn/error.hpp"
#include "k3dyn/measures.hpp"
#include "k3dyn/parallel.hpp"

namespace k3dyn::measures {
namespace {

std::vector<std::vector<int>> characters(int dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(dim, -degree);
  while (true) {
    int first = 0;
    for (int v : k)
      if (v != 0) {
        first = v;
        break;
      }
    if (first > 0) out.push_back(k);
    int d = 0;
    while (d < dim && ++k[d] > degree) k[d++] = -degree;
    if (d == dim) break;
  }
  return out;
}

// Integers (a, b) with a p + b q = 1.
std::array<long long, 2> bezout(long long p, long long q) {
  long long r0 = p, r1 = q, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const long long f = r0 / r1;
    r0 -= f * r1;
    std::swap(r0, r1);
    s0 -= f * s1;
    std::swap(s0, s1);
    t0 -= f * t1;
    std::swap(t0, t1);
  }
  if (r0 < 0) {
    s0 = -s0;
    t0 = -t0;
    r0 = -r0;
  }
  if (r0 != 1) throw Error(ErrorCode::kInput, "slope is not primitive");
  return {s0, t0};
}

}  // namespace

double invariance_defect(const simd::Soa& cloud, const PointMap& g, int degree) {
  const std::size_t n = cloud.size();
  const int dim = cloud.dim();
  if (n == 0 || degree < 1) throw Error(ErrorCode::kInput, "empty cloud or degree < 1");
  simd::Soa image(dim, n);
  std::vector<double> in(dim), out(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) in[d] = cloud.coords[d][i];
    g(in, out);
    for (int d = 0; d < dim; ++d) image.coords[d][i] = out[d];
  }
  const auto chars = characters(dim, degree);
  std::vector<double> defect(chars.size());
  parallel_blocks(chars.size(), [&](std::size_t c) {
    const std::span<const int> k(chars[c]);
    defect[c] = std::abs(simd::character_sum(cloud, k) - simd::character_sum(image, k)) /
                static_cast<double>(n);
  });
  return *std::max_element(defect.begin(), defect.end());
}

double star_discrepancy_1d(std::vector<double> x) {
  if (x.empty()) throw Error(ErrorCode::kInput, "empty sample");
  for (auto& v : x) v -= std::floor(v);
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max({d, (i + 1) / n - x[i], x[i] - i / n});
  }
  return d;
}

double star_discrepancy_2d(std::span<const double> x, std::span<const double> y, int bins) {
  if (x.size() != y.size() || x.empty() || bins < 1) throw Error(ErrorCode::kInput, "bad sample");
  const std::size_t b = static_cast<std::size_t>(bins);
  std::vector<double> cum((b + 1) * (b + 1), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - std::floor(x[i]), v = y[i] - std::floor(y[i]);
    const std::size_t a = std::min(b - 1, static_cast<std::size_t>(u * bins));
    const std::size_t c = std::min(b - 1, static_cast<std::size_t>(v * bins));
    cum[(a + 1) * (b + 1) + (c + 1)] += 1.0;
  }
  for (std::size_t i = 1; i <= b; ++i)
    for (std::size_t j = 1; j <= b; ++j)
      cum[i * (b + 1) + j] += cum[(i - 1) * (b + 1) + j] + cum[i * (b + 1) + j - 1] -
                              cum[(i - 1) * (b + 1) + j - 1];
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 1; i <= b; ++i)
    for (std::size_t j = 1; j <= b; ++j) {
      const double area = static_cast<double>(i) * j / (static_cast<double>(b) * b);
      d = std::max(d, std::abs(cum[i * (b + 1) + j] / n - area));
    }
  return d;
}

CircleEquidistribution circle_equidistribution(std::span<const fiber::Vec2> orbit,
                                               const fiber::CircleDescriptor& d, double gap) {
  if (orbit.empty() || d.k < 1 || !(gap > 0.0)) throw Error(ErrorCode::kInput, "bad circle input");
  const auto ab = bezout(d.p, d.q);
  std::vector<double> transverse(orbit.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    transverse[i] = fiber::frac(d.q * orbit[i][0] - d.p * orbit[i][1]);
  }
  const int periodic[1] = {0};
  const Clusters cl = single_linkage(transverse, 1, gap, periodic);
  if (cl.count != d.k) {
    throw Error(ErrorCode::kClusterCountMismatch,
                "found " + std::to_string(cl.count) + " components, expected " + std::to_string(d.k));
  }
  CircleEquidistribution out;
  out.components = cl.count;
  std::vector<std::vector<double>> along(cl.count);
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    along[cl.label[i]].push_back(ab[0] * orbit[i][0] + ab[1] * orbit[i][1]);
  }
  for (auto& s : along) {
    out.sizes.push_back(s.size());
    out.discrepancy.push_back(star_discrepancy_1d(std::move(s)));
    out.max_discrepancy = std::max(out.max_discrepancy, out.discrepancy.back());
  }
  return out;
}

}  // namespace k3dyn::measures
