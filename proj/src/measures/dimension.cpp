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
#include <random>

#include "k3dyn/error.hpp"
#include "k3dyn/measures.hpp"
#include "k3dyn/parallel.hpp"

namespace k3dyn::measures {
namespace {

struct Fit {
  double slope = 0.0, r2 = 1.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  Fit f;
  const double vx = m * sxx - sx * sx, vy = m * syy - sy * sy, cxy = m * sxy - sx * sy;
  f.slope = cxy / vx;
  // A flat curve (all pairs inside every radius) is a perfect fit of slope 0.
  f.r2 = vy <= 1e-24 * std::max(1.0, m * syy) ? 1.0 : cxy * cxy / (vx * vy);
  if (std::abs(f.slope) < 1e-12) f.slope = 0.0;
  return f;
}

}  // namespace

DimensionEstimate correlation_dimension(const simd::Soa& cloud, const DimensionOptions& opt) {
  const std::size_t n = cloud.size();
  if (n < 2) throw Error(ErrorCode::kInput, "need at least two points");
  if (!(opt.r_min > 0.0) || !(opt.r_max > opt.r_min) || opt.radii < 3) {
    throw Error(ErrorCode::kInput, "bad radii schedule");
  }
  const std::size_t rows = std::min(opt.reference_rows, n);
  const std::size_t nr = static_cast<std::size_t>(opt.radii);
  DimensionEstimate est;
  std::vector<double> r2(nr);
  for (std::size_t r = 0; r < nr; ++r) {
    const double t = static_cast<double>(r) / (nr - 1);
    est.radii.push_back(opt.r_min * std::pow(opt.r_max / opt.r_min, t));
    r2[r] = est.radii.back() * est.radii.back();
  }
  // Rows in blocks of 16 so the reduction order does not depend on threads.
  constexpr std::size_t kBlock = 16;
  const std::size_t blocks = (rows + kBlock - 1) / kBlock;
  std::vector<std::uint32_t> counts(rows * nr);
  parallel_blocks(blocks, [&](std::size_t b) {
    const std::size_t lo = b * kBlock, hi = std::min(rows, lo + kBlock);
    simd::neighbor_counts(cloud, r2, opt.periodic, lo, hi, counts.data() + lo * nr);
  });

  auto curve = [&](const std::vector<std::size_t>& pick, std::vector<double>* c_out) {
    std::vector<double> lx, ly;
    std::vector<double> sums(nr, 0.0);
    for (std::size_t i : pick)
      for (std::size_t r = 0; r < nr; ++r) sums[r] += counts[i * nr + r];
    for (std::size_t r = 0; r < nr; ++r) {
      const double c = sums[r] / (static_cast<double>(pick.size()) * (n - 1));
      if (c_out) c_out->push_back(c);
      if (c <= 0.0) continue;
      lx.push_back(std::log(est.radii[r]));
      ly.push_back(std::log(c));
    }
    return lx.size() >= 3 ? std::optional<Fit>(least_squares(lx, ly)) : std::nullopt;
  };

  std::vector<std::size_t> all(rows);
  for (std::size_t i = 0; i < rows; ++i) all[i] = i;
  const auto fit = curve(all, &est.correlation);
  if (!fit) throw Error(ErrorCode::kInsufficientScaling, "too few radii with neighbours");
  est.value = fit->slope;
  est.r2 = fit->r2;
  if (est.r2 < opt.min_r2) {
    throw Error(ErrorCode::kInsufficientScaling,
                "log-log fit R^2 = " + std::to_string(est.r2) + " below " + std::to_string(opt.min_r2));
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, rows - 1);
  std::vector<double> boot;
  for (int b = 0; b < opt.bootstrap; ++b) {
    std::vector<std::size_t> sel(rows);
    for (auto& s : sel) s = pick(rng);
    if (const auto f = curve(sel, nullptr)) boot.push_back(f->slope);
  }
  if (boot.empty()) {
    est.lo = est.hi = est.value;
  } else {
    std::sort(boot.begin(), boot.end());
    const auto q = [&](double p) {
      return boot[std::min(boot.size() - 1, static_cast<std::size_t>(p * (boot.size() - 1) + 0.5))];
    };
    est.lo = std::min(est.value, q(0.025));
    est.hi = std::max(est.value, q(0.975));
  }
  return est;
}

}  // namespace k3dyn::measures
