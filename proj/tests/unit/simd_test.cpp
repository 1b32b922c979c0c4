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

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include "k3dyn/simd/kernels.hpp"

using namespace k3dyn::simd;

namespace {

Soa random_cloud(int dim, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Soa s(dim, n);
  for (auto& c : s.coords)
    for (auto& x : c) x = u(rng);
  return s;
}

// Direct O(n) oracle with std::polar.
std::complex<double> naive_character_sum(const Soa& pts, const std::vector<int>& freq) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double phase = 0.0;
    for (int d = 0; d < pts.dim(); ++d) phase += freq[d] * pts.coords[d][i];
    acc += std::polar(1.0, 2.0 * M_PI * phase);
  }
  return acc;
}

double wrap(double d) { return d - std::round(d); }

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("unit phasor matches std::polar") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 10000; ++i) {
      const double t = u(rng);
      CHECK(std::abs(unit_phasor(t) - std::polar(1.0, 2.0 * M_PI * t)) <= 1e-13);
    }
    CHECK(std::abs(unit_phasor(0.25) - std::complex<double>(0.0, 1.0)) <= 1e-15);
  }

  TEST_CASE("character sums agree across kernels and with the oracle") {
    for (int dim : {1, 3, 4}) {
      for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{7}, std::size_t{1001}}) {
        const Soa s = random_cloud(dim, n, 11 + n + dim);
        std::vector<int> freq(dim);
        for (int d = 0; d < dim; ++d) freq[d] = (d % 2 ? -1 : 1) * (d + 2);
        const auto ref = naive_character_sum(s, freq);
        const auto a = scalar::character_sum(s, freq);
        CHECK(std::abs(a - ref) <= 1e-11 * std::max<double>(1.0, double(n)));
        if (isa_available(Isa::kAvx2)) {
          const auto b = avx2::character_sum(s, freq);
          CHECK(std::abs(a - b) <= 1e-12 * std::max<double>(1.0, double(n)));
        }
      }
    }
  }

  TEST_CASE("neighbor counts are identical across kernels") {
    const std::vector<double> radii2{0.001, 0.01, 0.05, 0.2};
    for (bool periodic : {false, true}) {
      for (std::size_t n : {std::size_t{5}, std::size_t{333}}) {
        const Soa s = random_cloud(3, n, 17 + n);
        std::vector<std::uint32_t> a(n * radii2.size()), b(n * radii2.size()), ref(n * radii2.size());
        scalar::neighbor_counts(s, radii2, periodic, 0, n, a.data());
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double d2 = 0.0;
            for (int d = 0; d < 3; ++d) {
              double x = s.coords[d][i] - s.coords[d][j];
              if (periodic) x = wrap(x);
              d2 += x * x;
            }
            for (std::size_t r = 0; r < radii2.size(); ++r) ref[i * radii2.size() + r] += d2 < radii2[r];
          }
        CHECK(a == ref);
        if (isa_available(Isa::kAvx2)) {
          avx2::neighbor_counts(s, radii2, periodic, 0, n, b.data());
          CHECK(a == b);
        }
      }
    }
  }

  TEST_CASE("neighbor counts over a row range") {
    const std::vector<double> radii2{0.02, 0.1};
    const Soa s = random_cloud(2, 200, 23);
    std::vector<std::uint32_t> all(200 * 2), part(50 * 2);
    neighbor_counts(s, radii2, false, 0, 200, all.data());
    neighbor_counts(s, radii2, false, 100, 150, part.data());
    for (std::size_t i = 0; i < part.size(); ++i) CHECK(part[i] == all[200 + i]);
  }

  TEST_CASE("min_dist2 agrees across kernels") {
    for (bool periodic : {false, true}) {
      const Soa q = random_cloud(4, 129, 29), set = random_cloud(4, 517, 31);
      std::vector<double> a(129), b(129);
      scalar::min_dist2(q, set, periodic, a.data());
      for (std::size_t i = 0; i < 129; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < 517; ++j) {
          double d2 = 0.0;
          for (int d = 0; d < 4; ++d) {
            double x = q.coords[d][i] - set.coords[d][j];
            if (periodic) x = wrap(x);
            d2 += x * x;
          }
          best = std::min(best, d2);
        }
        CHECK(a[i] == doctest::Approx(best).epsilon(1e-14));
      }
      if (isa_available(Isa::kAvx2)) {
        avx2::min_dist2(q, set, periodic, b.data());
        for (std::size_t i = 0; i < 129; ++i) CHECK(a[i] == b[i]);
      }
    }
    const Soa q = random_cloud(2, 3, 1), empty(2, 0);
    std::vector<double> out(3);
    min_dist2(q, empty, false, out.data());
    for (double x : out) CHECK(std::isinf(x));
  }

  TEST_CASE("dispatch honors force_isa") {
    CHECK(isa_available(Isa::kScalar));
    force_isa(Isa::kScalar);
    CHECK(active_isa() == Isa::kScalar);
    const Soa s = random_cloud(2, 100, 37);
    const std::vector<int> f{1, 2};
    CHECK(character_sum(s, f) == scalar::character_sum(s, f));
    if (isa_available(Isa::kAvx2)) {
      force_isa(Isa::kAvx2);
      CHECK(active_isa() == Isa::kAvx2);
      CHECK(character_sum(s, f) == avx2::character_sum(s, f));
    }
    reset_isa();
    CHECK(std::string(isa_name(active_isa())).size() > 0);
  }
}
