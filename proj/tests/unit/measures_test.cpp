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
#include <functional>
#include <random>

#include "k3dyn/cluster.hpp"
#include "k3dyn/error.hpp"
#include "k3dyn/measures.hpp"

using namespace k3dyn;
using namespace k3dyn::measures;

namespace {

simd::Soa uniform_cube(int dim, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  simd::Soa s(dim, n);
  for (std::size_t i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d) s.coords[d][i] = u(rng);
  return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kInput;
}

TorusSystem sl2z() { return TorusSystem{{IMat2{{{1, 1}, {0, 1}}}, IMat2{{{1, 0}, {1, 1}}}}}; }

// Brute-force 1-D star discrepancy over the sorted sample and its gaps.
double naive_star_1d(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = double(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    // F_N jumps at x[i]; compare just before and at the jump.
    d = std::max(d, std::abs(double(i) / n - x[i]));
    d = std::max(d, std::abs(double(i + 1) / n - x[i]));
  }
  return d;
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("correlation dimension of a flat 2-torus in R^4") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    simd::Soa s(4, 20000);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double a = u(rng), b = u(rng);
      s.coords[0][i] = std::cos(a);
      s.coords[1][i] = std::sin(a);
      s.coords[2][i] = std::cos(b);
      s.coords[3][i] = std::sin(b);
    }
    const DimensionEstimate e = correlation_dimension(s);
    CHECK(e.value == doctest::Approx(2.0).epsilon(0.075));
    CHECK(e.lo <= e.value);
    CHECK(e.hi >= e.value);
    CHECK(e.r2 >= 0.98);
    for (std::size_t r = 1; r < e.correlation.size(); ++r) CHECK(e.correlation[r] >= e.correlation[r - 1]);
  }

  TEST_CASE("correlation dimension of a repeated point is zero") {
    simd::Soa s(4, 10000);
    for (auto& c : s.coords) std::fill(c.begin(), c.end(), 0.25);
    const DimensionEstimate e = correlation_dimension(s);
    CHECK(e.value == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("correlation dimension of a uniform 4-cube") {
    const simd::Soa s = uniform_cube(4, 20000, 53);
    DimensionOptions periodic;
    periodic.periodic = true;
    CHECK(correlation_dimension(s, periodic).value == doctest::Approx(4.0).epsilon(0.05));
    DimensionOptions small;
    small.r_min = 0.02;
    small.r_max = 0.1;
    small.reference_rows = 4000;
    CHECK(correlation_dimension(s, small).value == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("correlation dimension rejects a broken scaling range") {
    // Two far clusters: C(r) is flat over the middle radii.
    simd::Soa s(2, 10000);
    std::mt19937_64 rng(57);
    std::normal_distribution<double> g(0.0, 1e-3);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s.coords[0][i] = (i % 2 ? 0.0 : 0.2) + g(rng);
      s.coords[1][i] = g(rng);
    }
    DimensionOptions opt;
    opt.r_min = 1e-4;
    opt.r_max = 0.4;
    CHECK(code_of([&] { correlation_dimension(s, opt); }) == ErrorCode::kInsufficientScaling);
    CHECK(code_of([] { correlation_dimension(simd::Soa(2, 1)); }) == ErrorCode::kInput);
  }

  TEST_CASE("invariance defect of an orbit under its own map telescopes") {
    const double a = std::sqrt(2.0) - 1.0, b = std::sqrt(3.0) - 1.0;
    const std::size_t n = 5000;
    simd::Soa s(2, n);
    double x = 0.1, y = 0.7;
    for (std::size_t i = 0; i < n; ++i) {
      s.coords[0][i] = x;
      s.coords[1][i] = y;
      x = std::fmod(x + a, 1.0);
      y = std::fmod(y + b + x, 1.0);
    }
    const PointMap g = [&](std::span<const double> in, std::span<double> out) {
      out[0] = std::fmod(in[0] + a, 1.0);
      out[1] = std::fmod(in[1] + b + out[0], 1.0);
    };
    CHECK(invariance_defect(s, g, 3) <= 2.0 / double(n) + 1e-12);
  }

  TEST_CASE("invariance defect of Haar samples under a translation") {
    const std::size_t n = 40000;
    const simd::Soa s = uniform_cube(2, n, 59);
    const PointMap g = [](std::span<const double> in, std::span<double> out) {
      out[0] = in[0] + 0.3141;
      out[1] = in[1] + 0.2718;
    };
    // Each character difference has standard deviation at most 2 / sqrt(N).
    CHECK(invariance_defect(s, g, 3) <= 3.0 * 2.0 / std::sqrt(double(n)) * 1.5);
    const PointMap doubling = [](std::span<const double> in, std::span<double> out) {
      out[0] = 2.0 * in[0];
      out[1] = 2.0 * in[1];
    };
    CHECK(std::isfinite(invariance_defect(s, doubling, 3)));
  }

  TEST_CASE("star discrepancy against brute force and known values") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(500);
    for (auto& v : x) v = u(rng);
    CHECK(star_discrepancy_1d(x) == doctest::Approx(naive_star_1d(x)).epsilon(1e-12));
    // Centered grid: D* = 1 / (2N).
    std::vector<double> grid(100);
    for (int i = 0; i < 100; ++i) grid[i] = (i + 0.5) / 100.0;
    CHECK(star_discrepancy_1d(grid) == doctest::Approx(0.005));
    CHECK(star_discrepancy_1d({0.0, 0.0}) == doctest::Approx(1.0));

    const simd::Soa s = uniform_cube(2, 100000, 67);
    CHECK(star_discrepancy_2d(s.coords[0], s.coords[1]) <= 0.01);
    std::vector<double> half(1000, 0.25);
    CHECK(star_discrepancy_2d(half, half) >= 0.9);
  }

  TEST_CASE("circle equidistribution on one and two circles") {
    const double a = std::sqrt(2.0) - 1.0;
    std::vector<fiber::Vec2> one, two;
    for (int n = 0; n < 10000; ++n) {
      one.push_back({fiber::frac(0.2 + n * a), 0.3});
      two.push_back({fiber::frac(0.2 + n * a), fiber::frac(0.3 + 0.5 * n)});
    }
    const auto r1 = circle_equidistribution(one, {1, 1, 0});
    CHECK(r1.components == 1);
    CHECK(r1.max_discrepancy <= 0.02);
    const auto r2 = circle_equidistribution(two, {2, 1, 0});
    CHECK(r2.components == 2);
    CHECK(r2.sizes[0] + r2.sizes[1] == 10000);
    CHECK(r2.max_discrepancy <= 0.03);
    CHECK(code_of([&] { circle_equidistribution(two, {1, 1, 0}); }) == ErrorCode::kClusterCountMismatch);

    // Slope (1, 1): the transverse coordinate x - y is constant.
    std::vector<fiber::Vec2> diag;
    for (int n = 0; n < 10000; ++n) diag.push_back({fiber::frac(n * a), fiber::frac(n * a + 0.4)});
    CHECK(circle_equidistribution(diag, {1, 1, 1}).max_discrepancy <= 0.02);

    // Torsion input: finitely many points on one circle.
    std::vector<fiber::Vec2> torsion;
    for (int n = 0; n < 1000; ++n) torsion.push_back({fiber::frac(n / 3.0), fiber::frac(n / 7.0)});
    CHECK(code_of([&] { circle_equidistribution(torsion, {1, 1, 0}); }) == ErrorCode::kClusterCountMismatch);
  }

  TEST_CASE("single linkage clustering") {
    const std::vector<double> pts{0.0, 0.0, 0.05, 0.0, 0.5, 0.5, 0.52, 0.5, 0.98, 0.0};
    const Clusters c = single_linkage(pts, 2, 0.06);
    CHECK(c.count == 3);
    CHECK(c.label[0] == c.label[1]);
    CHECK(c.label[2] == c.label[3]);
    CHECK(c.label[0] == 0);
    const int periodic[1] = {0};
    const Clusters w = single_linkage(pts, 2, 0.06, periodic);
    CHECK(w.count == 2);
    CHECK(w.label[4] == w.label[0]);
  }

  TEST_CASE("torus orbits stay in the unit cube and follow the group action") {
    bool revisit = true;
    std::size_t distinct = 0;
    const simd::Soa o = torus_orbit(sl2z(), {0.1, 0.0, 0.3, 0.0}, 1000, 20, 3, &revisit, &distinct);
    CHECK(o.size() == 1001);
    for (const auto& c : o.coords)
      for (double x : c) {
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
      }
    for (std::size_t i = 0; i < o.size(); ++i) {
      CHECK(o.coords[1][i] == 0.0);
      CHECK(o.coords[3][i] == 0.0);
    }
    CHECK(distinct <= 1001);
    CHECK(code_of([] { torus_orbit(sl2z(), {0, 0, 0, 0}, 10, 0, 1); }) == ErrorCode::kInput);
  }

  TEST_CASE("closure of a rational torus point is finite") {
    ClosureOptions opt;
    opt.budget = 20000;
    const auto r = classify_orbit_closure(sl2z(), std::array<double, 4>{1.0 / 3.0, 0.2, 2.0 / 3.0, 0.4}, opt);
    CHECK(r.label == ClosureLabel::kFinite);
    CHECK(r.revisit);
    // Orbit of a point of order 15 in (Z/15)^4 under SL2 acting on pairs.
    CHECK(r.distinct_points <= 15 * 15 * 15 * 15);
  }

  TEST_CASE("closure of a real torus point is the real torus") {
    ClosureOptions opt;
    opt.budget = 20000;
    simd::Soa cloud;
    const auto r = classify_orbit_closure(
        sl2z(), std::array<double, 4>{std::sqrt(2.0) - 1.0, 0.0, std::sqrt(3.0) - 1.0, 0.0}, opt, &cloud);
    CHECK(r.label == ClosureLabel::kTotallyRealSurface);
    CHECK(r.candidate == "A(R)");
    CHECK(r.candidate_distance <= 1e-6);
    CHECK(r.haar_discrepancy >= 0.0);
    CHECK(r.haar_discrepancy <= 0.05);
    REQUIRE(r.dimension.has_value());
    CHECK(r.dimension->value == doctest::Approx(2.0).epsilon(0.125));
    CHECK(r.transversality > opt.transversality);
    CHECK(cloud.size() == opt.budget + 1);
  }

  TEST_CASE("closure of a Q-independent torus point is dense") {
    // The delta-cover needs about 1e6 points: each of the 10^4 grid nodes
    // expects N vol(B_0.05) = 31 hits.
    ClosureOptions opt;
    opt.budget = 1000000;
    const auto r = classify_orbit_closure(
        sl2z(), std::array<double, 4>{std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, std::sqrt(5.0) - 2.0,
                                      std::sqrt(7.0) - 2.0},
        opt);
    CHECK(r.label == ClosureLabel::kDense);
    CHECK(r.delta_cover);
    CHECK(r.candidate.empty());
    REQUIRE(r.dimension.has_value());
    CHECK(r.dimension->value == doctest::Approx(4.0).epsilon(0.0625));
    CHECK_FALSE(r.dimension_three_anomaly);
  }

  TEST_CASE("closure labels agree under budget doubling") {
    const std::array<double, 4> start{std::sqrt(2.0) - 1.0, 0.0, std::sqrt(3.0) - 1.0, 0.0};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      ClosureOptions a;
      a.budget = 20000;
      a.seed = seed;
      ClosureOptions b = a;
      b.budget = 40000;
      CHECK(classify_orbit_closure(sl2z(), start, a).label == classify_orbit_closure(sl2z(), start, b).label);
    }
  }

  TEST_CASE("closure input checks") {
    ClosureOptions opt;
    opt.budget = 0;
    CHECK(code_of([&] { classify_orbit_closure(sl2z(), std::array<double, 4>{}, opt); }) ==
          ErrorCode::kInput);
    CHECK(code_of([] { classify_orbit_closure(sl2z(), wehler::SurfacePoint{}); }) == ErrorCode::kInput);
    CHECK(std::string(closure_label_name(ClosureLabel::kDense)) == "Dense");
  }
}
