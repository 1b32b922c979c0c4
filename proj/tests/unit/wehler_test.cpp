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
#include <random>

#include "k3dyn/error.hpp"
#include "k3dyn/surface_io.hpp"
#include "k3dyn/wehler.hpp"
#include "k3dyn/wehler_exact.hpp"
#include "oracles.hpp"

using namespace k3dyn;
using namespace k3dyn::wehler;
using k3dyn::test::cplx;

namespace {

SurfacePoint affine_point(const Surface& s, cplx x1, cplx x2, cplx x3) {
  SurfacePoint p;
  p.z = {from_affine(x1), from_affine(x2), from_affine(x3)};
  return with_residual(s, p);
}

// Random surface whose fiber over (x1, x2) = (0, 0) along axis 3 is
// A (x3 - r)^2, so (0, 0, r) is a ramification point of sigma_3.
Surface ramified_surface(std::mt19937_64& rng, cplx r) {
  Surface s = random_surface(rng, false);
  const cplx A = s.coeff(0, 0, 2);
  s.coeff(0, 0, 1) = -2.0 * A * r;
  s.coeff(0, 0, 0) = A * r * r;
  return s;
}

}  // namespace

TEST_SUITE("wehler") {
  TEST_CASE("P1 normalization pins the larger component to one") {
    const P1Point z = make_p1(2.0, 1.0);
    CHECK(z.a == cplx(1.0));
    CHECK(z.b == cplx(0.5));
    const P1Point w = make_p1(cplx(0.0, 0.5), 1.0);
    CHECK(w.b == cplx(1.0));
    CHECK(is_infinite(make_p1(1.0, 0.0)));
    CHECK_THROWS_AS(make_p1(0.0, 0.0), Error);
  }

  TEST_CASE("eval_P vanishes at a constructed root") {
    Surface s;
    s.coeff(1, 1, 1) = 1.0;
    s.coeff(0, 0, 0) = -1.0;
    SurfacePoint p;
    p.z = {make_p1(1.0, 1.0), make_p1(1.0, 1.0), make_p1(1.0, 1.0)};
    CHECK(std::abs(eval_P(s, p)) == 0.0);
  }

  TEST_CASE("eval_P at infinity uses the leading coefficients") {
    std::mt19937_64 rng(3);
    const Surface s = random_surface(rng, false);
    const cplx x1(0.3, -0.2), x2(-0.7, 0.1);
    SurfacePoint p;
    p.z = {from_affine(x1), from_affine(x2), make_p1(1.0, 0.0)};
    cplx expect = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) expect += s.coeff(i, j, 2) * std::pow(x1, i) * std::pow(x2, j);
    const cplx v = eval_P(s, p);
    CHECK(std::isfinite(std::abs(v)));
    CHECK(std::abs(v - expect) <= 1e-14 * std::abs(expect));
  }

  TEST_CASE("eval_P matches the monomial-sum oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      const Surface s = random_surface(rng, false);
      const std::array<cplx, 3> x{cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
      SurfacePoint p;
      cplx scale = 1.0;
      for (int t = 0; t < 3; ++t) {
        p.z[t] = from_affine(x[t]);
        if (std::abs(x[t]) > 1.0) scale /= x[t] * x[t];
      }
      const cplx expect = test::naive_eval(s, x[0], x[1], x[2]) * scale;
      CHECK(std::abs(eval_P(s, p) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    }
  }

  TEST_CASE("sampled points lie on the surface") {
    std::mt19937_64 rng(5);
    const Surface s = random_surface(rng, false);
    for (int i = 0; i < 100; ++i) CHECK(sample_point(s, rng).residual <= 1e-10);
  }

  TEST_CASE("sigma_k is an involution on random points") {
    std::mt19937_64 rng(17);
    for (int surf = 0; surf < 5; ++surf) {
      const Surface s = random_surface(rng, surf % 2 == 0);
      for (int i = 0; i < 100; ++i) {
        const SurfacePoint p = sample_point(s, rng);
        for (int k = 0; k < 3; ++k) {
          const SurfacePoint q = sigma(s, p, k);
          CHECK(q.residual <= 1e-10);
          CHECK(test::p1_distance(sigma(s, q, k), p) <= 1e-10);
          for (int t = 0; t < 3; ++t) {
            if (t == k) continue;
            CHECK(std::abs(q.z[t].a * p.z[t].b - q.z[t].b * p.z[t].a) <= 1e-10);
          }
        }
      }
    }
  }

  TEST_CASE("product of the two fiber roots is C/A") {
    std::mt19937_64 rng(23);
    const Surface s = random_surface(rng, false);
    int tested = 0;
    for (int i = 0; i < 200; ++i) {
      const SurfacePoint p = sample_point(s, rng);
      for (int k = 0; k < 3; ++k) {
        const SurfacePoint q = sigma(s, p, k);
        bool finite = true;
        for (int t = 0; t < 3; ++t) finite = finite && !is_infinite(p.z[t]) && !is_infinite(q.z[t]);
        if (!finite) continue;
        const auto x = test::affine(p);
        const auto abc = test::naive_axis_quadratic(s, x, k);
        const cplx prod = x[k] * test::affine(q)[k];
        CHECK(std::abs(prod - abc[2] / abc[0]) <= 1e-10 * std::max(1.0, std::abs(abc[2] / abc[0])));
        ++tested;
      }
    }
    CHECK(tested > 300);
  }

  TEST_CASE("sigma fixes a ramification point") {
    std::mt19937_64 rng(29);
    const cplx r(0.4, -0.3);
    const Surface s = ramified_surface(rng, r);
    const SurfacePoint p = affine_point(s, 0.0, 0.0, r);
    REQUIRE(p.residual <= 1e-14);
    CHECK(test::p1_distance(sigma(s, p, 2), p) <= 1e-7);
  }

  TEST_CASE("vanishing leading coefficient sends the second root to infinity") {
    std::mt19937_64 rng(31);
    Surface s = random_surface(rng, false);
    s.coeff(0, 0, 2) = 0.0;
    const cplx x3 = -s.coeff(0, 0, 0) / s.coeff(0, 0, 1);
    const SurfacePoint p = affine_point(s, 0.0, 0.0, x3);
    const SurfacePoint q = sigma(s, p, 2);
    CHECK(is_infinite(q.z[2]));
    CHECK(test::p1_distance(sigma(s, q, 2), p) <= 1e-12);
  }

  TEST_CASE("fiber line inside the surface raises DegenerateFiberLine") {
    std::mt19937_64 rng(37);
    Surface s = random_surface(rng, false);
    for (int k = 0; k < 3; ++k) s.coeff(0, 0, k) = 0.0;
    const SurfacePoint p = affine_point(s, 0.0, 0.0, 0.3);
    try {
      (void)sigma(s, p, 2);
      FAIL("expected DegenerateFiberLine");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDegenerateFiberLine);
    }
  }

  TEST_CASE("the three expressions of the 2-form agree") {
    std::mt19937_64 rng(41);
    const Surface s = random_surface(rng, false);
    for (int i = 0; i < 300; ++i) {
      const SurfacePoint p = sample_point(s, rng);
      const OmegaValues w = omega(s, p);
      int present = 0;
      for (int a = 0; a < 3; ++a) {
        if (!w.values[a]) continue;
        ++present;
        for (int b = a + 1; b < 3; ++b) {
          if (!w.values[b]) continue;
          const double rel = std::abs(*w.values[a] - *w.values[b]) /
                             std::max(std::abs(*w.values[a]), std::abs(*w.values[b]));
          CHECK(rel <= 1e-9);
        }
      }
      CHECK(present >= 2);
    }
  }

  TEST_CASE("2-form with one vanishing partial returns the other two") {
    std::mt19937_64 rng(43);
    const cplx r(0.2, 0.1);
    const Surface s = ramified_surface(rng, r);
    const SurfacePoint p = affine_point(s, 0.0, 0.0, r);
    const OmegaValues w = omega(s, p);
    CHECK_FALSE(w.values[0].has_value());
    REQUIRE(w.values[1].has_value());
    REQUIRE(w.values[2].has_value());
    CHECK(std::abs(*w.values[1] - *w.values[2]) <= 1e-9 * std::abs(*w.values[1]));
  }

  TEST_CASE("sigma_1 pulls dx1^dx2/P_3 back to its negative") {
    // Oracle: the surface as a graph x3(x1, x2), sigma_1 as (x1, x2) -> (x1', x2)
    // with a finite-difference complex derivative.
    std::mt19937_64 rng(47);
    const Surface s = random_surface(rng, false);
    int tested = 0;
    for (int i = 0; i < 60 && tested < 20; ++i) {
      const SurfacePoint p = sample_point(s, rng);
      const SurfacePoint q = sigma(s, p, 0);
      bool ok = true;
      for (int t = 0; t < 3; ++t) ok = ok && !is_infinite(p.z[t]) && !is_infinite(q.z[t]);
      if (!ok) continue;
      const auto x = test::affine(p);
      const auto y = test::affine(q);
      const double h = 1e-6;
      auto image_x1 = [&](cplx dx1) {
        SurfacePoint pp;
        auto xx = x;
        xx[0] += dx1;
        // Move along the surface: re-solve x3 near the old root.
        cplx x3 = xx[2];
        for (int it = 0; it < 20; ++it) {
          const auto g = test::naive_gradient(s, {xx[0], xx[1], x3});
          x3 -= test::naive_eval(s, xx[0], xx[1], x3) / g[2];
        }
        pp.z = {from_affine(xx[0]), from_affine(xx[1]), from_affine(x3)};
        return test::affine(sigma(s, with_residual(s, pp), 0))[0];
      };
      const cplx jac = (image_x1(h) - image_x1(-h)) / (2.0 * h);
      const cplx o_p = 1.0 / test::naive_gradient(s, x)[2];
      const cplx o_q = 1.0 / test::naive_gradient(s, y)[2];
      CHECK(std::abs(o_q * jac + o_p) <= 1e-6 * std::abs(o_p));
      ++tested;
    }
    CHECK(tested >= 10);
  }

  TEST_CASE("fibration_project returns the normalized coordinate") {
    SurfacePoint p;
    p.z = {make_p1(0.0, 1.0), make_p1(1.0, 1.0), make_p1(2.0, 1.0)};
    const P1Point z = fibration_project(p, 2);
    CHECK(z.a == cplx(1.0));
    CHECK(z.b == cplx(0.5));
  }

  TEST_CASE("sigma_i sigma_j preserves the third fibration but sigma_k moves it") {
    std::mt19937_64 rng(53);
    const Surface s = random_surface(rng, false);
    bool moved = false;
    for (int n = 0; n < 100; ++n) {
      const SurfacePoint p = sample_point(s, rng);
      for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        const SurfacePoint g = sigma(s, sigma(s, p, j), i);
        const P1Point a = fibration_project(g, k), b = fibration_project(p, k);
        CHECK(std::abs(a.a * b.b - a.b * b.a) <= 1e-10);
        const P1Point c = fibration_project(sigma(s, p, k), k);
        if (std::abs(c.a * b.b - c.b * b.a) > 1e-3) moved = true;
      }
    }
    CHECK(moved);
  }

  TEST_CASE("tangency residual is positive generically and vanishes on the ramification curve") {
    std::mt19937_64 rng(59);
    const Surface s = random_surface(rng, false);
    for (int i = 0; i < 50; ++i) CHECK(tangency_residual(s, sample_point(s, rng), 0, 1) > 0.0);
    const cplx r(0.1, 0.5);
    const Surface t = ramified_surface(rng, r);
    const SurfacePoint p = affine_point(t, 0.0, 0.0, r);
    CHECK(tangency_residual(t, p, 0, 1) <= 1e-6);
    CHECK_THROWS_AS(tangency_residual(t, p, 1, 1), Error);
  }

  TEST_CASE("tangency residual transforms with the chart Jacobian") {
    // Swapping x_t -> 1/x_t turns grad P into (P_s / x_t^2 for s != t, -P_t)
    // on the surface.
    std::mt19937_64 rng(61);
    const Surface s = random_surface(rng, false);
    int tested = 0;
    for (int i = 0; i < 200 && tested < 40; ++i) {
      const SurfacePoint p = sample_point(s, rng);
      bool finite = true;
      for (int t = 0; t < 3; ++t) finite = finite && !is_infinite(p.z[t]) && std::abs(p.z[t].a) > 0.1;
      if (!finite) continue;
      const auto x = test::affine(p);
      const auto g = test::naive_gradient(s, x);
      for (int t = 0; t < 3; ++t) {
        std::array<cplx, 3> g2;
        for (int u = 0; u < 3; ++u) g2[u] = u == t ? -g[u] : g[u] / (x[t] * x[t]);
        auto resid = [](const std::array<cplx, 3>& v, int k) {
          return std::abs(v[k]) / std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
        };
        Chart affine_chart, swapped;
        swapped.side[t] = Side::kInfinite;
        for (int gi = 0; gi < 3; ++gi) {
          const int hi = (gi + 1) % 3, k = 3 - gi - hi;
          const double a = tangency_residual_in_chart(s, p, gi, hi, affine_chart);
          const double b = tangency_residual_in_chart(s, p, gi, hi, swapped);
          CHECK(a == doctest::Approx(resid(g, k)).epsilon(1e-7));
          CHECK(b == doctest::Approx(resid(g2, k)).epsilon(1e-7));
        }
      }
      ++tested;
    }
    CHECK(tested >= 10);
  }

  TEST_CASE("words reduce and invert") {
    CHECK(AutWord::parse("1,1").letters.empty());
    CHECK(AutWord::parse("1,2,2,3").str() == "1,3");
    CHECK(AutWord::parse("1,2,3").inverse().str() == "3,2,1");
    CHECK_THROWS_AS(AutWord::parse("1,4"), Error);
  }

  TEST_CASE("the identity word leaves the orbit constant") {
    std::mt19937_64 rng(67);
    const Surface s = random_surface(rng, false);
    const SurfacePoint p0 = sample_point(s, rng);
    double worst = 0.0;
    iterate_word(s, AutWord::parse("1,1"), p0, 50,
                 [&](std::size_t, const SurfacePoint& p) { worst = std::max(worst, test::p1_distance(p, p0)); });
    CHECK(worst == 0.0);
  }

  TEST_CASE("real orbits stay real and on the surface") {
    std::mt19937_64 rng(71);
    const Surface s = random_real_surface_through_origin(rng);
    const auto pts = real_locus_sample(s, 4, rng);
    REQUIRE_FALSE(pts.empty());
    for (const auto& p : pts) {
      const OrbitStats st = iterate_word(s, AutWord::parse("1,2,3"), p, 20000);
      CHECK(st.max_imag <= 1e-9);
      CHECK(st.max_residual <= 1e-8);
    }
  }

  TEST_CASE("real locus samples are real points of the surface") {
    std::mt19937_64 rng(73);
    const Surface s = random_real_surface_through_origin(rng);
    const auto pts = real_locus_sample(s, 200, rng);
    CHECK(pts.size() > 0);
    for (const auto& p : pts) {
      CHECK(p.residual <= 1e-10);
      CHECK(max_imag(p) == 0.0);
    }
    Surface complex_surface = random_surface(rng, false);
    CHECK_THROWS_AS(real_locus_sample(complex_surface, 5, rng), Error);
  }

  TEST_CASE("smoothness heuristic accepts random surfaces and refutes a nodal one") {
    std::mt19937_64 rng(79);
    const Surface s = random_surface(rng, false);
    CHECK(certify_smooth(s, rng).smooth);
    // x1^2 + x2^2 + x3^2 - x1^2 x2^2 x3^2 has a node at the origin.
    Surface n;
    n.coeff(2, 0, 0) = 1.0;
    n.coeff(0, 2, 0) = 1.0;
    n.coeff(0, 0, 2) = 1.0;
    n.coeff(2, 2, 2) = -1.0;
    const auto rep = certify_smooth(n, rng);
    CHECK_FALSE(rep.smooth);
    CHECK_FALSE(rep.singular_witnesses.empty());
  }

  TEST_CASE("exact mode: sigma_k squared is the identity over Q(i)") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 20; ++trial) {
      ExactSurface s;
      ExactPoint p;
      random_exact_instance(rng, &s, &p);
      REQUIRE(eval_exact(s, p).is_zero());
      for (int k = 0; k < 3; ++k) {
        const ExactPoint q = sigma_exact(s, p, k);
        CHECK(eval_exact(s, q).is_zero());
        CHECK(sigma_exact(s, q, k) == p);
      }
    }
  }

  TEST_CASE("rational parsing") {
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("-4") == Rational(-4));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("x"), Error);
  }

  TEST_CASE("surface JSON round trip and validation") {
    std::mt19937_64 rng(89);
    const Surface s = random_surface(rng, false);
    const Surface t = surface_from_json(surface_to_json(s));
    for (int i = 0; i < 27; ++i) CHECK(t.c[i] == s.c[i]);
    nlohmann::json j = {{"coeffs", nlohmann::json::array()}, {"real", true}};
    for (int i = 0; i < 27; ++i) j["coeffs"].push_back(i == 0 ? "-1/3" : "1");
    const Surface r = surface_from_json(j);
    CHECK(r.real_coefficients);
    CHECK(r.c[0].real() == doctest::Approx(-1.0 / 3.0));
    CHECK(exact_surface_from_json(j).has_value());
    j["coeffs"][3] = nlohmann::json::array({1.0, 2.0});
    CHECK_THROWS_AS(surface_from_json(j), Error);
    j["coeffs"].erase(0);
    CHECK_THROWS_AS(surface_from_json(j), Error);
  }
}
