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
#include <atomic>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "k3dyn/error.hpp"
#include "k3dyn/fiber.hpp"

namespace k3dyn::fiber {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Real P1 points are written [sin t : cos t] with t in R / pi Z.
double angle_of(const wehler::P1Point& z) {
  double t = std::atan2(z.a.real(), z.b.real());
  t = std::fmod(t, kPi);
  if (t < 0.0) t += kPi;
  return t;
}

double torus_delta(double d) { return std::remainder(d, kPi); }

std::array<int, 2> free_axes(int axis) {
  return {axis == 0 ? 1 : 0, axis == 2 ? 1 : 2};
}

struct FiberFunction {
  // Coefficients of the (2,2) form in the two free axes, real parts only.
  std::array<std::array<double, 3>, 3> c{};

  FiberFunction(const wehler::Surface& s, int axis, const wehler::P1Point& fiber) {
    const double fa = fiber.a.real(), fb = fiber.b.real();
    const std::array<double, 3> m{fb * fb, fa * fb, fa * fa};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const int e[3] = {i, j, k};
          const auto ax = free_axes(axis);
          c[e[ax[0]]][e[ax[1]]] += s.coeff(i, j, k).real() * m[e[axis]];
        }
  }

  // Value and gradient in (t1, t2).
  std::array<double, 3> eval(double t1, double t2) const {
    const double s1 = std::sin(t1), c1 = std::cos(t1), s2 = std::sin(t2), c2 = std::cos(t2);
    // mono_e = sin^e cos^(2-e) and its derivative.
    const std::array<double, 3> m1{c1 * c1, s1 * c1, s1 * s1};
    const std::array<double, 3> d1{-2 * s1 * c1, c1 * c1 - s1 * s1, 2 * s1 * c1};
    const std::array<double, 3> m2{c2 * c2, s2 * c2, s2 * s2};
    const std::array<double, 3> d2{-2 * s2 * c2, c2 * c2 - s2 * s2, 2 * s2 * c2};
    double f = 0, g1 = 0, g2 = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        f += c[i][j] * m1[i] * m2[j];
        g1 += c[i][j] * d1[i] * m2[j];
        g2 += c[i][j] * m1[i] * d2[j];
      }
    return {f, g1, g2};
  }

  // Newton projection along the gradient.
  bool correct(Vec2& t, int steps = 6) const {
    for (int it = 0; it < steps; ++it) {
      const auto v = eval(t[0], t[1]);
      const double g2 = v[1] * v[1] + v[2] * v[2];
      if (!(g2 > 0.0)) return false;
      if (std::abs(v[0]) <= 1e-15 * std::sqrt(g2)) return true;
      t[0] -= v[0] * v[1] / g2;
      t[1] -= v[0] * v[2] / g2;
    }
    const auto v = eval(t[0], t[1]);
    return std::abs(v[0]) <= 1e-11 * std::hypot(v[1], v[2]);
  }
};

struct Buckets {
  static constexpr int kCells = 256;
  std::unordered_map<int, std::vector<int>> map;
  static int cell(double t) {
    int c = static_cast<int>(std::floor(t / kPi * kCells));
    return ((c % kCells) + kCells) % kCells;
  }
  void build(const std::vector<Vec2>& pts) {
    map.clear();
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      map[cell(pts[i][0]) * kCells + cell(pts[i][1])].push_back(i);
    }
  }
};

// Nearest loop sample and the interpolated position along the loop.
struct Locate {
  int index = -1;
  double dist = std::numeric_limits<double>::infinity();
  double phi = 0.0;
};

Locate locate(const RealCircle& c, Vec2 t) {
  // Keyed on the trace id, not the address: successive circles reuse stack slots.
  static thread_local std::uint64_t cached = 0;
  static thread_local Buckets buckets;
  if (c.id == 0 || cached != c.id) {
    buckets.build(c.theta);
    cached = c.id;
  }
  Locate best;
  const int ci = Buckets::cell(t[0]), cj = Buckets::cell(t[1]);
  for (int radius = 1; radius <= Buckets::kCells / 2 && best.index < 0; radius *= 2) {
    for (int di = -radius; di <= radius; ++di)
      for (int dj = -radius; dj <= radius; ++dj) {
        const int a = ((ci + di) % Buckets::kCells + Buckets::kCells) % Buckets::kCells;
        const int b = ((cj + dj) % Buckets::kCells + Buckets::kCells) % Buckets::kCells;
        auto it = buckets.map.find(a * Buckets::kCells + b);
        if (it == buckets.map.end()) continue;
        for (int idx : it->second) {
          const double d = std::hypot(torus_delta(t[0] - c.theta[idx][0]),
                                      torus_delta(t[1] - c.theta[idx][1]));
          if (d < best.dist) {
            best.dist = d;
            best.index = idx;
          }
        }
      }
  }
  if (best.index < 0) return best;
  // Project onto the adjacent segments; the loop is closed.
  const int n = static_cast<int>(c.theta.size());
  double phi = c.measure[best.index];
  double dmin = best.dist;
  for (int side : {-1, 1}) {
    const int i0 = side < 0 ? (best.index - 1 + n) % n : best.index;
    const int i1 = (i0 + 1) % n;
    const double ex = torus_delta(c.theta[i1][0] - c.theta[i0][0]);
    const double ey = torus_delta(c.theta[i1][1] - c.theta[i0][1]);
    const double px = torus_delta(t[0] - c.theta[i0][0]);
    const double py = torus_delta(t[1] - c.theta[i0][1]);
    const double len2 = ex * ex + ey * ey;
    if (!(len2 > 0.0)) continue;
    const double u = std::clamp((px * ex + py * ey) / len2, 0.0, 1.0);
    const double d = std::hypot(px - u * ex, py - u * ey);
    if (d <= dmin) {
      dmin = d;
      const double m0 = c.measure[i0];
      const double m1 = i1 == 0 ? 1.0 : c.measure[i1];
      phi = m0 + u * (m1 - m0);
    }
  }
  best.dist = dmin;
  best.phi = frac(phi);
  return best;
}

Vec2 angles(const wehler::SurfacePoint& p, int axis) {
  const auto ax = free_axes(axis);
  return {angle_of(p.z[ax[0]]), angle_of(p.z[ax[1]])};
}

}  // namespace

double RealCircle::coordinate(const wehler::SurfacePoint& p) const {
  return locate(*this, angles(p, axis)).phi;
}

double RealCircle::distance(const wehler::SurfacePoint& p) const {
  const double fiber_gap = std::abs(torus_delta(angle_of(p.z[axis]) - angle_of(fiber)));
  return std::max(fiber_gap, locate(*this, angles(p, axis)).dist);
}

wehler::SurfacePoint RealCircle::point_at(const wehler::Surface& s, double phi) const {
  phi = frac(phi);
  const auto it = std::upper_bound(measure.begin(), measure.end(), phi);
  const int n = static_cast<int>(theta.size());
  const int i0 = static_cast<int>(std::distance(measure.begin(), it)) - 1;
  const int i1 = (i0 + 1) % n;
  const double m1 = i1 == 0 ? 1.0 : measure[i1];
  const double u = (phi - measure[i0]) / (m1 - measure[i0]);
  Vec2 t{theta[i0][0] + u * torus_delta(theta[i1][0] - theta[i0][0]),
         theta[i0][1] + u * torus_delta(theta[i1][1] - theta[i0][1])};
  FiberFunction(s, axis, fiber).correct(t);
  const auto ax = free_axes(axis);
  wehler::SurfacePoint p;
  p.z[axis] = fiber;
  p.z[ax[0]] = wehler::make_p1(std::sin(t[0]), std::cos(t[0]));
  p.z[ax[1]] = wehler::make_p1(std::sin(t[1]), std::cos(t[1]));
  return wehler::with_residual(s, p);
}

RealCircle trace_real_circle(const wehler::Surface& s, const wehler::SurfacePoint& p,
                             int axis, double step) {
  if (!s.real_coefficients) throw Error(ErrorCode::kInput, "real circles need a real surface");
  if (wehler::max_imag(p) > 1e-9) throw Error(ErrorCode::kInput, "start point is not real");
  static std::atomic<std::uint64_t> next_id{1};
  RealCircle c;
  c.axis = axis;
  c.id = next_id.fetch_add(1);
  c.fiber = wehler::make_p1(p.z[axis].a.real(), p.z[axis].b.real());
  const FiberFunction F(s, axis, c.fiber);
  Vec2 t = angles(p, axis);
  if (!F.correct(t)) throw Error(ErrorCode::kLostPoint, "start point is off the real fiber");
  const Vec2 start = t;
  auto grad = [&](const Vec2& x) {
    const auto v = F.eval(x[0], x[1]);
    return std::array<double, 2>{v[1], v[2]};
  };
  auto g0 = grad(t);
  double gn = std::hypot(g0[0], g0[1]);
  if (!(gn > 1e-12)) throw Error(ErrorCode::kAllPartialsVanish, "real fiber is singular at the start");
  Vec2 dir{-g0[1] / gn, g0[0] / gn};
  std::vector<Vec2> pts{t};
  std::vector<double> mass{0.0};
  double total = 0.0, travelled = 0.0;
  const std::size_t max_steps = static_cast<std::size_t>(400.0 / step);
  for (std::size_t n = 0; n < max_steps; ++n) {
    Vec2 nt{t[0] + step * dir[0], t[1] + step * dir[1]};
    if (!F.correct(nt)) throw Error(ErrorCode::kLostPoint, "real fiber trace lost the curve");
    const auto g1 = grad(nt);
    const double gn1 = std::hypot(g1[0], g1[1]);
    if (!(gn1 > 1e-12)) throw Error(ErrorCode::kAllPartialsVanish, "real fiber is singular");
    Vec2 nd{-g1[1] / gn1, g1[0] / gn1};
    if (nd[0] * dir[0] + nd[1] * dir[1] < 0.0) nd = {-nd[0], -nd[1]};
    const double chord = std::hypot(nt[0] - t[0], nt[1] - t[1]);
    const double dm = 0.5 * chord * (1.0 / gn + 1.0 / gn1);
    travelled += chord;
    const double back = std::hypot(torus_delta(nt[0] - start[0]), torus_delta(nt[1] - start[1]));
    if (travelled > 10.0 * step && back < 0.75 * step) {
      // Close the loop on the start point.
      const double close = std::hypot(torus_delta(start[0] - t[0]), torus_delta(start[1] - t[1]));
      total += 0.5 * close * (1.0 / gn + 1.0 / std::hypot(g0[0], g0[1]));
      c.theta = std::move(pts);
      c.total = total;
      c.measure = std::move(mass);
      for (auto& m : c.measure) m /= total;
      return c;
    }
    total += dm;
    t = nt;
    gn = gn1;
    dir = nd;
    pts.push_back({std::fmod(std::fmod(t[0], kPi) + kPi, kPi), std::fmod(std::fmod(t[1], kPi) + kPi, kPi)});
    mass.push_back(total);
  }
  throw Error(ErrorCode::kLostPoint, "real fiber trace did not close");
}

RealCircleRotation real_circle_rotation(const wehler::Surface& s, const wehler::SurfacePoint& p,
                                        int axis, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::kInput, "need at least one step");
  const RealCircle circle = trace_real_circle(s, p, axis);
  const auto ax = free_axes(axis);
  const auto g = wehler::AutWord::from({ax[0], ax[1]});
  RealCircleRotation out;
  constexpr double kOnCircle = 1e-6;
  auto step = [&](const wehler::SurfacePoint& q) {
    auto r = wehler::apply_word(s, g, q);
    if (out.power == 2) r = wehler::apply_word(s, g, r);
    return r;
  };
  if (circle.distance(step(p)) > kOnCircle) out.power = 2;
  if (circle.distance(step(p)) > kOnCircle) {
    throw Error(ErrorCode::kNotATranslation, "g does not preserve the real circle");
  }
  std::vector<Vec2> orbit;
  orbit.reserve(n + 1);
  wehler::SurfacePoint q = p;
  orbit.push_back({circle.coordinate(q), 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    q = step(q);
    orbit.push_back({circle.coordinate(q), 0.0});
  }
  RotationOptions opt;
  opt.coord_uncertainty = 1e-7;
  out.T = rotation_vector(orbit, opt);
  out.slope = slope_detect(out.T);
  return out;
}

}  // namespace k3dyn::fiber
