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

#include "k3dyn/wehler.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "k3dyn/error.hpp"

namespace k3dyn::wehler {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Monomials (b^2, ab, a^2) of one coordinate, indexed by the exponent of a.
std::array<cplx, 3> monomials(const P1Point& z) {
  return {z.b * z.b, z.a * z.b, z.a * z.a};
}

// Chart monomials and their first two derivatives in the local coordinate.
struct Mono {
  std::array<cplx, 3> m, d1, d2;
};

Mono chart_mono(Side side, cplx u) {
  if (side == Side::kAffine) {
    return {{1.0, u, u * u}, {0.0, 1.0, 2.0 * u}, {0.0, 0.0, 2.0}};
  }
  return {{u * u, u, 1.0}, {2.0 * u, 1.0, 0.0}, {2.0, 0.0, 0.0}};
}

double norm_inf(const P1Point& z) { return std::max(std::abs(z.a), std::abs(z.b)); }

std::array<cplx, 3> cross(const std::array<cplx, 3>& x, const std::array<cplx, 3>& y) {
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2],
          x[0] * y[1] - x[1] * y[0]};
}

double norm2(const std::array<cplx, 3>& v) {
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

P1Point random_p1(std::mt19937_64& rng, bool real) {
  if (real) {
    std::uniform_real_distribution<double> ang(0.0, kPi);
    const double t = ang(rng);
    return make_p1(std::sin(t), std::cos(t));
  }
  // Uniform on the Riemann sphere via a Gaussian pair.
  std::normal_distribution<double> g(0.0, 1.0);
  return make_p1(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
}

}  // namespace

P1Point make_p1(cplx a, cplx b) {
  const double na = std::abs(a), nb = std::abs(b);
  if (!(na > 0.0) && !(nb > 0.0)) {
    throw Error(ErrorCode::kInput, "P1 point with both coordinates zero");
  }
  if (!std::isfinite(na) || !std::isfinite(nb)) {
    throw Error(ErrorCode::kInput, "P1 point with non-finite coordinate");
  }
  if (na > nb) return {1.0, b / a};
  return {a / b, 1.0};
}

P1Point from_affine(cplx x) { return make_p1(x, 1.0); }

bool is_infinite(const P1Point& z) { return z.b == cplx(0.0); }

cplx affine_value(const P1Point& z) {
  if (is_infinite(z)) return {std::numeric_limits<double>::infinity(), 0.0};
  return z.a / z.b;
}

double Surface::coeff_norm() const {
  double n = 0.0;
  for (const auto& v : c) n = std::max(n, std::abs(v));
  return n;
}

Chart canonical_chart(const SurfacePoint& p) {
  Chart ch;
  for (int t = 0; t < 3; ++t) {
    ch.side[t] = (p.z[t].a == cplx(1.0) && p.z[t].b != cplx(1.0)) ? Side::kInfinite
                                                                   : Side::kAffine;
  }
  return ch;
}

std::array<cplx, 3> local_coords(const SurfacePoint& p, const Chart& chart) {
  std::array<cplx, 3> u;
  for (int t = 0; t < 3; ++t) {
    const P1Point& z = p.z[t];
    if (chart.side[t] == Side::kAffine) {
      if (z.b == cplx(0.0)) throw Error(ErrorCode::kInput, "point outside affine chart");
      u[t] = z.a / z.b;
    } else {
      if (z.a == cplx(0.0)) throw Error(ErrorCode::kInput, "point outside chart at infinity");
      u[t] = z.b / z.a;
    }
  }
  return u;
}

SurfacePoint from_local(const Chart& chart, const std::array<cplx, 3>& u) {
  SurfacePoint p;
  for (int t = 0; t < 3; ++t) {
    p.z[t] = chart.side[t] == Side::kAffine ? make_p1(u[t], 1.0) : make_p1(1.0, u[t]);
  }
  return p;
}

Jet chart_jet(const Surface& s, const Chart& chart, const std::array<cplx, 3>& u) {
  const Mono m0 = chart_mono(chart.side[0], u[0]);
  const Mono m1 = chart_mono(chart.side[1], u[1]);
  const Mono m2 = chart_mono(chart.side[2], u[2]);
  Jet j{};
  for (int i = 0; i < 3; ++i) {
    for (int k1 = 0; k1 < 3; ++k1) {
      for (int k2 = 0; k2 < 3; ++k2) {
        const cplx c = s.coeff(i, k1, k2);
        if (c == cplx(0.0)) continue;
        j.value += c * m0.m[i] * m1.m[k1] * m2.m[k2];
        j.grad[0] += c * m0.d1[i] * m1.m[k1] * m2.m[k2];
        j.grad[1] += c * m0.m[i] * m1.d1[k1] * m2.m[k2];
        j.grad[2] += c * m0.m[i] * m1.m[k1] * m2.d1[k2];
        j.hess[0][0] += c * m0.d2[i] * m1.m[k1] * m2.m[k2];
        j.hess[1][1] += c * m0.m[i] * m1.d2[k1] * m2.m[k2];
        j.hess[2][2] += c * m0.m[i] * m1.m[k1] * m2.d2[k2];
        j.hess[0][1] += c * m0.d1[i] * m1.d1[k1] * m2.m[k2];
        j.hess[0][2] += c * m0.d1[i] * m1.m[k1] * m2.d1[k2];
        j.hess[1][2] += c * m0.m[i] * m1.d1[k1] * m2.d1[k2];
      }
    }
  }
  j.hess[1][0] = j.hess[0][1];
  j.hess[2][0] = j.hess[0][2];
  j.hess[2][1] = j.hess[1][2];
  return j;
}

cplx eval_P(const Surface& s, const SurfacePoint& p) {
  const auto m0 = monomials(p.z[0]);
  const auto m1 = monomials(p.z[1]);
  const auto m2 = monomials(p.z[2]);
  cplx v = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) v += s.coeff(i, j, k) * m0[i] * m1[j] * m2[k];
  return v;
}

SurfacePoint with_residual(const Surface& s, SurfacePoint p) {
  p.residual = std::abs(eval_P(s, p));
  return p;
}

Quadratic fiber_quadratic(const Surface& s, const SurfacePoint& p, int k) {
  std::array<cplx, 3> q{};
  const int i = (k + 1) % 3, j = (k + 2) % 3;
  const auto mi = monomials(p.z[i]);
  const auto mj = monomials(p.z[j]);
  for (int e = 0; e < 3; ++e) {
    for (int ei = 0; ei < 3; ++ei) {
      for (int ej = 0; ej < 3; ++ej) {
        std::array<int, 3> ex{};
        ex[k] = e;
        ex[i] = ei;
        ex[j] = ej;
        q[e] += s.coeff(ex[0], ex[1], ex[2]) * mi[ei] * mj[ej];
      }
    }
  }
  return {q[2], q[1], q[0]};
}

std::array<P1Point, 2> quadratic_roots(const Quadratic& q) {
  const cplx disc = q.B * q.B - 4.0 * q.A * q.C;
  cplx sq = std::sqrt(disc);
  if (std::real(std::conj(q.B) * sq) < 0.0) sq = -sq;
  const cplx h = -0.5 * (q.B + sq);
  if (h == cplx(0.0)) {
    // B = 0 and AC = 0: a double root at 0 or at infinity.
    if (q.A == cplx(0.0) && q.C == cplx(0.0)) {
      throw Error(ErrorCode::kDegenerateFiberLine, "quadratic form vanishes identically");
    }
    const P1Point r = q.A == cplx(0.0) ? P1Point{1.0, 0.0} : P1Point{0.0, 1.0};
    return {r, r};
  }
  return {make_p1(h, q.A), make_p1(q.C, h)};
}

SurfacePoint reproject(const Surface& s, const SurfacePoint& p0) {
  SurfacePoint p = with_residual(s, p0);
  if (p.residual <= s.tol.newton) return p;
  for (int it = 0; it < s.tol.newton_steps; ++it) {
    const Chart ch = canonical_chart(p);
    auto u = local_coords(p, ch);
    const Jet j = chart_jet(s, ch, u);
    const double g2 = std::norm(j.grad[0]) + std::norm(j.grad[1]) + std::norm(j.grad[2]);
    if (!(g2 > 0.0) || !std::isfinite(g2)) {
      throw Error(ErrorCode::kLostPoint, "vanishing gradient during re-projection");
    }
    for (int t = 0; t < 3; ++t) u[t] -= j.value * std::conj(j.grad[t]) / g2;
    p = with_residual(s, from_local(ch, u));
    if (!std::isfinite(p.residual)) {
      throw Error(ErrorCode::kLostPoint, "re-projection diverged");
    }
    if (p.residual <= s.tol.newton) break;
  }
  if (p.residual > s.tol.point) {
    throw Error(ErrorCode::kLostPoint, "re-projection did not reach tolerance");
  }
  return p;
}

SurfacePoint sigma(const Surface& s, const SurfacePoint& p, int k) {
  const Quadratic q = fiber_quadratic(s, p, k);
  const double scale = std::max({std::abs(q.A), std::abs(q.B), std::abs(q.C)});
  if (!(scale > 1e-13 * s.coeff_norm())) {
    throw Error(ErrorCode::kDegenerateFiberLine, "fiber line contained in the surface");
  }
  const cplx a0 = p.z[k].a, b0 = p.z[k].b;
  // Three projective forms of the second Vieta root; all agree for an exact
  // root, the largest is the best conditioned.
  const std::array<P1Point, 3> cand = {
      P1Point{-q.B * b0 - q.A * a0, q.A * b0},
      P1Point{q.C * b0, q.A * a0},
      P1Point{q.C * a0, -q.B * a0 - q.C * b0},
  };
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (norm_inf(cand[c]) > norm_inf(cand[best])) best = c;
  }
  SurfacePoint out = p;
  if (norm_inf(cand[best]) > 1e-14 * scale) {
    out.z[k] = make_p1(cand[best].a, cand[best].b);
  }
  out = with_residual(s, out);
  if (out.residual > s.tol.point) out = reproject(s, out);
  return out;
}

OmegaValues omega(const Surface& s, const SurfacePoint& p) {
  const Chart ch = canonical_chart(p);
  const Jet j = chart_jet(s, ch, local_coords(p, ch));
  const double gn = norm2(j.grad);
  if (!(gn > 1e-14 * std::max(1.0, s.coeff_norm()))) {
    throw Error(ErrorCode::kAllPartialsVanish, "all partial derivatives vanish");
  }
  std::array<cplx, 3> n;
  for (int t = 0; t < 3; ++t) n[t] = std::conj(j.grad[t]) / gn;
  int m = 0;
  for (int t = 1; t < 3; ++t) {
    if (std::abs(n[t]) < std::abs(n[m])) m = t;
  }
  std::array<cplx, 3> v{};
  v[m] = 1.0;
  const cplx proj = std::conj(n[m]);
  for (int t = 0; t < 3; ++t) v[t] -= n[t] * proj;
  const double vn = norm2(v);
  for (auto& x : v) x /= vn;
  std::array<cplx, 3> w = cross(n, v);
  for (auto& x : w) x = std::conj(x);
  const auto c = cross(v, w);
  OmegaValues out;
  const std::array<int, 3> idx = {2, 0, 1};
  for (int e = 0; e < 3; ++e) {
    const int t = idx[e];
    if (std::abs(j.grad[t]) >= s.tol.partial * gn) out.values[e] = c[t] / j.grad[t];
  }
  return out;
}

P1Point fibration_project(const SurfacePoint& p, int k) { return p.z[k]; }

double tangency_residual_in_chart(const Surface& s, const SurfacePoint& p, int g,
                                  int h, const Chart& chart) {
  if (g == h || g < 0 || h < 0 || g > 2 || h > 2) {
    throw Error(ErrorCode::kInput, "tangency residual needs two distinct axes");
  }
  const Jet j = chart_jet(s, chart, local_coords(p, chart));
  const double gn = norm2(j.grad);
  if (!(gn > 1e-14 * std::max(1.0, s.coeff_norm()))) {
    throw Error(ErrorCode::kAllPartialsVanish, "all partial derivatives vanish");
  }
  const int k = 3 - g - h;
  return std::abs(j.grad[k]) / gn;
}

double tangency_residual(const Surface& s, const SurfacePoint& p, int g, int h) {
  return tangency_residual_in_chart(s, p, g, h, canonical_chart(p));
}

AutWord AutWord::from(std::vector<int> letters0) {
  AutWord w;
  for (int l : letters0) {
    if (l < 0 || l > 2) throw Error(ErrorCode::kInput, "word letter out of range");
    if (!w.letters.empty() && w.letters.back() == l) {
      w.letters.pop_back();
    } else {
      w.letters.push_back(l);
    }
  }
  return w;
}

AutWord AutWord::parse(const std::string& text) {
  std::vector<int> raw;
  for (char ch : text) {
    if (ch >= '1' && ch <= '3') {
      raw.push_back(ch - '1');
    } else if (ch != ',' && ch != ' ') {
      throw Error(ErrorCode::kInput, "word letters must be 1, 2 or 3");
    }
  }
  return from(raw);
}

AutWord AutWord::inverse() const {
  AutWord w;
  w.letters.assign(letters.rbegin(), letters.rend());
  return w;
}

std::string AutWord::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i) os << ',';
    os << letters[i] + 1;
  }
  return os.str();
}

SurfacePoint apply_word(const Surface& s, const AutWord& w, const SurfacePoint& p) {
  SurfacePoint q = p;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) q = sigma(s, q, *it);
  return q;
}

double max_imag(const SurfacePoint& p) {
  double m = 0.0;
  for (const auto& z : p.z) m = std::max({m, std::abs(z.a.imag()), std::abs(z.b.imag())});
  return m;
}

OrbitStats iterate_word(const Surface& s, const AutWord& w, SurfacePoint p,
                        std::size_t n, const OrbitSink& sink) {
  OrbitStats st;
  p = with_residual(s, p);
  for (std::size_t step = 1; step <= n; ++step) {
    p = apply_word(s, w, p);
    st.steps = step;
    st.max_residual = std::max(st.max_residual, p.residual);
    st.max_imag = std::max(st.max_imag, max_imag(p));
    if (sink) sink(step, p);
  }
  return st;
}

Surface random_surface(std::mt19937_64& rng, bool real) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Surface s;
  s.real_coefficients = real;
  for (auto& c : s.c) c = real ? cplx(u(rng), 0.0) : cplx(u(rng), u(rng));
  return s;
}

Surface random_real_surface_through_origin(std::mt19937_64& rng) {
  Surface s = random_surface(rng, true);
  s.coeff(0, 0, 0) = 0.0;
  return s;
}

SurfacePoint sample_point(const Surface& s, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt < 64; ++attempt) {
    SurfacePoint p;
    p.z[0] = random_p1(rng, false);
    p.z[1] = random_p1(rng, false);
    p.z[2] = {0.0, 1.0};
    const Quadratic q = fiber_quadratic(s, p, 2);
    try {
      const auto roots = quadratic_roots(q);
      p.z[2] = roots[coin(rng) ? 1 : 0];
      p = with_residual(s, p);
      if (p.residual > s.tol.point) p = reproject(s, p);
      return p;
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(ErrorCode::kLostPoint, "could not sample a surface point");
}

std::vector<SurfacePoint> real_locus_sample(const Surface& s, std::size_t count,
                                            std::mt19937_64& rng) {
  if (!s.real_coefficients) {
    throw Error(ErrorCode::kInput, "real locus needs real coefficients");
  }
  std::vector<SurfacePoint> out;
  const std::size_t max_attempts = 50 * count + 100;
  for (std::size_t a = 0; a < max_attempts && out.size() < count; ++a) {
    SurfacePoint p;
    p.z[0] = random_p1(rng, true);
    p.z[1] = random_p1(rng, true);
    const Quadratic q = fiber_quadratic(s, p, 2);
    const double disc = std::real(q.B * q.B - 4.0 * q.A * q.C);
    if (disc < 0.0) continue;
    std::array<P1Point, 2> roots;
    try {
      roots = quadratic_roots(q);
    } catch (const Error&) {
      continue;
    }
    for (const auto& r : roots) {
      if (out.size() >= count) break;
      SurfacePoint x = p;
      x.z[2] = {cplx(r.a.real(), 0.0), cplx(r.b.real(), 0.0)};
      x = with_residual(s, x);
      if (x.residual > s.tol.point) {
        try {
          x = reproject(s, x);
        } catch (const Error&) {
          continue;
        }
      }
      out.push_back(x);
    }
  }
  return out;
}

std::vector<SurfacePoint> real_locus_grid(const Surface& s, double c1, double c2,
                                          double half_width, int n) {
  std::vector<SurfacePoint> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x1 = c1 - half_width + 2.0 * half_width * (i + 0.5) / n;
      const double x2 = c2 - half_width + 2.0 * half_width * (j + 0.5) / n;
      SurfacePoint p;
      p.z[0] = from_affine(x1);
      p.z[1] = from_affine(x2);
      const Quadratic q = fiber_quadratic(s, p, 2);
      const double disc = std::real(q.B * q.B - 4.0 * q.A * q.C);
      if (disc < 0.0) continue;
      std::array<P1Point, 2> roots;
      try {
        roots = quadratic_roots(q);
      } catch (const Error&) {
        continue;
      }
      for (const auto& r : roots) {
        SurfacePoint x = p;
        x.z[2] = {cplx(r.a.real(), 0.0), cplx(r.b.real(), 0.0)};
        out.push_back(with_residual(s, x));
      }
    }
  }
  return out;
}

std::optional<std::array<cplx, 3>> critical_point(const Surface& s, const Chart& chart,
                                                  std::array<cplx, 3> u, int max_iter) {
  const double scale = std::max(1.0, s.coeff_norm());
  for (int it = 0; it < max_iter; ++it) {
    const Jet j = chart_jet(s, chart, u);
    Eigen::Matrix3cd H;
    Eigen::Vector3cd g;
    for (int a = 0; a < 3; ++a) {
      g(a) = j.grad[a];
      for (int b = 0; b < 3; ++b) H(a, b) = j.hess[a][b];
    }
    if (g.norm() <= 1e-13 * scale) return u;
    const Eigen::Vector3cd step = H.fullPivLu().solve(g);
    if (!step.allFinite()) return std::nullopt;
    for (int a = 0; a < 3; ++a) u[a] -= step(a);
    if (norm2(u) > 1e6) return std::nullopt;
  }
  const Jet j = chart_jet(s, chart, u);
  if (norm2(j.grad) <= 1e-10 * scale) return u;
  return std::nullopt;
}

SmoothnessReport certify_smooth(const Surface& s, std::mt19937_64& rng,
                                int starts_per_chart) {
  SmoothnessReport rep;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double scale = std::max(1.0, s.coeff_norm());
  for (int mask = 0; mask < 8; ++mask) {
    Chart ch;
    for (int t = 0; t < 3; ++t) ch.side[t] = (mask >> t) & 1 ? Side::kInfinite : Side::kAffine;
    for (int k = 0; k < starts_per_chart; ++k) {
      ++rep.starts;
      std::array<cplx, 3> u0 = {cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                                cplx(u(rng), u(rng))};
      const auto c = critical_point(s, ch, u0);
      if (!c) continue;
      const Jet j = chart_jet(s, ch, *c);
      if (std::abs(j.value) > 1e-9 * scale) continue;
      SurfacePoint p = with_residual(s, from_local(ch, *c));
      bool dup = false;
      for (const auto& w : rep.singular_witnesses) {
        double d = 0.0;
        for (int t = 0; t < 3; ++t) {
          d = std::max(d, std::abs(w.z[t].a * p.z[t].b - w.z[t].b * p.z[t].a));
        }
        if (d < 1e-7) dup = true;
      }
      if (!dup) rep.singular_witnesses.push_back(p);
    }
  }
  rep.smooth = rep.singular_witnesses.empty();
  return rep;
}

}  // namespace k3dyn::wehler
