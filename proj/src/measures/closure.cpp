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
#include <random>

#include "k3dyn/error.hpp"
#include "k3dyn/measures.hpp"

namespace k3dyn::measures {
namespace {

constexpr double kRevisit = 1e-10;
constexpr std::size_t kFiniteFraction = 10;

IMat2 mat_mul(const IMat2& a, const IMat2& b) {
  IMat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

std::vector<IMat2> symmetric_set(const std::vector<IMat2>& gens) {
  if (gens.empty()) throw Error(ErrorCode::kInput, "no generators");
  std::vector<IMat2> out;
  for (const auto& m : gens) {
    const long long det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (det != 1 && det != -1) throw Error(ErrorCode::kInput, "generator is not in GL2(Z)");
    out.push_back(m);
    out.push_back({{{det * m[1][1], -det * m[0][1]}, {-det * m[1][0], det * m[0][0]}}});
  }
  return out;
}

// Letters 2j and 2j+1 are mutually inverse.
std::vector<int> reduced_word(std::mt19937_64& rng, int letters, int length, bool pairs) {
  std::uniform_int_distribution<int> pick(0, letters - 1);
  std::vector<int> w;
  while (static_cast<int>(w.size()) < length) {
    const int l = pick(rng);
    if (!w.empty()) {
      const int prev = w.back();
      if (pairs ? (l ^ 1) == prev : l == prev) continue;
    }
    w.push_back(l);
  }
  return w;
}

// Sorted quantized keys; a repeated key is a revisit.
void revisit_scan(const simd::Soa& cloud, double cell, bool periodic, bool* revisit,
                  std::size_t* distinct) {
  const std::size_t n = cloud.size();
  const int dim = cloud.dim();
  std::vector<long long> keys(n * dim);
  const double per = std::round(1.0 / cell);
  for (std::size_t i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d) {
      long long k = std::llround(cloud.coords[d][i] / cell);
      if (periodic) k = ((k % static_cast<long long>(per)) + static_cast<long long>(per)) % static_cast<long long>(per);
      keys[i * dim + d] = k;
    }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(keys.begin() + a * dim, keys.begin() + (a + 1) * dim,
                                        keys.begin() + b * dim, keys.begin() + (b + 1) * dim);
  };
  std::sort(idx.begin(), idx.end(), less);
  std::size_t uniq = n == 0 ? 0 : 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (less(idx[i - 1], idx[i])) ++uniq;
  }
  if (revisit) *revisit = uniq < n;
  if (distinct) *distinct = uniq;
}

// Rational p/q with q <= qmax within tol of x, if any.
std::optional<std::pair<long long, long long>> rational_approx(double x, long long qmax, double tol) {
  x -= std::floor(x);
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const long long a = static_cast<long long>(std::floor(r));
    const long long h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > qmax) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(x - static_cast<double>(h1) / k1) <= tol) return std::make_pair(h1, k1);
    const double f = r - a;
    if (f < 1e-15) break;
    r = 1.0 / f;
  }
  return std::nullopt;
}

std::array<double, 3> riemann_sphere(const wehler::P1Point& z) {
  if (wehler::is_infinite(z)) return {0.0, 0.0, 1.0};
  const wehler::cplx w = wehler::affine_value(z);
  const double n = std::norm(w);
  return {2.0 * w.real() / (1.0 + n), 2.0 * w.imag() / (1.0 + n), (n - 1.0) / (1.0 + n)};
}

// frac(a x + b y) without the precision loss of forming a x in floating
// point: the rounding error of each product is recovered with fma.
double mulmod1(long long a, double x, long long b, double y) {
  const double ad = static_cast<double>(a), bd = static_cast<double>(b);
  const double h1 = ad * x, l1 = std::fma(ad, x, -h1);
  const double h2 = bd * y, l2 = std::fma(bd, y, -h2);
  return fiber::frac(fiber::frac(fiber::frac(h1) + fiber::frac(h2)) + (l1 + l2));
}

bool near(double v, double target, double band) { return std::abs(v - target) <= band; }

// Fiber of a parabolic M: translation direction w spans (M - I) Z^2 and the
// integer functional a with a . w = 1 is a coordinate along the fiber.
std::optional<FibrationEvidence> torus_fibration(const IMat2& m, int index,
                                                 std::array<double, 4> x, std::size_t steps,
                                                 std::array<long long, 2>* dir) {
  const long long tr = m[0][0] + m[1][1];
  const long long det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const bool identity = m[0][0] == 1 && m[1][1] == 1 && m[0][1] == 0 && m[1][0] == 0;
  if (tr != 2 || det != 1 || identity) return std::nullopt;
  std::array<long long, 2> w{m[0][0] - 1, m[1][0]};
  if (w[0] == 0 && w[1] == 0) w = {m[0][1], m[1][1] - 1};
  const long long g = std::gcd(std::llabs(w[0]), std::llabs(w[1]));
  w = {w[0] / g, w[1] / g};
  long long r0 = w[0], r1 = w[1], s0 = 1, s1 = 0, t0 = 0, t1 = 1;
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
  }
  *dir = w;
  FibrationEvidence ev;
  ev.fibration = index;
  std::vector<fiber::Vec2> orbit;
  orbit.reserve(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n) {
    // x = (Re u, Im u, Re v, Im v); coordinate phi = s0 u + t0 v.
    orbit.push_back({fiber::frac(s0 * x[0] + t0 * x[2]), fiber::frac(s0 * x[1] + t0 * x[3])});
    const std::array<double, 4> y{mulmod1(m[0][0], x[0], m[0][1], x[2]),
                                  mulmod1(m[0][0], x[1], m[0][1], x[3]),
                                  mulmod1(m[1][0], x[0], m[1][1], x[2]),
                                  mulmod1(m[1][0], x[1], m[1][1], x[3])};
    x = y;
  }
  // Rounding errors of step j are amplified linearly by the remaining
  // unipotent steps, so chart coordinates are good to about n^2 ulp.
  fiber::RotationOptions ropt;
  const double nd = static_cast<double>(steps);
  ropt.coord_uncertainty = std::max(1e-12, 4e-16 * nd * nd);
  try {
    ev.T = fiber::rotation_vector(orbit, ropt);
    ev.slope = fiber::slope_detect(ev.T);
  } catch (const Error& e) {
    ev.error = e.what();
  }
  return ev;
}

bool delta_cover(const simd::Soa& cloud, double delta) {
  const int per = static_cast<int>(std::round(1.0 / (2.0 * delta)));
  if (per < 1 || cloud.dim() != 4) return false;
  const double spacing = 1.0 / per;
  std::vector<char> hit(static_cast<std::size_t>(per) * per * per * per, 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::size_t key = 0;
    double d2 = 0.0;
    for (int d = 0; d < 4; ++d) {
      const double x = cloud.coords[d][i] - std::floor(cloud.coords[d][i]);
      long long j = std::llround(x / spacing);
      const double dx = x - j * spacing;
      d2 += dx * dx;
      key = key * per + static_cast<std::size_t>(j % per);
    }
    if (d2 <= delta * delta) hit[key] = 1;
  }
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

}  // namespace

const char* closure_label_name(ClosureLabel l) {
  switch (l) {
    case ClosureLabel::kFinite: return "Finite";
    case ClosureLabel::kCurve: return "Curve";
    case ClosureLabel::kTotallyRealSurface: return "TotallyRealSurface";
    case ClosureLabel::kDense: return "Dense";
    case ClosureLabel::kInconclusive: return "Inconclusive";
  }
  return "?";
}

simd::Soa torus_orbit(const TorusSystem& sys, std::array<double, 4> start, std::size_t budget,
                      int word_length, std::uint64_t seed, bool* revisit, std::size_t* distinct) {
  if (word_length < 1) throw Error(ErrorCode::kInput, "word length must be positive");
  const auto set = symmetric_set(sys.generators);
  std::mt19937_64 rng(seed);
  simd::Soa cloud(4, budget + 1);
  // Rational starts run in exact integer arithmetic mod a common denominator.
  long long den = 1;
  std::array<long long, 4> num{};
  bool exact = true;
  for (int d = 0; d < 4; ++d) {
    const auto r = rational_approx(start[d], 10000, 1e-12);
    if (!r) {
      exact = false;
      break;
    }
    den = std::lcm(den, r->second);
    if (den > 1000000) {
      exact = false;
      break;
    }
  }
  if (exact) {
    for (int d = 0; d < 4; ++d) {
      num[d] = std::llround((start[d] - std::floor(start[d])) * den) % den;
    }
  }
  for (auto& v : start) v = fiber::frac(v);
  for (std::size_t step = 0; step <= budget; ++step) {
    for (int d = 0; d < 4; ++d) {
      cloud.coords[d][step] = exact ? static_cast<double>(num[d]) / den : start[d];
    }
    if (step == budget) break;
    IMat2 w{{{1, 0}, {0, 1}}};
    for (int l : reduced_word(rng, static_cast<int>(set.size()), word_length, true)) {
      w = mat_mul(w, set[l]);
    }
    if (exact) {
      auto m = [&](long long a, long long b, long long x, long long y) {
        const __int128 v = static_cast<__int128>(a) * x + static_cast<__int128>(b) * y;
        return static_cast<long long>(((v % den) + den) % den);
      };
      num = {m(w[0][0], w[0][1], num[0], num[2]), m(w[0][0], w[0][1], num[1], num[3]),
             m(w[1][0], w[1][1], num[0], num[2]), m(w[1][0], w[1][1], num[1], num[3])};
    } else {
      const auto x = start;
      start = {mulmod1(w[0][0], x[0], w[0][1], x[2]), mulmod1(w[0][0], x[1], w[0][1], x[3]),
               mulmod1(w[1][0], x[0], w[1][1], x[2]), mulmod1(w[1][0], x[1], w[1][1], x[3])};
    }
  }
  if (revisit || distinct) revisit_scan(cloud, kRevisit, true, revisit, distinct);
  return cloud;
}

simd::Soa wehler_orbit(const WehlerSystem& sys, const wehler::SurfacePoint& start,
                       std::size_t budget, int word_length, std::uint64_t seed,
                       std::vector<wehler::SurfacePoint>* points, bool* revisit,
                       std::size_t* distinct) {
  if (word_length < 1) throw Error(ErrorCode::kInput, "word length must be positive");
  std::mt19937_64 rng(seed);
  simd::Soa cloud(9, budget + 1);
  wehler::SurfacePoint p = wehler::with_residual(sys.surface, start);
  if (points) {
    points->clear();
    points->reserve(budget + 1);
  }
  for (std::size_t step = 0; step <= budget; ++step) {
    for (int t = 0; t < 3; ++t) {
      const auto r = riemann_sphere(p.z[t]);
      for (int c = 0; c < 3; ++c) cloud.coords[3 * t + c][step] = r[c];
    }
    if (points) points->push_back(p);
    if (step == budget) break;
    const auto word = wehler::AutWord::from(reduced_word(rng, 3, word_length, false));
    p = wehler::apply_word(sys.surface, word, p);
  }
  if (revisit || distinct) revisit_scan(cloud, kRevisit, false, revisit, distinct);
  return cloud;
}

OrbitClosureReport classify_orbit_closure(const System& sys, const Start& start,
                                          const ClosureOptions& opt, simd::Soa* cloud_out) {
  if (opt.budget < 1) throw Error(ErrorCode::kInput, "budget must be positive");
  OrbitClosureReport rep;
  rep.budget = opt.budget;
  simd::Soa cloud;
  DimensionOptions dopt;
  dopt.seed = opt.seed;
  std::vector<std::array<long long, 2>> directions;
  std::vector<wehler::SurfacePoint> wpoints;

  if (const auto* torus = std::get_if<TorusSystem>(&sys)) {
    const auto* x0 = std::get_if<std::array<double, 4>>(&start);
    if (!x0) throw Error(ErrorCode::kInput, "torus systems need a 4-coordinate start");
    cloud = torus_orbit(*torus, *x0, opt.budget, opt.word_length, opt.seed, &rep.revisit,
                        &rep.distinct_points);
    dopt.periodic = true;
    dopt.r_min = 0.04;
    dopt.r_max = 0.4;
    for (std::size_t j = 0; j < torus->generators.size(); ++j) {
      std::array<long long, 2> dir{};
      const auto ev = torus_fibration(torus->generators[j], static_cast<int>(j), *x0,
                                      opt.fiber_steps, &dir);
      if (!ev) continue;
      rep.fibrations.push_back(*ev);
      directions.push_back(dir);
    }
    double dist = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      for (int d : {1, 3}) {
        const double y = cloud.coords[d][i];
        dist = std::max(dist, std::min(std::abs(fiber::wrap_half(y)), std::abs(fiber::wrap_half(y - 0.5))));
      }
    rep.candidate_distance = dist;
    if (dist <= 1e-6) {
      rep.candidate = "A(R)";
      rep.haar_discrepancy = star_discrepancy_2d(cloud.coords[0], cloud.coords[2]);
    }
    rep.delta_cover = delta_cover(cloud, opt.delta);
  } else {
    const auto& wsys = std::get<WehlerSystem>(sys);
    const auto* p0 = std::get_if<wehler::SurfacePoint>(&start);
    if (!p0) throw Error(ErrorCode::kInput, "Wehler systems need a surface point start");
    cloud = wehler_orbit(wsys, *p0, opt.budget, opt.word_length, opt.seed, &wpoints, &rep.revisit,
                         &rep.distinct_points);
    dopt.periodic = false;
    dopt.r_min = 0.02;
    dopt.r_max = 0.2;
    for (int axis = 0; axis < 3; ++axis) {
      FibrationEvidence ev;
      ev.fibration = axis;
      try {
        const auto rot = fiber::real_circle_rotation(wsys.surface, *p0, axis, opt.fiber_steps);
        ev.T = rot.T;
        ev.slope = rot.slope;
      } catch (const Error& e) {
        ev.error = e.what();
      }
      rep.fibrations.push_back(ev);
    }
    double dist = 0.0;
    for (const auto& p : wpoints) dist = std::max(dist, wehler::max_imag(p));
    rep.candidate_distance = dist;
    if (dist <= 1e-9) rep.candidate = "X(R)";
  }

  // Transversality of the first two circle fibrations.
  std::vector<std::size_t> circles;
  for (std::size_t i = 0; i < rep.fibrations.size(); ++i) {
    if (rep.fibrations[i].error.empty() && rep.fibrations[i].slope.kind == fiber::SlopeKind::kCircles) {
      circles.push_back(i);
    }
  }
  if (circles.size() >= 2) {
    if (std::holds_alternative<TorusSystem>(sys)) {
      const auto& a = directions[circles[0]];
      const auto& b = directions[circles[1]];
      rep.transversality = std::abs(static_cast<double>(a[0] * b[1] - a[1] * b[0])) /
                           (std::hypot(a[0], a[1]) * std::hypot(b[0], b[1]));
    } else {
      try {
        rep.transversality = wehler::tangency_residual(
            std::get<WehlerSystem>(sys).surface, std::get<wehler::SurfacePoint>(start),
            rep.fibrations[circles[0]].fibration, rep.fibrations[circles[1]].fibration);
      } catch (const Error&) {
        rep.transversality = 0.0;
      }
    }
  }

  if (cloud_out) *cloud_out = cloud;
  // Random words revisit group elements through relations of the group, so
  // a single repeat does not make the orbit finite; the distinct points
  // must also saturate well below the budget.
  if (rep.revisit && rep.distinct_points <= opt.budget / kFiniteFraction) {
    rep.label = ClosureLabel::kFinite;
    return rep;
  }
  const std::size_t stride = std::max<std::size_t>(1, cloud.size() / opt.dimension_sample);
  simd::Soa sample(cloud.dim(), 0);
  for (int d = 0; d < cloud.dim(); ++d) {
    for (std::size_t i = 0; i < cloud.size(); i += stride) sample.coords[d].push_back(cloud.coords[d][i]);
  }
  try {
    rep.dimension = correlation_dimension(sample, dopt);
  } catch (const Error& e) {
    rep.dimension_error = e.what();
    rep.note = "no dimension estimate";
    return rep;
  }
  const double v = rep.dimension->value;
  rep.dimension_three_anomaly = near(v, 3.0, opt.band);
  if (near(v, 1.0, opt.band)) {
    rep.note = "dimension near 1 but the candidate library holds no invariant curve";
  } else if (near(v, 2.0, opt.band)) {
    if (circles.size() >= 2 && rep.transversality > opt.transversality) {
      rep.label = ClosureLabel::kTotallyRealSurface;
    } else {
      rep.note = "dimension near 2 without circles on two transverse fibrations";
    }
  } else if (near(v, 4.0, opt.band)) {
    if (rep.delta_cover) {
      rep.label = ClosureLabel::kDense;
    } else {
      rep.note = "dimension near 4 without a delta-cover";
    }
  } else if (rep.dimension_three_anomaly) {
    rep.note = "dimension near 3";
  } else {
    rep.note = "dimension outside every decision band";
  }
  return rep;
}

}  // namespace k3dyn::measures
