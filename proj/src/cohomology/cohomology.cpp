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

#include "k3dyn/cohomology.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "k3dyn/error.hpp"

namespace k3dyn::cohomology {
namespace {

constexpr double kPi = 3.14159265358979323846;

using DMat = std::array<std::array<double, 3>, 3>;

DMat to_double(const IMat& m) {
  DMat d;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d[i][j] = static_cast<double>(m[i][j]);
  return d;
}

DMat dmul(const DMat& a, const DMat& b) {
  DMat c{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

std::array<double, 3> dapply(const DMat& m, const std::array<double, 3>& v) {
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += m[i][j] * v[j];
  return r;
}

double max_abs(const DMat& m) {
  double x = 0.0;
  for (const auto& row : m)
    for (double v : row) x = std::max(x, std::abs(v));
  return x;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a;
}

IVec primitive(IVec v) {
  long long g = 0;
  for (long long x : v) g = std::gcd(g, x < 0 ? -x : x);
  if (g > 1)
    for (auto& x : v) x /= g;
  return v;
}

}  // namespace

IMat identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

IMat mul(const IMat& a, const IMat& b) {
  IMat c{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

IVec act(const IMat& m, const IVec& v) {
  IVec r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += m[i][j] * v[j];
  return r;
}

long long form(const IMat& q, const IVec& x, const IVec& y) {
  long long s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += x[i] * q[i][j] * y[j];
  return s;
}

bool operator_equal(const IMat& a, const IMat& b) { return a == b; }

IntersectionForm fibration_form() { return {{{{0, 2, 2}, {2, 0, 2}, {2, 2, 0}}}}; }

IntersectionForm derive_intersection_form(const wehler::Surface& s,
                                          std::mt19937_64& rng, int samples) {
  std::normal_distribution<double> g(0.0, 1.0);
  IntersectionForm q;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const int k = 3 - i - j;
      int agreed = -1;
      int valid = 0;
      for (int n = 0; n < samples; ++n) {
        wehler::SurfacePoint p;
        p.z[i] = wehler::make_p1({g(rng), g(rng)}, {g(rng), g(rng)});
        p.z[j] = wehler::make_p1({g(rng), g(rng)}, {g(rng), g(rng)});
        p.z[k] = {0.0, 1.0};
        const auto quad = wehler::fiber_quadratic(s, p, k);
        const double scale = std::max({std::abs(quad.A), std::abs(quad.B), std::abs(quad.C)});
        if (!(scale > 1e-12 * s.coeff_norm())) continue;  // fiber component; resample
        // Distinct roots of the binary form in P1, counted directly.
        const auto roots = wehler::quadratic_roots(quad);
        const double sep = std::abs(roots[0].a * roots[1].b - roots[0].b * roots[1].a);
        if (sep < 1e-9) continue;  // tangential sample
        const int count = 2;
        ++valid;
        if (agreed < 0) agreed = count;
        if (agreed != count) {
          throw Error(ErrorCode::kCountAmbiguous, "intersection count varies across samples");
        }
      }
      if (valid < samples / 2) {
        throw Error(ErrorCode::kCountAmbiguous, "too few generic fiber samples");
      }
      q.Q[i][j] = q.Q[j][i] = agreed;
    }
  }
  return q;
}

std::array<int, 2> signature(const IntersectionForm& q) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = static_cast<double>(q.Q[i][j]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  std::array<int, 2> sig{0, 0};
  for (int i = 0; i < 3; ++i) {
    if (es.eigenvalues()(i) > 1e-9) ++sig[0];
    if (es.eigenvalues()(i) < -1e-9) ++sig[1];
  }
  return sig;
}

IMat involution_action(const IntersectionForm& qf, int k) {
  const IMat& Q = qf.Q;
  const int i = (k + 1) % 3, j = (k + 2) % 3;
  IVec ei{}, ej{}, ek{};
  ei[i] = ej[j] = ek[k] = 1;
  // v = M e_k must satisfy Q(v, e_i) = Q_ki, Q(v, e_j) = Q_kj, Q(v, v) = Q_kk.
  // e_k solves all three, so v = e_k + t n with n spanning the kernel of the
  // two linear conditions.
  const IVec r1 = act(Q, ei), r2 = act(Q, ej);
  IVec n = {r1[1] * r2[2] - r1[2] * r2[1], r1[2] * r2[0] - r1[0] * r2[2],
            r1[0] * r2[1] - r1[1] * r2[0]};
  if (n == IVec{0, 0, 0}) {
    throw Error(ErrorCode::kNonUnique, "linear constraints are dependent");
  }
  n = primitive(n);
  const long long nqn = form(Q, n, n);
  const long long nqe = form(Q, n, ek);
  if (nqn == 0) {
    if (nqe == 0) throw Error(ErrorCode::kNonUnique, "isotropic family of solutions");
    throw Error(ErrorCode::kNoSolution, "only the identity satisfies the constraints");
  }
  // t = -2 nqe / nqn must make t n integral.
  const long long num = -2 * nqe, den = nqn;
  if (num == 0) throw Error(ErrorCode::kNoSolution, "only the identity satisfies the constraints");
  IVec v = ek;
  for (int a = 0; a < 3; ++a) {
    if ((num * n[a]) % den != 0) {
      throw Error(ErrorCode::kNoSolution, "non-integral reflection");
    }
    v[a] += num * n[a] / den;
  }
  IMat m{};
  for (int a = 0; a < 3; ++a) {
    m[a][i] = ei[a];
    m[a][j] = ej[a];
    m[a][k] = v[a];
  }
  IMat mt{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) mt[a][b] = m[b][a];
  if (mul(m, m) != identity() || mul(mul(mt, Q), m) != Q) {
    throw Error(ErrorCode::kNoSolution, "candidate is not an involutive isometry");
  }
  return m;
}

IMat word_action(const IntersectionForm& q, const wehler::AutWord& w) {
  IMat m = identity();
  for (int l : w.letters) m = mul(m, involution_action(q, l));
  return m;
}

std::array<long long, 3> characteristic_polynomial(const IMat& m) {
  const long long tr = m[0][0] + m[1][1] + m[2][2];
  const long long minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] -
                           m[0][2] * m[2][0] + m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const long long det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                        m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                        m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return {-det, minors, -tr};
}

const char* type_name(IsometryType t) {
  switch (t) {
    case IsometryType::kElliptic: return "Elliptic";
    case IsometryType::kParabolic: return "Parabolic";
    case IsometryType::kLoxodromic: return "Loxodromic";
  }
  return "?";
}

IsometryReport classify(const IntersectionForm& q, const IMat& m) {
  IsometryReport rep;
  rep.charpoly = characteristic_polynomial(m);
  IMat mt{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) mt[i][j] = m[j][i];
  double lambda = 1.0;
  if (operator_equal(mul(mt, mul(q.Q, m)), q.Q)) {
    // Isometry of a (1,2) form: eigenvalues lambda, 1/lambda and det M, so
    // t = tr M - det M = lambda + 1/lambda is an integer. Floating
    // eigenvalues of a unipotent 3-block are only good to about 1e-5.
    const long long t = std::llabs(-rep.charpoly[2] + rep.charpoly[0]);
    if (t > 2) {
      const long double tl = static_cast<long double>(t);
      lambda = static_cast<double>((tl + std::sqrt(tl * tl - 4.0L)) / 2.0L);
    }
  } else {
    Eigen::Matrix3d md;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) md(i, j) = static_cast<double>(m[i][j]);
    Eigen::EigenSolver<Eigen::Matrix3d> es(md, false);
    lambda = 0.0;
    for (int i = 0; i < 3; ++i) lambda = std::max(lambda, std::abs(es.eigenvalues()(i)));
    if (lambda <= 1.0 + 1e-4) lambda = 1.0;
  }
  rep.lambda = std::max(1.0, lambda);
  if (lambda > 1.0 + kLambdaEps) {
    rep.type = IsometryType::kLoxodromic;
    rep.entropy = std::log(lambda);
    return rep;
  }
  rep.lambda = 1.0;
  DMat p = to_double(m);
  const double n1 = max_abs(p);
  for (int s = 0; s < 6; ++s) p = dmul(p, p);  // M^64
  if (max_abs(p) / n1 <= 2.0) {
    rep.type = IsometryType::kElliptic;
    return rep;
  }
  rep.type = IsometryType::kParabolic;
  // Fixed isotropic ray: kernel of M - I.
  IMat d = m;
  for (int i = 0; i < 3; ++i) d[i][i] -= 1;
  IVec best{0, 0, 0};
  for (int a = 0; a < 3 && best == IVec{0, 0, 0}; ++a) {
    for (int b = a + 1; b < 3 && best == IVec{0, 0, 0}; ++b) {
      const IVec& r1 = d[a];
      const IVec& r2 = d[b];
      best = {r1[1] * r2[2] - r1[2] * r2[1], r1[2] * r2[0] - r1[0] * r2[2],
              r1[0] * r2[1] - r1[1] * r2[0]};
    }
  }
  if (best != IVec{0, 0, 0}) {
    best = primitive(best);
    if (form(q.Q, best, IVec{1, 1, 1}) < 0)
      for (auto& x : best) x = -x;
    rep.fixed_ray = best;
  }
  return rep;
}

IsometryReport classify_word(const IntersectionForm& q, const wehler::AutWord& w) {
  return classify(q, word_action(q, w));
}

GrowthFit growth_exponent(const IntersectionForm& q, const wehler::AutWord& w, int n_max) {
  if (w.letters.empty()) return {};
  if (n_max < 4) throw Error(ErrorCode::kInput, "n_max must be at least 4");
  const IMat m = word_action(q, w);
  const DMat md = to_double(m);
  const DMat qd = to_double(q.Q);
  const std::array<double, 3> a = {1.0, 1.0, 1.0};
  const auto qa = dapply(qd, a);
  std::array<double, 3> v = a;
  double log_scale = 0.0;
  const int n_lo = n_max / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, tx = 0, txx = 0, txy = 0;
  int cnt = 0;
  for (int n = 1; n <= n_max; ++n) {
    v = dapply(md, v);
    const double mx = std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
    if (mx > 1e100) {
      for (auto& x : v) x /= mx;
      log_scale += std::log(mx);
    }
    if (n < n_lo) continue;
    const double pairing = v[0] * qa[0] + v[1] * qa[1] + v[2] * qa[2];
    if (!(pairing > 0.0)) continue;
    const double y = log_scale + std::log(pairing);
    const double x = std::log(static_cast<double>(n));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    tx += n;
    txx += static_cast<double>(n) * n;
    txy += n * y;
    ++cnt;
  }
  GrowthFit fit;
  if (cnt < 2) return fit;
  fit.exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  fit.log_rate = (cnt * txy - tx * sy) / (cnt * txx - tx * tx);
  fit.loxodromic = classify(q, m).type == IsometryType::kLoxodromic;
  return fit;
}

ConeCircle::ConeCircle(const IntersectionForm& q) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = static_cast<double>(q.Q[i][j]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  const auto& ev = es.eigenvalues();
  const auto& V = es.eigenvectors();
  if (!(ev(2) > 0.0 && ev(1) < 0.0 && ev(0) < 0.0)) {
    throw Error(ErrorCode::kInput, "intersection form must have signature (1,2)");
  }
  Eigen::Matrix3d T;
  T.row(0) = std::sqrt(ev(2)) * V.col(2).transpose();
  T.row(1) = std::sqrt(-ev(0)) * V.col(0).transpose();
  T.row(2) = std::sqrt(-ev(1)) * V.col(1).transpose();
  const Eigen::Matrix3d Ti = T.inverse();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      to_diag[i][j] = T(i, j);
      from_diag[i][j] = Ti(i, j);
    }
}

double ConeCircle::angle(const std::array<double, 3>& x) const {
  auto y = dapply(to_diag, x);
  if (y[0] < 0.0)
    for (auto& c : y) c = -c;
  return std::atan2(y[2], y[1]);
}

std::array<double, 3> ConeCircle::point(double theta) const {
  return dapply(from_diag, {1.0, std::cos(theta), std::sin(theta)});
}

PingPongCertificate certify_special_pair(const IntersectionForm& q, const wehler::AutWord& g,
                                         const wehler::AutWord& h, int n) {
  const auto rg = classify_word(q, g);
  const auto rh = classify_word(q, h);
  if (rg.type != IsometryType::kParabolic || rh.type != IsometryType::kParabolic ||
      !rg.fixed_ray || !rh.fixed_ray) {
    throw Error(ErrorCode::kInput, "ping-pong needs two parabolic words");
  }
  if (*rg.fixed_ray == *rh.fixed_ray) {
    throw Error(ErrorCode::kSameFixedRay, "words share their fixed isotropic ray");
  }
  const ConeCircle circle(q);
  auto as_double = [](const IVec& v) {
    return std::array<double, 3>{static_cast<double>(v[0]), static_cast<double>(v[1]),
                                 static_cast<double>(v[2])};
  };
  PingPongCertificate cert;
  cert.u_g = *rg.fixed_ray;
  cert.u_h = *rh.fixed_ray;
  cert.theta_g = circle.angle(as_double(cert.u_g));
  cert.theta_h = circle.angle(as_double(cert.u_h));
  cert.half_width = std::abs(wrap_angle(cert.theta_h - cert.theta_g)) / 3.0;
  const double w = cert.half_width;

  // Image of the interval around `src` under p stays inside the interval
  // around `dst`. The fixed point of p sits at `dst` and outside the source
  // interval, so it is never in the image.
  auto maps_into = [&](const DMat& p, double src, double dst) {
    for (int s = 0; s < kPingPongSamples; ++s) {
      const double th = src - w + 2.0 * w * s / (kPingPongSamples - 1);
      const double img = circle.angle(dapply(p, circle.point(th)));
      if (std::abs(wrap_angle(img - dst)) > w - kPingPongMargin) return false;
    }
    return true;
  };

  const DMat mg = to_double(word_action(q, g)), mgi = to_double(word_action(q, g.inverse()));
  const DMat mh = to_double(word_action(q, h)), mhi = to_double(word_action(q, h.inverse()));
  DMat pg = to_double(identity()), pgi = pg, ph = pg, phi = pg;
  std::vector<bool> ok(static_cast<std::size_t>(n) + 1, false);
  for (int m = 1; m <= n; ++m) {
    pg = dmul(pg, mg);
    pgi = dmul(pgi, mgi);
    ph = dmul(ph, mh);
    phi = dmul(phi, mhi);
    ok[m] = maps_into(pg, cert.theta_h, cert.theta_g) &&
            maps_into(pgi, cert.theta_h, cert.theta_g) &&
            maps_into(ph, cert.theta_g, cert.theta_h) &&
            maps_into(phi, cert.theta_g, cert.theta_h);
  }
  int n0 = n + 1;
  for (int m = n; m >= 1 && ok[m]; --m) n0 = m;
  if (n0 <= n) {
    cert.certified = true;
    cert.n0 = n0;
  }
  return cert;
}

}  // namespace k3dyn::cohomology
