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

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "k3dyn/error.hpp"
#include "k3dyn/torus.hpp"

namespace k3dyn::torus {
namespace {

Eigen::Vector4d ev(const RVec4& v) { return {v[0], v[1], v[2], v[3]}; }

Eigen::Matrix4d real_matrix(const CMat2& A) {
  Eigen::Matrix4d R = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      R(2 * i, 2 * j) = A[i][j].real();
      R(2 * i, 2 * j + 1) = -A[i][j].imag();
      R(2 * i + 1, 2 * j) = A[i][j].imag();
      R(2 * i + 1, 2 * j + 1) = A[i][j].real();
    }
  return R;
}

Eigen::Matrix<double, 4, 2> orthonormal(const Plane& pi) {
  Eigen::Matrix<double, 4, 2> M;
  M.col(0) = ev(pi.span[0]);
  M.col(1) = ev(pi.span[1]);
  Eigen::HouseholderQR<Eigen::Matrix<double, 4, 2>> qr(M);
  return qr.householderQ() * Eigen::Matrix<double, 4, 2>::Identity();
}

double plane_residual(const Plane& pi, const Eigen::Vector4d& x) {
  const auto Q = orthonormal(pi);
  const Eigen::Vector4d r = x - Q * (Q.transpose() * x);
  return r.norm() / std::max(1.0, x.norm());
}

// z = c1 f1 + c2 f2 over C.
std::array<cplx, 2> complex_coords(const CVec2& f1, const CVec2& f2, const CVec2& z) {
  const cplx det = f1[0] * f2[1] - f1[1] * f2[0];
  return {(z[0] * f2[1] - z[1] * f2[0]) / det, (f1[0] * z[1] - f1[1] * z[0]) / det};
}

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol; }

// Generator of the rank-one group a Z + b Z, or 0 when it is not discrete
// at this tolerance.
double real_gcd(double a, double b, double tol) {
  a = std::abs(a);
  b = std::abs(b);
  for (int it = 0; it < 200; ++it) {
    if (b <= tol) return a;
    a = std::fmod(a, b);
    std::swap(a, b);
  }
  return 0.0;
}

// Lagrange-Gauss reduction of the columns.
void gauss_reduce(Eigen::Matrix2d& V) {
  for (int it = 0; it < 100; ++it) {
    if (V.col(0).squaredNorm() > V.col(1).squaredNorm()) V.col(0).swap(V.col(1));
    const double mu = std::round(V.col(0).dot(V.col(1)) / V.col(0).squaredNorm());
    if (mu == 0.0) return;
    V.col(1) -= mu * V.col(0);
  }
}

}  // namespace

double plane_defect(const CMat2& A, const Plane& pi) {
  const Eigen::Matrix4d R = real_matrix(A);
  double worst = 0.0;
  for (const auto& p : pi.span) worst = std::max(worst, plane_residual(pi, R * ev(p)));
  return worst;
}

int lattice_rank_in_plane(const Lattice4& L, const Plane& pi, int height) {
  std::vector<Eigen::Vector4d> found;
  for (int a = -height; a <= height; ++a)
    for (int b = -height; b <= height; ++b)
      for (int c = -height; c <= height; ++c)
        for (int d = -height; d <= height; ++d) {
          if (a == 0 && b == 0 && c == 0 && d == 0) continue;
          const Eigen::Vector4d x = a * ev(L.basis[0]) + b * ev(L.basis[1]) +
                                    c * ev(L.basis[2]) + d * ev(L.basis[3]);
          if (plane_residual(pi, x) < 1e-9) found.push_back(x);
        }
  if (found.empty()) return 0;
  Eigen::MatrixXd M(4, static_cast<Eigen::Index>(found.size()));
  for (std::size_t i = 0; i < found.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = found[i];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

SubtoriReport invariant_subtori(const Lattice4& L, const std::vector<CMat2>& generators,
                                const Plane& pi, int m_max) {
  for (const auto& A : generators) {
    lattice_matrix(AffineAuto{A, {}}, L);
    if (plane_defect(A, pi) > 1e-10) throw Error(ErrorCode::kNotInvariant, "generator moves the plane");
  }
  const CVec2 f1 = to_complex(pi.span[0]), f2 = to_complex(pi.span[1]);
  const cplx fdet = f1[0] * f2[1] - f1[1] * f2[0];
  if (std::abs(fdet) < 1e-12) throw Error(ErrorCode::kInput, "plane is not totally real");

  // Re and Im of the coordinates of each lattice basis vector.
  std::array<Eigen::Vector2d, 4> re, im;
  for (int i = 0; i < 4; ++i) {
    const auto c = complex_coords(f1, f2, to_complex(L.basis[i]));
    re[i] = {c[0].real(), c[1].real()};
    im[i] = {c[0].imag(), c[1].imag()};
  }
  // Lambda meet Pi: small integer combinations with vanishing Im part.
  constexpr int kHeight = 6;
  std::vector<std::pair<Eigen::Vector2d, std::array<int, 4>>> in_pi;
  for (int a = -kHeight; a <= kHeight; ++a)
    for (int b = -kHeight; b <= kHeight; ++b)
      for (int c = -kHeight; c <= kHeight; ++c)
        for (int d = -kHeight; d <= kHeight; ++d) {
          if (a == 0 && b == 0 && c == 0 && d == 0) continue;
          const Eigen::Vector2d y = a * im[0] + b * im[1] + c * im[2] + d * im[3];
          if (y.norm() > 1e-9) continue;
          in_pi.push_back({a * re[0] + b * re[1] + c * re[2] + d * re[3], {a, b, c, d}});
        }
  double best_det = std::numeric_limits<double>::infinity();
  Eigen::Matrix2d V;
  for (std::size_t i = 0; i < in_pi.size(); ++i)
    for (std::size_t j = i + 1; j < in_pi.size(); ++j) {
      Eigen::Matrix2d W;
      W.col(0) = in_pi[i].first;
      W.col(1) = in_pi[j].first;
      const double dt = std::abs(W.determinant());
      if (dt > 1e-9 && dt < best_det - 1e-9) {
        best_det = dt;
        V = W;
      }
    }
  if (!std::isfinite(best_det)) throw Error(ErrorCode::kInput, "Lambda meets Pi in rank < 2");
  gauss_reduce(V);
  if (V.determinant() < 0) V.col(1) = -V.col(1);
  const Eigen::Matrix2d Vi = V.inverse();

  SubtoriReport rep;
  for (int j = 0; j < 2; ++j) {
    const CVec2 v{V(0, j) * f1[0] + V(1, j) * f2[0], V(0, j) * f1[1] + V(1, j) * f2[1]};
    rep.lambda_pi[j] = to_real(v);
  }
  // q'-images in Lambda_Pi units: beta times an integer lattice.
  std::vector<Eigen::Vector2d> cim, cre;
  double beta = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector2d c = Vi * im[i];
    if (c.norm() < 1e-12) continue;
    cim.push_back(c);
    cre.push_back(Vi * re[i]);
    for (int k = 0; k < 2; ++k)
      if (std::abs(c(k)) > 1e-12) beta = real_gcd(beta, c(k), 1e-9 * std::max(1.0, c.norm()));
  }
  if (cim.empty()) throw Error(ErrorCode::kInput, "lattice lies in Pi");
  if (!(beta > 1e-9)) throw Error(ErrorCode::kInput, "q'-image is not commensurable with Lambda_Pi");
  std::vector<std::array<long long, 2>> n;
  for (const auto& c : cim) {
    if (!near_integer(c(0) / beta, 1e-8) || !near_integer(c(1) / beta, 1e-8)) {
      throw Error(ErrorCode::kInput, "q'-image is not an integer multiple of Lambda_Pi");
    }
    n.push_back({std::llround(c(0) / beta), std::llround(c(1) / beta)});
  }
  // Index of the integer span of n.
  long long idx = 0;
  for (std::size_t i = 0; i < n.size(); ++i)
    for (std::size_t j = i + 1; j < n.size(); ++j)
      idx = std::gcd(idx, std::llabs(n[i][0] * n[j][1] - n[i][1] * n[j][0]));
  if (idx == 0) throw Error(ErrorCode::kInput, "q'-image has rank < 2");
  rep.index = idx;
  rep.beta = beta;

  // alpha from a primitive n_i: re_i = u + alpha n_i with u integral.
  double alpha = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n.size() && std::isnan(alpha); ++i) {
    const long long p = n[i][0], q = n[i][1];
    if (std::gcd(std::llabs(p), std::llabs(q)) != 1) continue;
    // Complete (p, q) to a unimodular basis with w = (-y, x), p x + q y = 1.
    long long x = 0, y = 0;
    {
      long long r0 = p, r1 = q, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
      while (r1 != 0) {
        const long long qt = r0 / r1;
        std::tie(r0, r1) = std::make_pair(r1, r0 - qt * r1);
        std::tie(s0, s1) = std::make_pair(s1, s0 - qt * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - qt * t1);
      }
      x = s0 * r0;
      y = t0 * r0;
    }
    Eigen::Matrix2d B;
    B << static_cast<double>(p), static_cast<double>(-y), static_cast<double>(q),
        static_cast<double>(x);
    const Eigen::Vector2d ab = B.inverse() * cre[i];
    if (!near_integer(ab(1), 1e-8)) throw Error(ErrorCode::kInput, "no commensurability constant");
    alpha = fiber::frac(ab(0));
    if (alpha > 1.0 - 1e-12) alpha = 0.0;
  }
  if (std::isnan(alpha)) throw Error(ErrorCode::kInput, "no primitive q'-vector");
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Eigen::Vector2d u = cre[i] - alpha * Eigen::Vector2d(n[i][0], n[i][1]);
    if (!near_integer(u(0), 1e-8) || !near_integer(u(1), 1e-8)) {
      throw Error(ErrorCode::kInput, "commensurability constant is not uniform");
    }
  }
  if (std::abs(alpha) < 1e-12) alpha = 0.0;
  rep.alpha = alpha;

  // Integer basis of the q'-lattice directions: columns of M.
  std::array<Eigen::Vector2d, 2> mcols;
  {
    std::vector<std::array<long long, 2>> cols = n;
    std::vector<std::array<long long, 2>> basis;
    for (int row = 0; row < 2; ++row) {
      while (true) {
        int piv = -1;
        for (int c = 0; c < static_cast<int>(cols.size()); ++c)
          if (cols[c][row] != 0 && (piv < 0 || std::llabs(cols[c][row]) < std::llabs(cols[piv][row]))) piv = c;
        if (piv < 0) break;
        bool reduced = false;
        for (int c = 0; c < static_cast<int>(cols.size()); ++c) {
          if (c == piv || cols[c][row] == 0) continue;
          const long long f = cols[c][row] / cols[piv][row];
          cols[c][0] -= f * cols[piv][0];
          cols[c][1] -= f * cols[piv][1];
          reduced = true;
        }
        if (!reduced) {
          basis.push_back(cols[piv]);
          cols.erase(cols.begin() + piv);
          break;
        }
      }
    }
    for (int j = 0; j < 2; ++j) mcols[j] = Eigen::Vector2d(basis[j][0], basis[j][1]);
  }

  auto to_vec = [&](cplx scale, const Eigen::Vector2d& vcoords) {
    // scale * (vcoords in Lambda_Pi basis) as a vector of C^2.
    const Eigen::Vector2d pc = V * vcoords;
    const CVec2 v{scale * (pc(0) * f1[0] + pc(1) * f2[0]), scale * (pc(0) * f1[1] + pc(1) * f2[1])};
    return to_real(v);
  };

  InvariantPlane base;
  base.plane = pi;
  base.eta = 0.0;
  base.lattice = rep.lambda_pi;
  base.is_pi = true;
  rep.planes.push_back(base);
  for (int m = -m_max; m <= m_max; ++m) {
    InvariantPlane ip;
    ip.m = m;
    const double am = alpha + m;
    const cplx scale(am, beta);
    if (std::abs(am) < 1e-12) {
      ip.is_i_pi = true;
      ip.eta = std::numeric_limits<double>::infinity();
      ip.plane.span = {to_real({cplx(0, 1) * f1[0], cplx(0, 1) * f1[1]}),
                       to_real({cplx(0, 1) * f2[0], cplx(0, 1) * f2[1]})};
    } else {
      ip.eta = beta / am;
      const cplx r(1.0, ip.eta);
      ip.plane.span = {to_real({r * f1[0], r * f1[1]}), to_real({r * f2[0], r * f2[1]})};
    }
    ip.lattice = {to_vec(scale, mcols[0]), to_vec(scale, mcols[1])};
    rep.planes.push_back(ip);
  }
  return rep;
}

}  // namespace k3dyn::torus
