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

#include <algorithm>
#include <cmath>

#include "k3dyn/cluster.hpp"
#include "k3dyn/error.hpp"
#include "k3dyn/parallel.hpp"
#include "k3dyn/torus.hpp"

namespace k3dyn::torus {
namespace {

using wehler::P1Point;
using wehler::Surface;
using wehler::SurfacePoint;
using Poly = std::array<cplx, 27>;

int idx(int i, int j, int k) { return 9 * i + 3 * j + k; }

Poly mul(const Poly& a, const Poly& b) {
  Poly out{};
  for (int i = 0; i < 27; ++i) {
    if (a[i] == cplx(0.0)) continue;
    for (int j = 0; j < 27; ++j) {
      if (b[j] == cplx(0.0)) continue;
      const int e0 = i / 9 + j / 9, e1 = (i / 3) % 3 + (j / 3) % 3, e2 = i % 3 + j % 3;
      if (e0 > 2 || e1 > 2 || e2 > 2) throw Error(ErrorCode::kInput, "product exceeds degree 2");
      out[idx(e0, e1, e2)] += a[i] * b[j];
    }
  }
  return out;
}

double chord(const P1Point& a, const P1Point& b) {
  const double na = std::sqrt(std::norm(a.a) + std::norm(a.b));
  const double nb = std::sqrt(std::norm(b.a) + std::norm(b.b));
  return std::abs(a.a * b.b - a.b * b.a) / (na * nb);
}

double point_distance(const SurfacePoint& p, const SurfacePoint& q) {
  double d = 0.0;
  for (int t = 0; t < 3; ++t) d = std::max(d, chord(p.z[t], q.z[t]));
  return d;
}

// Image coordinate 1/x in the swapped chart; x = infinity maps to 0.
P1Point swapped_coordinate(const Weierstrass& W, cplx z) {
  if (W.is_lattice_point(z, 1e-9)) return wehler::make_p1(0.0, 1.0);
  const cplx x = W.p(z);
  // Square lattices have a half period with x exactly 0.
  if (std::abs(x) <= 1e-12 * std::abs(W.g2 + W.g3) + 1e-300) return wehler::make_p1(1.0, 0.0);
  return wehler::make_p1(1.0, x);
}

Eigen::Matrix3d real_hessian(const Surface& s, const SurfacePoint& p) {
  const wehler::Chart ch = wehler::canonical_chart(p);
  const wehler::Jet j = wehler::chart_jet(s, ch, wehler::local_coords(p, ch));
  Eigen::Matrix3d H;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) H(a, b) = j.hess[a][b].real();
  return H;
}

std::array<int, 2> signature(const Eigen::Matrix3d& H) {
  const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(H).eigenvalues();
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::array<int, 2> sig{0, 0};
  for (int i = 0; i < 3; ++i) {
    if (ev(i) > tol) ++sig[0];
    if (ev(i) < -tol) ++sig[1];
  }
  return sig;
}

// Monomials z1^2, z2^2, z3^2, z1 z2, z1 z3, z2 z3.
constexpr double kSheetRadius = 0.03;

constexpr int kQuadIdx[6] = {18, 6, 2, 12, 10, 4};

std::array<double, 6> quad_row(const std::array<double, 3>& z) {
  return {z[0] * z[0], z[1] * z[1], z[2] * z[2], z[0] * z[1], z[0] * z[2], z[1] * z[2]};
}

std::array<double, 3> real_affine(const SurfacePoint& p) {
  std::array<double, 3> x{};
  for (int t = 0; t < 3; ++t) {
    if (wehler::is_infinite(p.z[t])) throw Error(ErrorCode::kInput, "point is not in the affine chart");
    x[t] = wehler::affine_value(p.z[t]).real();
  }
  return x;
}

// Tensor with axis k moved to the last slot.
Surface permute_to_last(const Surface& s, int k) {
  Surface out = s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) {
        std::array<int, 3> e{};
        if (k == 0) e = {j, l, i};
        if (k == 1) e = {i, l, j};
        if (k == 2) e = {i, j, l};
        out.coeff(i, j, l) = s.coeff(e[0], e[1], e[2]);
      }
  return out;
}

}  // namespace

Surface kummer_closed_form(const Weierstrass& W) {
  Poly e1{}, a{}, b{};
  e1[idx(1, 0, 0)] = e1[idx(0, 1, 0)] = e1[idx(0, 0, 1)] = 1.0;
  a[idx(1, 1, 0)] = a[idx(1, 0, 1)] = a[idx(0, 1, 1)] = 1.0;
  a[0] = W.g2 / 4.0;
  b[idx(1, 1, 1)] = 4.0;
  b[0] = -W.g3;
  const Poly a2 = mul(a, a), be = mul(b, e1);
  Surface s;
  for (int i = 0; i < 27; ++i) s.c[i] = a2[i] - be[i];
  s.real_coefficients = std::all_of(s.c.begin(), s.c.end(),
                                    [](cplx c) { return std::abs(c.imag()) <= 1e-12 * (1.0 + std::abs(c)); });
  return s;
}

KummerFit kummer_fit(const Weierstrass& W, int samples, std::mt19937_64& rng) {
  if (samples < 40) throw Error(ErrorCode::kInput, "the fit needs at least 40 samples");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXcd M(samples, 27);
  int row = 0, attempts = 0;
  while (row < samples) {
    if (++attempts > 1000 * samples) throw Error(ErrorCode::kInput, "could not sample the Kummer image");
    const cplx u = unit(rng) + unit(rng) * W.tau;
    const cplx v = unit(rng) + unit(rng) * W.tau;
    std::array<cplx, 3> x;
    try {
      x = kummer_phi_affine(W, u, v);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(x[0]) > 10.0 || std::abs(x[1]) > 10.0 || std::abs(x[2]) > 10.0) continue;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          M(row, idx(i, j, k)) = std::pow(x[0], i) * std::pow(x[1], j) * std::pow(x[2], k);
    M.row(row) /= M.row(row).norm();
    ++row;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
  KummerFit fit;
  fit.samples = samples;
  const auto& sv = svd.singularValues();
  for (int i = 0; i < sv.size(); ++i) fit.singular_values.push_back(sv(i));
  fit.gap_ratio = sv(26) / sv(25);
  Eigen::VectorXcd c = svd.matrixV().col(26);
  const Surface closed = kummer_closed_form(W);
  // Normalize so the x1^2 x2^2 coefficient matches the closed form.
  c /= c(idx(2, 2, 0));
  for (int i = 0; i < 27; ++i) fit.surface.c[i] = c(i);
  fit.surface.real_coefficients = std::all_of(fit.surface.c.begin(), fit.surface.c.end(), [](cplx z) {
    return std::abs(z.imag()) <= 1e-8 * (1.0 + std::abs(z));
  });
  if (fit.surface.real_coefficients) {
    for (auto& z : fit.surface.c) z = z.real();
  }
  double na = 0.0, nb = 0.0;
  cplx ip = 0.0;
  for (int i = 0; i < 27; ++i) {
    na += std::norm(fit.surface.c[i]);
    nb += std::norm(closed.c[i]);
    ip += std::conj(closed.c[i]) * fit.surface.c[i];
  }
  fit.closed_form_distance = std::sqrt(std::max(0.0, 1.0 - std::norm(ip) / (na * nb)));
  return fit;
}

Surface swap_charts(const Surface& s) {
  Surface out = s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out.coeff(i, j, k) = s.coeff(2 - i, 2 - j, 2 - k);
  return out;
}

KummerNodes kummer_nodes(const Weierstrass& W) {
  const Surface P = swap_charts(kummer_closed_form(W));
  const std::array<cplx, 4> t{0.0, 0.5, 0.5 * W.tau, 0.5 + 0.5 * W.tau};
  KummerNodes out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      SurfacePoint p;
      p.z = {swapped_coordinate(W, t[a]), swapped_coordinate(W, t[b]),
             swapped_coordinate(W, t[a] + t[b])};
      out.nodes.push_back(wehler::with_residual(P, p));
    }
  out.real_torsion_nodes = {4, 1, 5};
  return out;
}

Surface default_deformation_q(const KummerNodes& nodes, std::array<int, 3> signs,
                              std::uint64_t seed) {
  for (int e : signs) {
    if (e != 1 && e != -1) throw Error(ErrorCode::kBadSignPattern, "signs must be +1 or -1");
  }
  Eigen::Matrix<double, 3, 6> R;
  for (int i = 0; i < 3; ++i) {
    const auto row = quad_row(real_affine(nodes.nodes.at(nodes.real_torsion_nodes[i])));
    for (int c = 0; c < 6; ++c) R(i, c) = signs[i] * row[c];
  }
  const Eigen::Matrix<double, 6, 1> a0 =
      R.transpose() * (R * R.transpose()).ldlt().solve(Eigen::Vector3d::Ones());
  Eigen::FullPivLU<Eigen::Matrix<double, 3, 6>> lu(R);
  const Eigen::MatrixXd K = lu.kernel();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::Matrix<double, 6, 1> a = a0;
    if (attempt > 0) {
      Eigen::VectorXd r(K.cols());
      for (int i = 0; i < r.size(); ++i) r(i) = gauss(rng);
      a += 0.1 * a0.norm() * K * r.normalized();
    }
    Surface Q;
    for (int c = 0; c < 6; ++c) Q.c[kQuadIdx[c]] = a(c);
    Q.real_coefficients = true;
    bool ok = true;
    for (const auto& n : nodes.nodes) {
      if (point_distance(n, nodes.nodes[0]) < 1e-12) continue;
      const double na = std::sqrt(std::norm(n.z[0].a) + std::norm(n.z[0].b)) *
                        std::sqrt(std::norm(n.z[1].a) + std::norm(n.z[1].b)) *
                        std::sqrt(std::norm(n.z[2].a) + std::norm(n.z[2].b));
      if (std::abs(wehler::eval_P(Q, n)) / (na * na) < 1e-3 * a.norm()) ok = false;
    }
    if (ok) return Q;
  }
  throw Error(ErrorCode::kBadSignPattern, "no quadratic form is nonzero at all other nodes");
}

std::vector<SurfacePoint> node_search(const Surface& s, const std::vector<SurfacePoint>& centers,
                                      std::uint64_t seed) {
  const double scale = std::max(1.0, s.coeff_norm());
  constexpr int kRandomPerChart = 8;
  const std::size_t jobs = centers.size() + 8;
  std::vector<std::vector<SurfacePoint>> found(jobs);
  parallel_blocks(jobs, [&](std::size_t job) {
    wehler::Chart ch;
    std::vector<std::array<cplx, 3>> starts;
    if (job < centers.size()) {
      ch = wehler::canonical_chart(centers[job]);
      const auto u0 = wehler::local_coords(centers[job], ch);
      for (int m = 0; m < 16; ++m) {
        const cplx unit = m < 8 ? cplx(0.02) : cplx(0.0, 0.02);
        std::array<cplx, 3> u = u0;
        for (int t = 0; t < 3; ++t) u[t] += ((m >> t) & 1 ? 1.0 : -1.0) * unit;
        starts.push_back(u);
      }
    } else {
      const int mask = static_cast<int>(job - centers.size());
      for (int t = 0; t < 3; ++t) {
        ch.side[t] = (mask >> t) & 1 ? wehler::Side::kInfinite : wehler::Side::kAffine;
      }
      std::mt19937_64 rng(seed + 7919 * job);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int k = 0; k < kRandomPerChart; ++k) {
        starts.push_back({cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))});
      }
    }
    for (const auto& u0 : starts) {
      const auto c = wehler::critical_point(s, ch, u0);
      if (!c) continue;
      const wehler::Jet j = wehler::chart_jet(s, ch, *c);
      if (std::abs(j.value) > 1e-8 * scale) continue;
      found[job].push_back(wehler::with_residual(s, wehler::from_local(ch, *c)));
    }
  });
  std::vector<SurfacePoint> out;
  for (const auto& list : found)
    for (const auto& p : list) {
      const bool dup = std::any_of(out.begin(), out.end(),
                                   [&](const SurfacePoint& q) { return point_distance(p, q) < 1e-6; });
      if (!dup) out.push_back(p);
    }
  return out;
}

int real_sheets_near(const Surface& s, const SurfacePoint& p, double r, int n) {
  if (!(r > 0.0) || n < 4) throw Error(ErrorCode::kInput, "need r > 0 and n >= 4");
  const auto c = real_affine(p);
  std::vector<double> pts;
  for (int k = 0; k < 3; ++k) {
    const Surface sk = permute_to_last(s, k);
    std::array<int, 2> other{};
    int o = 0;
    for (int t = 0; t < 3; ++t)
      if (t != k) other[o++] = t;
    for (const auto& q : wehler::real_locus_grid(sk, c[other[0]], c[other[1]], r, n)) {
      if (wehler::is_infinite(q.z[2])) continue;
      std::array<double, 3> x{};
      x[other[0]] = wehler::affine_value(q.z[0]).real();
      x[other[1]] = wehler::affine_value(q.z[1]).real();
      x[k] = wehler::affine_value(q.z[2]).real();
      double d2 = 0.0;
      for (int t = 0; t < 3; ++t) d2 += (x[t] - c[t]) * (x[t] - c[t]);
      if (d2 > r * r) continue;
      pts.insert(pts.end(), x.begin(), x.end());
    }
  }
  if (pts.empty()) return 0;
  return single_linkage(pts, 3, 3.0 * 2.0 * r / n).count;
}

DeformReport deform_222(const Surface& P, const KummerNodes& nodes, const Surface& Q, double eps,
                        std::array<int, 3> signs) {
  if (nodes.nodes.size() != 16) throw Error(ErrorCode::kInput, "expected sixteen nodes");
  for (int e : signs) {
    if (e != 1 && e != -1) throw Error(ErrorCode::kBadSignPattern, "signs must be +1 or -1");
  }
  const double qn = std::max(1e-300, Q.coeff_norm());
  for (int c : {0, 1, 3, 9}) {
    if (std::abs(Q.c[c]) > 1e-12 * qn) {
      throw Error(ErrorCode::kInput, "Q must vanish to second order at the origin");
    }
  }
  for (int i = 0; i < 3; ++i) {
    const double v = wehler::eval_P(Q, nodes.nodes[nodes.real_torsion_nodes[i]]).real();
    if (!(signs[i] * v > 0.0)) throw Error(ErrorCode::kBadSignPattern, "Q has the wrong sign at a real node");
  }
  DeformReport rep;
  rep.surface = P;
  for (int i = 0; i < 27; ++i) rep.surface.c[i] = P.c[i] + eps * Q.c[i];
  rep.surface.real_coefficients = P.real_coefficients && Q.real_coefficients;
  rep.singular_points = node_search(rep.surface, nodes.nodes, 20260);
  rep.origin_signature = signature(real_hessian(rep.surface, nodes.nodes[0]));
  for (std::size_t k = 0; k < nodes.nodes.size(); ++k) {
    NodeStatus st;
    st.node = nodes.nodes[k];
    st.q_value = wehler::eval_P(Q, st.node).real();
    st.singular_after = std::any_of(rep.singular_points.begin(), rep.singular_points.end(),
                                    [&](const SurfacePoint& q) { return point_distance(q, st.node) < 0.05; });
    const auto* real_it = std::find(nodes.real_torsion_nodes.begin(), nodes.real_torsion_nodes.end(),
                                    static_cast<int>(k));
    if (real_it != nodes.real_torsion_nodes.end() && eps != 0.0) {
      const Eigen::Matrix3d H = real_hessian(P, st.node);
      const auto sig = signature(H);
      const double c = eps * st.q_value;
      if (sig[0] == 3 || sig[1] == 3) {
        st.predicted_sheets = (sig[0] == 3) == (c < 0.0) ? 1 : 0;
      } else {
        st.predicted_sheets = c * H.determinant() < 0.0 ? 2 : 1;
      }
    }
    rep.nodes.push_back(st);
  }
  if (eps != 0.0 && rep.surface.real_coefficients) {
    rep.observed_sheets_v1 =
        real_sheets_near(rep.surface, nodes.nodes[nodes.real_torsion_nodes[0]], kSheetRadius, 150);
  }
  if (eps != 0.0) {
    const bool one_at_origin = rep.singular_points.size() == 1 &&
                               point_distance(rep.singular_points[0], nodes.nodes[0]) < 1e-6;
    if (!one_at_origin || rep.origin_signature != std::array<int, 2>{2, 1}) {
      throw Error(ErrorCode::kEpsilonTooLarge, "deformation did not leave a single node at the origin");
    }
  }
  return rep;
}

}  // namespace k3dyn::torus
