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

#include "k3dyn/error.hpp"
#include "k3dyn/torus.hpp"

namespace k3dyn::torus {
namespace {

Eigen::Matrix4d basis_matrix(const Lattice4& L) {
  Eigen::Matrix4d B;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) B(r, c) = L.basis[c][r];
  return B;
}

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

IMat4 round_integer(const Eigen::Matrix4d& M, const char* what) {
  IMat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double r = std::round(M(i, j));
      if (std::abs(M(i, j) - r) > 1e-8) {
        throw Error(ErrorCode::kInput, std::string(what) + " does not preserve the lattice");
      }
      out[i][j] = static_cast<long long>(r);
    }
  return out;
}

using IVec4 = std::array<long long, 4>;

// Z-basis of the span of integer vectors (column echelon form).
std::vector<IVec4> integer_span_basis(std::vector<IVec4> cols) {
  std::vector<IVec4> basis;
  for (int row = 0; row < 4; ++row) {
    // Euclid on the entries of this row across the remaining columns.
    while (true) {
      int piv = -1;
      for (int c = 0; c < static_cast<int>(cols.size()); ++c) {
        if (cols[c][row] != 0 && (piv < 0 || std::llabs(cols[c][row]) < std::llabs(cols[piv][row]))) {
          piv = c;
        }
      }
      if (piv < 0) break;
      bool reduced = false;
      for (int c = 0; c < static_cast<int>(cols.size()); ++c) {
        if (c == piv || cols[c][row] == 0) continue;
        const long long f = cols[c][row] / cols[piv][row];
        for (int r = 0; r < 4; ++r) cols[c][r] -= f * cols[piv][r];
        reduced = true;
      }
      if (!reduced) {
        basis.push_back(cols[piv]);
        cols.erase(cols.begin() + piv);
        break;
      }
    }
  }
  return basis;
}

}  // namespace

RVec4 to_real(const CVec2& v) { return {v[0].real(), v[0].imag(), v[1].real(), v[1].imag()}; }
CVec2 to_complex(const RVec4& r) { return {cplx(r[0], r[1]), cplx(r[2], r[3])}; }

Lattice4 Lattice4::product(cplx tau) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorCode::kInput, "tau must lie in the upper half-plane");
  Lattice4 L;
  L.basis = {RVec4{1, 0, 0, 0}, RVec4{tau.real(), tau.imag(), 0, 0}, RVec4{0, 0, 1, 0},
             RVec4{0, 0, tau.real(), tau.imag()}};
  return L;
}

double Lattice4::det() const { return basis_matrix(*this).determinant(); }

RVec4 Lattice4::coords(const RVec4& v) const {
  const Eigen::Vector4d x = basis_matrix(*this).partialPivLu().solve(
      Eigen::Vector4d(v[0], v[1], v[2], v[3]));
  return {x(0), x(1), x(2), x(3)};
}

CVec2 AffineAuto::apply(const CVec2& p) const {
  return {A[0][0] * p[0] + A[0][1] * p[1] + S[0], A[1][0] * p[0] + A[1][1] * p[1] + S[1]};
}

AffineAuto AffineAuto::compose(const AffineAuto& g) const {
  AffineAuto h;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) h.A[i][j] = A[i][0] * g.A[0][j] + A[i][1] * g.A[1][j];
  h.S = apply(g.S);
  return h;
}

IMat4 lattice_matrix(const AffineAuto& f, const Lattice4& L) {
  if (std::abs(L.det()) < 1e-12) throw Error(ErrorCode::kInput, "degenerate lattice");
  const Eigen::Matrix4d B = basis_matrix(L);
  const Eigen::Matrix4d M = B.inverse() * real_matrix(f.A) * B;
  IMat4 out = round_integer(M, "linear part");
  Eigen::Matrix4d Mi;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) Mi(i, j) = static_cast<double>(out[i][j]);
  if (std::abs(std::abs(Mi.determinant()) - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInput, "linear part is not invertible on the lattice");
  }
  return out;
}

bool is_valid(const AffineAuto& f, const Lattice4& L) {
  try {
    lattice_matrix(f, L);
    return true;
  } catch (const Error&) {
    return false;
  }
}

AffineAuto inverse(const AffineAuto& f, const Lattice4& L) {
  lattice_matrix(f, L);
  const cplx det = f.A[0][0] * f.A[1][1] - f.A[0][1] * f.A[1][0];
  AffineAuto g;
  g.A = {{{f.A[1][1] / det, -f.A[0][1] / det}, {-f.A[1][0] / det, f.A[0][0] / det}}};
  const CVec2 t = AffineAuto{g.A, {}}.apply(f.S);
  g.S = {-t[0], -t[1]};
  return g;
}

ParabolicNormalForm parabolic_normal_form(const AffineAuto& f, const Lattice4& L) {
  const IMat4 MA = lattice_matrix(f, L);
  CMat2 N = f.A;
  N[0][0] -= 1.0;
  N[1][1] -= 1.0;
  double nmax = 0.0;
  for (const auto& r : N)
    for (const auto& x : r) nmax = std::max(nmax, std::abs(x));
  if (nmax < 1e-12) throw Error(ErrorCode::kNotParabolic, "linear part is the identity");
  double n2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) n2 = std::max(n2, std::abs(N[i][0] * N[0][j] + N[i][1] * N[1][j]));
  if (n2 > 1e-9 * nmax * nmax) throw Error(ErrorCode::kNotParabolic, "linear part is not unipotent");

  ParabolicNormalForm nf;
  const int j = std::abs(N[0][0]) + std::abs(N[1][0]) >= std::abs(N[0][1]) + std::abs(N[1][1]) ? 0 : 1;
  nf.u = {j == 0 ? cplx(1.0) : cplx(0.0), j == 1 ? cplx(1.0) : cplx(0.0)};
  nf.v = {N[0][j], N[1][j]};
  // S = s_u u + s_v v.
  const cplx det = nf.u[0] * nf.v[1] - nf.u[1] * nf.v[0];
  nf.s = (f.S[0] * nf.v[1] - f.S[1] * nf.v[0]) / det;

  // pi_1(Lambda) is N(Lambda) measured in units of v.
  std::vector<IVec4> cols(4);
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) cols[c][r] = MA[r][c] - (r == c ? 1 : 0);
  const auto basis = integer_span_basis(cols);
  if (basis.size() != 2) throw Error(ErrorCode::kNotParabolic, "image of A - I is not rank 2");
  const double vn = std::norm(nf.v[0]) + std::norm(nf.v[1]);
  std::array<cplx, 2> om;
  for (int b = 0; b < 2; ++b) {
    RVec4 w{0, 0, 0, 0};
    for (int k = 0; k < 4; ++k)
      for (int r = 0; r < 4; ++r) w[r] += static_cast<double>(basis[b][k]) * L.basis[k][r];
    const CVec2 wc = to_complex(w);
    om[b] = (wc[0] * std::conj(nf.v[0]) + wc[1] * std::conj(nf.v[1])) / vn;
  }
  if ((om[1] / om[0]).imag() < 0.0) om[1] = -om[1];
  nf.omega1 = om[0];
  nf.omega2 = om[1];
  // s = x omega1 + y omega2 with x, y real.
  const double d = (std::conj(om[0]) * om[1]).imag();
  const double y = (std::conj(om[0]) * nf.s).imag() / d;
  const double x = (nf.s * std::conj(om[1])).imag() / (om[0] * std::conj(om[1])).imag();
  nf.base_T = {fiber::frac(x), fiber::frac(y)};
  fiber::RotationVector rv;
  rv.T = nf.base_T;
  rv.err = 1e-12;
  nf.closure = fiber::slope_detect(rv);
  return nf;
}

}  // namespace k3dyn::torus
