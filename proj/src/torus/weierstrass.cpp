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

#include <cmath>

#include "k3dyn/error.hpp"
#include "k3dyn/torus.hpp"

namespace k3dyn::torus {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTail = 1e-18;

}  // namespace

Weierstrass::Weierstrass(cplx t) : tau(t) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorCode::kInput, "tau must lie in the upper half-plane");
  q = std::exp(cplx(0.0, 2.0 * kPi) * tau);
  // Eisenstein series E4 = 1 + 240 sum n^3 q^n / (1 - q^n) and
  // E6 = 1 - 504 sum n^5 q^n / (1 - q^n).
  cplx e4 = 1.0, e6 = 1.0, qn = 1.0;
  const double aq = std::abs(q);
  for (int n = 1; n < 10000; ++n) {
    qn *= q;
    const double nd = n;
    const cplx r = qn / (1.0 - qn);
    e4 += 240.0 * nd * nd * nd * r;
    e6 -= 504.0 * nd * nd * nd * nd * nd * r;
    if (std::pow(aq, n) * nd * nd * nd * nd * nd < kTail) break;
  }
  const double pi2 = kPi * kPi;
  g2 = (4.0 * pi2 * pi2 / 3.0) * e4;
  g3 = (8.0 * pi2 * pi2 * pi2 / 27.0) * e6;
}

cplx Weierstrass::reduce(cplx z) const {
  double y = z.imag() / tau.imag();
  double x = z.real() - tau.real() * y;
  x -= std::round(x);
  y -= std::round(y);
  return x + y * tau;
}

bool Weierstrass::is_lattice_point(cplx z, double tol) const {
  return std::abs(reduce(z)) <= tol;
}

// Row-summed q-expansion:
// p(z) = pi^2 / sin^2(pi z) - pi^2 / 3
//        - 4 pi^2 sum_n [a/(1-a)^2 + b/(1-b)^2 - 2 q^n/(1-q^n)^2],
// a = q^n u, b = q^n / u, u = exp(2 pi i z). Each row decays like
// |q|^(n - 1/2) once z is reduced.
cplx Weierstrass::p(cplx z) const {
  z = reduce(z);
  const cplx u = std::exp(cplx(0.0, 2.0 * kPi) * z);
  const cplx ui = 1.0 / u;
  const cplx s = std::sin(kPi * z);
  cplx acc = 0.0, qn = 1.0;
  const double scale = std::max(std::abs(u), std::abs(ui));
  for (int n = 1; n < 10000; ++n) {
    qn *= q;
    const cplx a = qn * u, b = qn * ui;
    acc += a / ((1.0 - a) * (1.0 - a)) + b / ((1.0 - b) * (1.0 - b)) -
           2.0 * qn / ((1.0 - qn) * (1.0 - qn));
    if (std::abs(qn) * scale < kTail) break;
  }
  const double pi2 = kPi * kPi;
  return pi2 / (s * s) - pi2 / 3.0 - 4.0 * pi2 * acc;
}

cplx Weierstrass::dp(cplx z) const {
  z = reduce(z);
  const cplx u = std::exp(cplx(0.0, 2.0 * kPi) * z);
  const cplx ui = 1.0 / u;
  const cplx s = std::sin(kPi * z), c = std::cos(kPi * z);
  cplx acc = 0.0, qn = 1.0;
  const double scale = std::max(std::abs(u), std::abs(ui));
  for (int n = 1; n < 10000; ++n) {
    qn *= q;
    const cplx a = qn * u, b = qn * ui;
    acc += a * (1.0 + a) / ((1.0 - a) * (1.0 - a) * (1.0 - a)) -
           b * (1.0 + b) / ((1.0 - b) * (1.0 - b) * (1.0 - b));
    if (std::abs(qn) * scale < kTail) break;
  }
  const double pi3 = kPi * kPi * kPi;
  return -2.0 * pi3 * c / (s * s * s) - 4.0 * kPi * kPi * cplx(0.0, 2.0 * kPi) * acc;
}

std::array<cplx, 3> Weierstrass::half_periods() const {
  return {p(0.5), p(0.5 * tau), p(0.5 + 0.5 * tau)};
}

std::array<cplx, 3> kummer_phi_affine(const Weierstrass& W, cplx u, cplx v) {
  const std::array<cplx, 3> pts{u, v, -u - v};
  std::array<cplx, 3> out;
  for (int i = 0; i < 3; ++i) {
    if (W.is_lattice_point(pts[i], 1e-9)) throw Error(ErrorCode::kPoleAtOrigin, "x has a pole");
    out[i] = W.p(pts[i]);
  }
  return out;
}

std::array<wehler::P1Point, 3> kummer_phi(const Weierstrass& W, cplx u, cplx v) {
  const std::array<cplx, 3> pts{u, v, -u - v};
  std::array<wehler::P1Point, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = W.is_lattice_point(pts[i], 1e-9) ? wehler::make_p1(1.0, 0.0)
                                              : wehler::from_affine(W.p(pts[i]));
  }
  return out;
}

double collinearity_defect(const Weierstrass& W, cplx u, cplx v) {
  const std::array<cplx, 3> pts{u, v, -u - v};
  std::array<std::array<cplx, 3>, 3> m;
  double norms = 1.0;
  for (int i = 0; i < 3; ++i) {
    m[i] = {W.p(pts[i]), W.dp(pts[i]), 1.0};
    norms *= std::sqrt(std::norm(m[i][0]) + std::norm(m[i][1]) + 1.0);
  }
  const cplx det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return std::abs(det) / norms;
}

}  // namespace k3dyn::torus
