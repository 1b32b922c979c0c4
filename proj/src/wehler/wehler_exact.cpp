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

#include "k3dyn/wehler_exact.hpp"

#include "k3dyn/error.hpp"

namespace k3dyn::wehler {

GaussRational operator+(const GaussRational& x, const GaussRational& y) {
  return {x.re + y.re, x.im + y.im};
}
GaussRational operator-(const GaussRational& x, const GaussRational& y) {
  return {x.re - y.re, x.im - y.im};
}
GaussRational operator-(const GaussRational& x) { return {-x.re, -x.im}; }
GaussRational operator*(const GaussRational& x, const GaussRational& y) {
  return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}
GaussRational operator/(const GaussRational& x, const GaussRational& y) {
  const Rational n = y.re * y.re + y.im * y.im;
  if (n == 0) throw Error(ErrorCode::kInput, "division by zero in Q(i)");
  return {(x.re * y.re + x.im * y.im) / n, (x.im * y.re - x.re * y.im) / n};
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(text));
    const boost::multiprecision::cpp_int p(text.substr(0, slash));
    const boost::multiprecision::cpp_int q(text.substr(slash + 1));
    if (q == 0) throw Error(ErrorCode::kInput, "zero denominator in " + text);
    return Rational(p, q);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const Error*>(&e)) throw;
    throw Error(ErrorCode::kInput, "malformed rational '" + text + "'");
  }
}

ExactP1 make_exact_p1(const GaussRational& a, const GaussRational& b) {
  if (b.is_zero()) {
    if (a.is_zero()) throw Error(ErrorCode::kInput, "P1 point with both coordinates zero");
    return {GaussRational(Rational(1)), GaussRational(Rational(0))};
  }
  return {a / b, GaussRational(Rational(1))};
}

namespace {

std::array<GaussRational, 3> monomials(const ExactP1& z) {
  return {z.b * z.b, z.a * z.b, z.a * z.a};
}

}  // namespace

GaussRational eval_exact(const ExactSurface& s, const ExactPoint& p) {
  const auto m0 = monomials(p.z[0]);
  const auto m1 = monomials(p.z[1]);
  const auto m2 = monomials(p.z[2]);
  GaussRational v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const auto& c = s.coeff(i, j, k);
        if (!c.is_zero()) v = v + c * m0[i] * m1[j] * m2[k];
      }
  return v;
}

ExactPoint sigma_exact(const ExactSurface& s, const ExactPoint& p, int k) {
  std::array<GaussRational, 3> q;
  const int i = (k + 1) % 3, j = (k + 2) % 3;
  const auto mi = monomials(p.z[i]);
  const auto mj = monomials(p.z[j]);
  for (int e = 0; e < 3; ++e)
    for (int ei = 0; ei < 3; ++ei)
      for (int ej = 0; ej < 3; ++ej) {
        std::array<int, 3> ex{};
        ex[k] = e;
        ex[i] = ei;
        ex[j] = ej;
        q[e] = q[e] + s.coeff(ex[0], ex[1], ex[2]) * mi[ei] * mj[ej];
      }
  const GaussRational &A = q[2], &B = q[1], &C = q[0];
  if (A.is_zero() && B.is_zero() && C.is_zero()) {
    throw Error(ErrorCode::kDegenerateFiberLine, "fiber line contained in the surface");
  }
  const GaussRational &a0 = p.z[k].a, &b0 = p.z[k].b;
  const std::array<std::array<GaussRational, 2>, 3> cand = {{
      {-(B * b0) - A * a0, A * b0},
      {C * b0, A * a0},
      {C * a0, -(B * a0) - C * b0},
  }};
  ExactPoint out = p;
  for (const auto& c : cand) {
    if (!c[0].is_zero() || !c[1].is_zero()) {
      out.z[k] = make_exact_p1(c[0], c[1]);
      return out;
    }
  }
  return out;
}

void random_exact_instance(std::mt19937_64& rng, ExactSurface* s, ExactPoint* p,
                           int height) {
  std::uniform_int_distribution<int> num(-height, height);
  std::uniform_int_distribution<int> den(1, height);
  auto r = [&] { return Rational(num(rng), den(rng)); };
  for (auto& c : s->c) c = GaussRational(r(), r());
  for (auto& z : p->z) z = make_exact_p1(GaussRational(r(), r()), GaussRational(Rational(1)));
  s->coeff(0, 0, 0) = GaussRational();
  const GaussRational v = eval_exact(*s, *p);
  s->coeff(0, 0, 0) = -v;
}

}  // namespace k3dyn::wehler
