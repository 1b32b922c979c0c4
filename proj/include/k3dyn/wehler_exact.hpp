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

#pragma once

// Exact arithmetic over Q(i): the involutions are rational maps, so
// sigma_k o sigma_k = id is an identity of rationals here.

#include <array>
#include <random>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace k3dyn::wehler {

using Rational = boost::multiprecision::cpp_rational;

struct GaussRational {
  Rational re{0};
  Rational im{0};
  GaussRational() = default;
  GaussRational(Rational r) : re(std::move(r)) {}  // NOLINT: implicit from Q
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  bool is_zero() const { return re == 0 && im == 0; }
  friend bool operator==(const GaussRational&, const GaussRational&) = default;
};

GaussRational operator+(const GaussRational& x, const GaussRational& y);
GaussRational operator-(const GaussRational& x, const GaussRational& y);
GaussRational operator-(const GaussRational& x);
GaussRational operator*(const GaussRational& x, const GaussRational& y);
GaussRational operator/(const GaussRational& x, const GaussRational& y);

Rational parse_rational(const std::string& text);  // "p/q" or "p"

// [x:1] or [1:0].
struct ExactP1 {
  GaussRational a{Rational(0)};
  GaussRational b{Rational(1)};
  friend bool operator==(const ExactP1&, const ExactP1&) = default;
};
ExactP1 make_exact_p1(const GaussRational& a, const GaussRational& b);

struct ExactSurface {
  std::array<GaussRational, 27> c;
  GaussRational& coeff(int i, int j, int k) { return c[9 * i + 3 * j + k]; }
  const GaussRational& coeff(int i, int j, int k) const { return c[9 * i + 3 * j + k]; }
};

struct ExactPoint {
  std::array<ExactP1, 3> z;
  friend bool operator==(const ExactPoint&, const ExactPoint&) = default;
};

GaussRational eval_exact(const ExactSurface& s, const ExactPoint& p);
ExactPoint sigma_exact(const ExactSurface& s, const ExactPoint& p, int k);

// Random rational surface with a prescribed rational point on it: the
// constant coefficient is solved for.
void random_exact_instance(std::mt19937_64& rng, ExactSurface* s, ExactPoint* p,
                           int height = 9);

}  // namespace k3dyn::wehler
