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

// Action of words in the three involutions on the rank-3 lattice spanned by
// the fibration classes [F1], [F2], [F3].

#include <array>
#include <optional>
#include <random>
#include <string>

#include "k3dyn/wehler.hpp"

namespace k3dyn::cohomology {

using IVec = std::array<long long, 3>;
using IMat = std::array<IVec, 3>;

IMat identity();
IMat mul(const IMat& a, const IMat& b);
IVec act(const IMat& m, const IVec& v);
long long form(const IMat& q, const IVec& x, const IVec& y);
bool operator_equal(const IMat& a, const IMat& b);

struct IntersectionForm {
  IMat Q{};
};

// Q[i][j] for i != j counts points of F_i . F_j on random fibers.
IntersectionForm derive_intersection_form(const wehler::Surface& s,
                                          std::mt19937_64& rng, int samples = 16);
IntersectionForm fibration_form();  // the value derived for any smooth surface
// Number of (positive, negative) eigenvalues.
std::array<int, 2> signature(const IntersectionForm& q);

// Unique integer involutive isometry fixing [F_i], [F_j] (i, j != k).
IMat involution_action(const IntersectionForm& q, int k);
// Push-forward of sigma_l0 o sigma_l1 o ...: M_l0 M_l1 ...
IMat word_action(const IntersectionForm& q, const wehler::AutWord& w);

// det(x I - M) = x^3 + c[2] x^2 + c[1] x + c[0].
std::array<long long, 3> characteristic_polynomial(const IMat& m);

enum class IsometryType { kElliptic, kParabolic, kLoxodromic };
const char* type_name(IsometryType t);

struct IsometryReport {
  IsometryType type = IsometryType::kElliptic;
  double lambda = 1.0;
  double entropy = 0.0;
  std::optional<IVec> fixed_ray;  // primitive isotropic class, parabolic only
  std::array<long long, 3> charpoly{};
};

inline constexpr double kLambdaEps = 1e-9;

IsometryReport classify(const IntersectionForm& q, const IMat& m);
IsometryReport classify_word(const IntersectionForm& q, const wehler::AutWord& w);

struct GrowthFit {
  double exponent = 0.0;   // slope of log <M^n a, a> against log n
  double log_rate = 0.0;   // slope against n
  bool loxodromic = false;
};
GrowthFit growth_exponent(const IntersectionForm& q, const wehler::AutWord& w,
                          int n_max);

// Angle of an isotropic class on the circle P(isotropic cone).
struct ConeCircle {
  std::array<std::array<double, 3>, 3> to_diag;    // x -> y with Q = y0^2 - y1^2 - y2^2
  std::array<std::array<double, 3>, 3> from_diag;
  explicit ConeCircle(const IntersectionForm& q);
  double angle(const std::array<double, 3>& x) const;
  std::array<double, 3> point(double theta) const;
};

struct PingPongCertificate {
  bool certified = false;
  int n0 = 0;
  double theta_g = 0.0, theta_h = 0.0, half_width = 0.0;
  IVec u_g{}, u_h{};
};

inline constexpr int kPingPongSamples = 256;
inline constexpr double kPingPongMargin = 1e-6;

PingPongCertificate certify_special_pair(const IntersectionForm& q,
                                         const wehler::AutWord& g,
                                         const wehler::AutWord& h, int n);

}  // namespace k3dyn::cohomology
