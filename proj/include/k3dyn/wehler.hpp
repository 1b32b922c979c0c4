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

// Surfaces of multidegree (2,2,2) in P1 x P1 x P1: evaluation, the three
// involutions, the invariant 2-form, the coordinate fibrations and orbits.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace k3dyn::wehler {

using cplx = std::complex<double>;

// Homogeneous coordinate [a:b]. The component of larger modulus is exactly
// one (ties resolve to b = 1), so the other component is the local chart
// coordinate and lies in the closed unit disk.
struct P1Point {
  cplx a{0.0};
  cplx b{1.0};
};

P1Point make_p1(cplx a, cplx b);
P1Point from_affine(cplx x);
bool is_infinite(const P1Point& z);
// a/b, or infinity (real part) when b = 0.
cplx affine_value(const P1Point& z);

struct Tolerances {
  double point = 1e-10;
  double form = 1e-9;
  // Partials below this fraction of |grad P| are treated as absent.
  double partial = 1e-6;
  double newton = 1e-12;
  int newton_steps = 5;
};

// c[9 i + 3 j + k] multiplies x1^i x2^j x3^k.
struct Surface {
  std::array<cplx, 27> c{};
  bool real_coefficients = false;
  Tolerances tol;

  cplx coeff(int i, int j, int k) const { return c[9 * i + 3 * j + k]; }
  cplx& coeff(int i, int j, int k) { return c[9 * i + 3 * j + k]; }
  double coeff_norm() const;
};

struct SurfacePoint {
  std::array<P1Point, 3> z;
  double residual = 0.0;
};

// Which component of each coordinate is pinned to one.
enum class Side { kAffine, kInfinite };
struct Chart {
  std::array<Side, 3> side{Side::kAffine, Side::kAffine, Side::kAffine};
};

struct Jet {
  cplx value;
  std::array<cplx, 3> grad;
  std::array<std::array<cplx, 3>, 3> hess;
};

Chart canonical_chart(const SurfacePoint& p);
// Local coordinates of p in chart; throws Input if p is not in that chart.
std::array<cplx, 3> local_coords(const SurfacePoint& p, const Chart& chart);
SurfacePoint from_local(const Chart& chart, const std::array<cplx, 3>& u);
Jet chart_jet(const Surface& s, const Chart& chart, const std::array<cplx, 3>& u);

cplx eval_P(const Surface& s, const SurfacePoint& p);
SurfacePoint with_residual(const Surface& s, SurfacePoint p);

struct Quadratic {
  cplx A, B, C;  // A a^2 + B a b + C b^2 in the homogeneous coordinate k
};
Quadratic fiber_quadratic(const Surface& s, const SurfacePoint& p, int k);
// Roots of a binary quadratic form; both roots when the form is nonzero.
std::array<P1Point, 2> quadratic_roots(const Quadratic& q);

// Involution along axis k (0-based). Re-projects when the residual drifts.
SurfacePoint sigma(const Surface& s, const SurfacePoint& p, int k);

// Newton re-projection along conj(grad P) in the canonical chart.
SurfacePoint reproject(const Surface& s, const SurfacePoint& p);

// (dx1^dx2/P_3, dx2^dx3/P_1, dx3^dx1/P_2) evaluated on a Hermitian
// orthonormal frame of the tangent plane in the canonical chart.
struct OmegaValues {
  std::array<std::optional<cplx>, 3> values;
};
OmegaValues omega(const Surface& s, const SurfacePoint& p);

P1Point fibration_project(const SurfacePoint& p, int k);

// |d pi_g ^ d pi_h| on a unit tangent frame; vanishes on Tang(pi_g, pi_h).
double tangency_residual(const Surface& s, const SurfacePoint& p, int g, int h);
double tangency_residual_in_chart(const Surface& s, const SurfacePoint& p,
                                  int g, int h, const Chart& chart);

// Reduced word in the three involutions; letters are 0-based axes and the
// word l0 l1 ... acts as sigma_l0 o sigma_l1 o ... (rightmost first).
struct AutWord {
  std::vector<int> letters;
  static AutWord parse(const std::string& text);  // "1,2,3" (1-based)
  static AutWord from(std::vector<int> letters0);
  AutWord inverse() const;
  std::string str() const;  // 1-based, comma separated
};

SurfacePoint apply_word(const Surface& s, const AutWord& w, const SurfacePoint& p);

struct OrbitStats {
  std::size_t steps = 0;
  double max_residual = 0.0;
  double max_imag = 0.0;
};
using OrbitSink = std::function<void(std::size_t step, const SurfacePoint& p)>;
OrbitStats iterate_word(const Surface& s, const AutWord& w, SurfacePoint p,
                        std::size_t n, const OrbitSink& sink = nullptr);

double max_imag(const SurfacePoint& p);

// Random constructions.
Surface random_surface(std::mt19937_64& rng, bool real);
// A surface through the origin of the affine chart.
Surface random_real_surface_through_origin(std::mt19937_64& rng);
SurfacePoint sample_point(const Surface& s, std::mt19937_64& rng);

std::vector<SurfacePoint> real_locus_sample(const Surface& s, std::size_t count,
                                            std::mt19937_64& rng);
// Real points whose (x1, x2) lie on a square grid around (c1, c2) in the
// affine chart.
std::vector<SurfacePoint> real_locus_grid(const Surface& s, double c1, double c2,
                                          double half_width, int n);

// Newton on grad P = 0 in a fixed chart.
std::optional<std::array<cplx, 3>> critical_point(const Surface& s,
                                                  const Chart& chart,
                                                  std::array<cplx, 3> u0,
                                                  int max_iter = 60);

struct SmoothnessReport {
  bool smooth = true;
  std::vector<SurfacePoint> singular_witnesses;
  int starts = 0;
};
// Heuristic: random multistart Newton on the critical system in all eight
// charts; a converged critical point with P = 0 refutes smoothness.
SmoothnessReport certify_smooth(const Surface& s, std::mt19937_64& rng,
                                int starts_per_chart = 24);

}  // namespace k3dyn::wehler
