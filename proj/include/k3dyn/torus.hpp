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

// Complex 2-tori C^2 / Lambda and their affine automorphisms; Weierstrass
// functions and the Kummer map into (P1)^3; real structures on E x E with
// tau = 1/2 + i t; closed subgroups of R^2 / Z^2.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "k3dyn/fiber.hpp"
#include "k3dyn/wehler.hpp"

namespace k3dyn::torus {

using cplx = std::complex<double>;
using CVec2 = std::array<cplx, 2>;
using CMat2 = std::array<std::array<cplx, 2>, 2>;
using RVec4 = std::array<double, 4>;
using IMat4 = std::array<std::array<long long, 4>, 4>;

// C^2 = R^4 through (Re x, Im x, Re y, Im y).
RVec4 to_real(const CVec2& v);
CVec2 to_complex(const RVec4& r);

struct Lattice4 {
  std::array<RVec4, 4> basis;
  // Lambda_tau^2 = (Z + Z tau)^2 with basis (1,0), (tau,0), (0,1), (0,tau).
  static Lattice4 product(cplx tau);
  double det() const;
  // Coordinates of a real vector in the lattice basis.
  RVec4 coords(const RVec4& v) const;
};

struct AffineAuto {
  CMat2 A{};
  CVec2 S{};
  CVec2 apply(const CVec2& p) const;
  AffineAuto compose(const AffineAuto& g) const;  // this o g
};

// Integer matrix of A in the lattice basis; throws Input if A does not
// preserve Lambda or has determinant other than +-1.
IMat4 lattice_matrix(const AffineAuto& f, const Lattice4& L);
bool is_valid(const AffineAuto& f, const Lattice4& L);
AffineAuto inverse(const AffineAuto& f, const Lattice4& L);

struct ParabolicNormalForm {
  CVec2 u{}, v{};       // A u = u + v, A v = v; points are x u + y v
  cplx s{};             // base translation: conjugate of f is (x + s, y + x)
  cplx omega1{}, omega2{};  // basis of the base lattice pi_1(Lambda)
  fiber::Vec2 base_T{};     // s in the Betti chart of the base
  fiber::SlopeResult closure;  // of <s> in the base
};
ParabolicNormalForm parabolic_normal_form(const AffineAuto& f, const Lattice4& L);

// Skew product on T^3:
// (x2, x3, x4) -> (x2 + s2, x3 + a s1 + b x2, x4 + c s1 + d x2).
struct SkewProduct {
  double s1 = 0.0, s2 = 0.0;
  long long a = 1, b = 0, c = 0, d = 1;
};

enum class UeVerdict { kEquidistributed, kNotEquidistributed, kInconclusive };
const char* ue_verdict_name(UeVerdict v);

struct CharacterAverage {
  std::array<int, 3> klm;
  double modulus;  // max over starting points of |S_N / N|
};
struct UeReport {
  UeVerdict verdict = UeVerdict::kInconclusive;
  double threshold = 0.0;
  double max_average = 0.0;
  std::array<int, 3> worst{};
  std::vector<CharacterAverage> averages;  // one per character up to conjugation
  bool determinant_nonzero = false;
  bool ergodic = false;  // Fourier criterion, independent of the sums
  std::optional<std::array<int, 3>> invariant_character;
};

inline double ue_threshold(std::size_t n) {
  const double N = static_cast<double>(n);
  return 3.0 / std::sqrt(N) * std::sqrt(std::log(N));
}

std::vector<std::array<int, 3>> characters_up_to_conjugation(int K);
// Orbit of the skew product as a 3 x n structure of arrays.
std::array<std::vector<double>, 3> skew_orbit(const SkewProduct& g, std::array<double, 3> x0,
                                              std::size_t n);
UeReport unique_ergodicity_test(const SkewProduct& g, std::size_t n, int K,
                                std::uint64_t seed, int starts = 2);
// Ergodic iff no nonzero (k, l, m) with l b + m d = 0 has
// k s2 + (l a + m c) s1 in Z; searched up to |k|, |l|, |m| <= height.
std::optional<std::array<int, 3>> invariant_character(const SkewProduct& g, int height = 24,
                                                      double tol = 1e-9);
// Slope of log max|S_N/N| against log N over checkpoints.
double ue_decay_exponent(const SkewProduct& g, const std::vector<std::size_t>& checkpoints,
                         int K, std::uint64_t seed);

// Real 2-planes in C^2 = R^4 given by two spanning vectors.
struct Plane {
  std::array<RVec4, 2> span;
};
struct InvariantPlane {
  Plane plane;
  double eta = 0.0;      // plane = (1 + i eta) Pi; infinite for i Pi
  bool is_pi = false;
  bool is_i_pi = false;
  int m = 0;  // eta = beta / (alpha + m) off Pi
  std::array<RVec4, 2> lattice;  // induced rank-2 lattice
};
struct SubtoriReport {
  double alpha = 0.0, beta = 0.0;
  long long index = 1;  // of the q'-image over beta Lambda_Pi
  std::array<RVec4, 2> lambda_pi;  // basis of Lambda meet Pi
  std::vector<InvariantPlane> planes;
};
SubtoriReport invariant_subtori(const Lattice4& L, const std::vector<CMat2>& generators,
                                const Plane& pi, int m_max);
// Residual of A(Pi) inside Pi.
double plane_defect(const CMat2& A, const Plane& pi);
// Rank of Lambda meet plane by small-coefficient integer search.
int lattice_rank_in_plane(const Lattice4& L, const Plane& pi, int height = 6);

// Weierstrass functions of Z + Z tau.
struct Weierstrass {
  cplx tau;
  cplx q;
  cplx g2, g3;
  explicit Weierstrass(cplx tau);
  cplx reduce(cplx z) const;  // representative with both Betti coordinates in [-1/2, 1/2)
  bool is_lattice_point(cplx z, double tol = 1e-12) const;
  cplx p(cplx z) const;
  cplx dp(cplx z) const;
  // Roots e1, e2, e3 = p(1/2), p(tau/2), p((1 + tau)/2).
  std::array<cplx, 3> half_periods() const;
};

// (x(u), x(v), x(-u-v)); poles become [1:0].
std::array<wehler::P1Point, 3> kummer_phi(const Weierstrass& W, cplx u, cplx v);
// Affine version; throws PoleAtOrigin.
std::array<cplx, 3> kummer_phi_affine(const Weierstrass& W, cplx u, cplx v);
// |det| of the three points (x, y, 1) over the product of their norms.
double collinearity_defect(const Weierstrass& W, cplx u, cplx v);
// (x1 x2 + x1 x3 + x2 x3 + g2/4)^2 - (4 x1 x2 x3 - g3)(x1 + x2 + x3).
wehler::Surface kummer_closed_form(const Weierstrass& W);

struct KummerFit {
  wehler::Surface surface;
  std::vector<double> singular_values;  // descending
  double gap_ratio = 0.0;               // sigma_min / sigma_next
  int samples = 0;
  double closed_form_distance = 0.0;  // projective distance to the closed form
};
KummerFit kummer_fit(const Weierstrass& W, int samples, std::mt19937_64& rng);

// Real structures on E x E, tau = 1/2 + i t.
struct RealStructureSolution {
  double t = 0.0;
  int a = -1, b = 0, c = -1, d = 0;
  cplx beta;  // s = beta sigma_A, beta = tau / conj(tau)
};
std::vector<RealStructureSolution> real_structure_classify(double t, double tol = 1e-9);
// 9997 uniform points of (0, 2] plus the three special values.
std::vector<double> real_structure_grid();

// Kummer image in the chart x_i -> 1/x_i, so the node of (0, 0) sits at the
// origin of the affine chart.
struct KummerNodes {
  std::vector<wehler::SurfacePoint> nodes;  // sixteen, origin first
  std::array<int, 3> real_torsion_nodes{};  // indices of v1, v2, v3
};
wehler::Surface swap_charts(const wehler::Surface& s);
KummerNodes kummer_nodes(const Weierstrass& W);

struct NodeStatus {
  wehler::SurfacePoint node;
  double q_value = 0.0;
  bool singular_after = false;
  int predicted_sheets = 0;  // real nodes only: 1 or 2
};
struct DeformReport {
  wehler::Surface surface;
  std::vector<wehler::SurfacePoint> singular_points;
  std::array<int, 2> origin_signature{};  // (positive, negative) of the Hessian
  std::vector<NodeStatus> nodes;
  int observed_sheets_v1 = 0;  // real sheets within 0.03 of v1
};
// Quadratic form Q = sum a_ij x_i x_j with eps_i Q(v_i) = 1 at the three
// real torsion nodes, nonzero at the other nodes.
wehler::Surface default_deformation_q(const KummerNodes& nodes, std::array<int, 3> signs,
                                      std::uint64_t seed);
DeformReport deform_222(const wehler::Surface& P, const KummerNodes& nodes,
                        const wehler::Surface& Q, double eps, std::array<int, 3> signs);
// Singular points found by Newton on the critical system from seeds around
// the given centers plus random starts.
std::vector<wehler::SurfacePoint> node_search(const wehler::Surface& s,
                                              const std::vector<wehler::SurfacePoint>& centers,
                                              std::uint64_t seed);
// Connected components of the real locus within radius r of a point,
// sampled in all three projections.
int real_sheets_near(const wehler::Surface& s, const wehler::SurfacePoint& p, double r, int n);

// Closed subgroups of R^2 / Z^2.
struct Kernel {
  long long m;
  int p, q;  // character (x, y) -> m (p x - q y) mod 1
};
std::vector<Kernel> sparse_subgroups(double eps);
// Euclidean covering radius of the finite subgroup generated by (a/n, b/n).
double covering_radius_grid(long long a, long long b, long long n, int grid = 400);
bool contains(const Kernel& k, long long a, long long b, long long n);

struct SparseCheck {
  int subgroups = 0;
  int non_dense = 0;
  int uncovered = 0;
  std::vector<std::array<long long, 3>> uncovered_examples;  // (a, b, n)
  std::vector<std::array<long long, 3>> nontrivial_non_dense;
};
// Every cyclic subgroup <(a/n, b/n)>, n <= max_den, that the grid test does
// not certify eps-dense must lie in a listed kernel.
SparseCheck sparse_bruteforce(const std::vector<Kernel>& list, double eps, int max_den,
                              int grid = 400);

}  // namespace k3dyn::torus
