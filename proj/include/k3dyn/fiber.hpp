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

// Translation dynamics on genus-one fibers: Betti charts, rotation vectors
// and their slope classification, the I_b local model, R-curves and the
// curvature of z^k images.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "k3dyn/wehler.hpp"

namespace k3dyn::fiber {

using cplx = std::complex<double>;
using Vec2 = std::array<double, 2>;

// Fractional part in [0, 1).
double frac(double x);
// Representative of x mod 1 in (-1/2, 1/2].
double wrap_half(double x);

// z = x + y tau  <->  (x, y) mod Z^2.
Vec2 betti_chart(cplx tau, cplx z);
cplx betti_inverse(cplx tau, Vec2 xy);

struct RotationVector {
  Vec2 T{0.0, 0.0};  // in [0,1)^2
  double err = 0.0;
  std::size_t n = 0;
};

struct RotationOptions {
  // Resolution of the chart coordinates themselves.
  double coord_uncertainty = 1e-12;
  // Largest tolerated deviation of a single step from the mean step.
  double max_step_deviation = 1e-4;
};

// Mean displacement of a continuous lift of orbit[0..N]. Throws
// NotATranslation when the steps are not all equal up to the guard.
RotationVector rotation_vector(std::span<const Vec2> orbit,
                               const RotationOptions& opt = {});

struct CircleDescriptor {
  int k = 1;
  int p = 1, q = 0;  // primitive, q > 0 or (p, q) = (1, 0)
};

enum class SlopeKind { kTorsion, kCircles, kDense, kAmbiguous };
const char* slope_kind_name(SlopeKind k);

struct SlopeResult {
  SlopeKind kind = SlopeKind::kDense;
  CircleDescriptor circles;     // kCircles
  int torsion_order = 0;        // kTorsion
  std::vector<CircleDescriptor> candidates;  // kAmbiguous
};

inline constexpr double kDetectionMargin = 6.0;
inline constexpr int kDefaultDmax = 100;

// Relations k (q T_x - p T_y) = 0 mod 1 are accepted when they hold within
// margin * err * k (|p| + |q|), the error propagated through the relation.
SlopeResult slope_detect(const RotationVector& T, int dmax = kDefaultDmax,
                         double margin = kDetectionMargin);

// I_b local model: tau(w) = b log(w) / (2 pi i) on the principal branch.
struct LocalTau {
  cplx tau;
  int branch_shift;  // tau changes by this much per counterclockwise turn of w
};
LocalTau local_tau_Ib(cplx w, int b);
// tau after `winding` counterclockwise turns of w starting on the principal
// branch.
cplx tau_continued(cplx w, int b, int winding);

std::array<int, 2> monodromy_slope(int b, int winding, std::array<int, 2> pq);

struct BettiFormValue {
  cplx alpha_dw;  // coefficients of alpha~ = alpha_dw dw + alpha_dv dv
  cplx alpha_dv;
  double fiber_density;  // omega_B restricted to the fiber, per dx dy in v
};
BettiFormValue betti_form_Ib(cplx w, cplx v, int b);
// alpha~ applied to a tangent vector (dw, dv).
cplx alpha_pairing(cplx w, cplx v, int b, cplx dw, cplx dv);
// Integral of omega_B over C^x / w^{bZ}: Gauss-Legendre in log|v| and the
// periodic trapezoid rule in arg v over the annulus |w|^b < |v| <= 1.
double fiber_integral(cplx w, int b, int angular_nodes = 64);

// Arc c(y) = eta + i y + alpha y^2, |y| <= r, pushed through z -> z^k.
struct CurvatureReport {
  double max_curvature = 0.0;
  double at_y = 0.0;
  double lower_bound = 0.0;  // eta^-k (k - 1 - 2 alpha eta) / k
};
CurvatureReport curvature_blowup(double eta, int k, double alpha = 0.0, double r = 1.0,
                                 int samples = 20001);
// Same finite-difference curvature for the unmapped arc.
double arc_max_curvature(double eta, double alpha, double r, int samples = 20001);

// R-curves.
struct TModel {
  std::vector<cplx> coeffs;  // t(w) = sum c_j w^j
  cplx operator()(cplx w) const;
};
struct TauModel {
  bool ib = false;
  cplx tau{0.0, 1.0};  // used when !ib
  int b = 1;
  cplx operator()(cplx w) const;
};
enum class GridPlane {
  kW,    // grid coordinates are (Re w, Im w)
  kLog,  // grid coordinates are s = x + i y with w = exp(-s)
};
struct RCurveProblem {
  TModel t;
  TauModel tau;
  double alpha = 0.0, beta = 0.0;
  int p = 1, q = 0;
  GridPlane plane = GridPlane::kW;
};
struct Grid2 {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  int nx = 512, ny = 512;
  double cell() const;
};

// Im((t - alpha - beta tau) conj(p + q tau)): same zero set as the quotient
// form away from p + q tau = 0, and smooth across it.
double r_residual(const RCurveProblem& prob, double x, double y);

struct CurveVertex {
  double x, y;
  double residual;  // |F| / |grad F| after refinement
  bool singular;
};
struct Polyline {
  std::vector<CurveVertex> v;
  bool closed = false;
};
struct RCurveOptions {
  double curve_tolerance = 1e-8;
  int newton_steps = 8;
  double singular_gradient = 1e-6;  // relative to the grid's median gradient
};
std::vector<Polyline> trace_R_curve(const RCurveProblem& prob, const Grid2& grid,
                                    const RCurveOptions& opt = {});

// The model t(w) = t0 w^k, tau of type I_b, (alpha, beta) = (0, 0), on the
// log plane. Its zero set is x = (y - y1) tan(k (y - y0)) with
// y1 = 2 pi p / (q b) and k y0 = arg t0.
struct TanFamily {
  int k = 1;
  double y0 = 0.0;
  int p = -1, q = 1, b = 8;
  double y1() const;
  RCurveProblem problem() const;
  double x_of(double y) const;
};
// Dense samples of the closed form inside the grid window.
std::vector<Vec2> tan_closed_form(const TanFamily& fam, const Grid2& grid,
                                  double max_gap = 1e-3);
double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);
std::vector<Vec2> vertices(const std::vector<Polyline>& lines);

// Rotation number of g = sigma_i o sigma_j on the real fiber circle of
// pi_k through a real point, measured in the coordinate given by the
// invariant holomorphic 1-form.
struct RealCircle {
  int axis = 2;
  wehler::P1Point fiber;             // z_axis, real
  std::vector<Vec2> theta;           // traced loop in angle coordinates
  std::vector<double> measure;       // cumulative, normalized to [0, 1]
  double total = 0.0;                // unnormalized mass
  std::uint64_t id = 0;              // set by trace_real_circle; keys the lookup index
  double coordinate(const wehler::SurfacePoint& p) const;  // in [0, 1)
  double distance(const wehler::SurfacePoint& p) const;     // to the loop
  wehler::SurfacePoint point_at(const wehler::Surface& s, double phi) const;
};
RealCircle trace_real_circle(const wehler::Surface& s, const wehler::SurfacePoint& p,
                             int axis, double step = 2e-4);

struct RealCircleRotation {
  RotationVector T;
  SlopeResult slope;
  int power = 1;  // 2 when g swaps two real circles of the fiber
};
RealCircleRotation real_circle_rotation(const wehler::Surface& s,
                                        const wehler::SurfacePoint& p, int axis,
                                        std::size_t n);

}  // namespace k3dyn::fiber
