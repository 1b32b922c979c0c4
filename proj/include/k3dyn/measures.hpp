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

// Empirical invariant measures: correlation dimension, invariance defects,
// discrepancies, and the orbit-closure classifier for torus and Wehler
// systems.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "k3dyn/fiber.hpp"
#include "k3dyn/simd/kernels.hpp"
#include "k3dyn/wehler.hpp"

namespace k3dyn::measures {

struct DimensionOptions {
  double r_min = 0.04, r_max = 0.4;
  int radii = 10;
  bool periodic = false;  // flat metric of R^d / Z^d
  std::size_t reference_rows = 1000;
  int bootstrap = 100;
  std::uint64_t seed = 1;
  double min_r2 = 0.98;
};

struct DimensionEstimate {
  double value = 0.0;
  double lo = 0.0, hi = 0.0;  // bootstrap 2.5% / 97.5% quantiles
  double r2 = 1.0;
  std::vector<double> radii;
  std::vector<double> correlation;  // C(r): fraction of pairs closer than r
};

// Grassberger-Procaccia slope of log C(r) against log r over the radii
// schedule. Throws InsufficientScaling when the fit has R^2 < min_r2 and
// Input for fewer than 2 points.
DimensionEstimate correlation_dimension(const simd::Soa& cloud, const DimensionOptions& opt = {});

// g maps one point (dim coordinates) to its image.
using PointMap = std::function<void(std::span<const double> in, std::span<double> out)>;

// max over the characters e(k . x), 0 < |k|_inf <= degree, of
// |mean f(x) - mean f(g x)| on the cloud.
double invariance_defect(const simd::Soa& cloud, const PointMap& g, int degree = 3);

// Star discrepancy against Lebesgue measure: exact in one dimension,
// over the corners of a bins x bins grid in two.
double star_discrepancy_1d(std::vector<double> x);
double star_discrepancy_2d(std::span<const double> x, std::span<const double> y, int bins = 256);

struct CircleEquidistribution {
  int components = 0;
  std::vector<double> discrepancy;  // per component, arclength coordinate
  std::vector<std::size_t> sizes;
  double max_discrepancy = 0.0;
};
// Orbit points in a Betti chart, expected on d.k parallel circles of slope
// (d.p, d.q). Components come from single-linkage clustering of the
// transverse coordinate q x - p y at the gap threshold; throws
// ClusterCountMismatch when their number is not d.k.
CircleEquidistribution circle_equidistribution(std::span<const fiber::Vec2> orbit,
                                               const fiber::CircleDescriptor& d,
                                               double gap = 1e-3);

// Orbit-closure classification.
using IMat2 = std::array<std::array<long long, 2>, 2>;

// E x E with E = C / Z[i]; points are (Re u, Im u, Re v, Im v) mod 1 and
// M in SL2(Z) acts on (u, v). Inverses are added to the generating set.
struct TorusSystem {
  std::vector<IMat2> generators;
};
// Real Wehler surface with the three involutions as generators.
struct WehlerSystem {
  wehler::Surface surface;
};
using System = std::variant<TorusSystem, WehlerSystem>;

struct ClosureOptions {
  std::size_t budget = 100000;  // group elements applied
  int word_length = 20;
  std::uint64_t seed = 1;
  std::size_t dimension_sample = 20000;
  double delta = 0.05;
  std::size_t fiber_steps = 10000;
  double transversality = 1e-3;
  double band = 0.25;
};

enum class ClosureLabel { kFinite, kCurve, kTotallyRealSurface, kDense, kInconclusive };
const char* closure_label_name(ClosureLabel l);

struct FibrationEvidence {
  int fibration = 0;  // generator index (torus) or axis (Wehler)
  fiber::RotationVector T;
  fiber::SlopeResult slope;
  std::string error;  // set when the fiber measurement failed
};

struct OrbitClosureReport {
  ClosureLabel label = ClosureLabel::kInconclusive;
  std::size_t budget = 0;
  bool revisit = false;
  // Finite requires a revisit and at most budget / 10 distinct points.
  std::size_t distinct_points = 0;
  std::optional<DimensionEstimate> dimension;
  std::string dimension_error;
  std::vector<FibrationEvidence> fibrations;
  double transversality = 0.0;  // between the first two circle fibrations
  std::string candidate;        // "A(R)" or "X(R)" when one applies
  double candidate_distance = 0.0;
  double haar_discrepancy = -1.0;  // torus clouds on A(R) only
  bool delta_cover = false;
  bool dimension_three_anomaly = false;
  std::string note;
};

// Orbit points under fresh random reduced words, start included. For the
// torus the rows are 4 Betti coordinates; for Wehler surfaces 9 Riemann
// sphere coordinates.
simd::Soa torus_orbit(const TorusSystem& sys, std::array<double, 4> start, std::size_t budget,
                      int word_length, std::uint64_t seed, bool* revisit = nullptr,
                      std::size_t* distinct = nullptr);
simd::Soa wehler_orbit(const WehlerSystem& sys, const wehler::SurfacePoint& start,
                       std::size_t budget, int word_length, std::uint64_t seed,
                       std::vector<wehler::SurfacePoint>* points = nullptr,
                       bool* revisit = nullptr, std::size_t* distinct = nullptr);

// Start is 4 torus coordinates or a Wehler point.
using Start = std::variant<std::array<double, 4>, wehler::SurfacePoint>;
OrbitClosureReport classify_orbit_closure(const System& sys, const Start& start,
                                          const ClosureOptions& opt = {},
                                          simd::Soa* cloud = nullptr);

}  // namespace k3dyn::measures
