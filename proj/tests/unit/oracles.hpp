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

// Independent reference computations used by the unit tests. Nothing here
// calls into the library's numerics.

#include <array>
#include <complex>
#include <vector>

#include "k3dyn/wehler.hpp"

namespace k3dyn::test {

using cplx = std::complex<double>;

// Plain monomial sum of P at affine (x1, x2, x3).
cplx naive_eval(const wehler::Surface& s, cplx x1, cplx x2, cplx x3);
// Coefficients (A, B, C) of P as a quadratic in x_k with the other two
// affine coordinates fixed.
std::array<cplx, 3> naive_axis_quadratic(const wehler::Surface& s, const std::array<cplx, 3>& x,
                                         int k);
// Central-difference gradient of naive_eval.
std::array<cplx, 3> naive_gradient(const wehler::Surface& s, const std::array<cplx, 3>& x,
                                   double h = 1e-6);
// Affine coordinates of a point with all three coordinates finite.
std::array<cplx, 3> affine(const wehler::SurfacePoint& p);
// Projective distance between two points of (P1)^3: max over coordinates of
// |a b' - b a'| for the normalized representatives.
double p1_distance(const wehler::SurfacePoint& p, const wehler::SurfacePoint& q);

}  // namespace k3dyn::test
