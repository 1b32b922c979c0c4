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

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numeric>

#include "k3dyn/error.hpp"
#include "k3dyn/fiber.hpp"

namespace k3dyn::fiber {
namespace {
constexpr double kPi = 3.14159265358979323846;
}

double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

double wrap_half(double x) {
  double r = x - std::round(x);
  if (r <= -0.5) r += 1.0;
  return r;
}

Vec2 betti_chart(cplx tau, cplx z) {
  if (!(tau.imag() > 0.0)) throw Error(ErrorCode::kInput, "tau must lie in the upper half-plane");
  const double y = z.imag() / tau.imag();
  const double x = z.real() - tau.real() * y;
  return {frac(x), frac(y)};
}

cplx betti_inverse(cplx tau, Vec2 xy) { return xy[0] + xy[1] * tau; }

LocalTau local_tau_Ib(cplx w, int b) {
  const double r = std::abs(w);
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::kInput, "w must lie in the punctured unit disk");
  if (b < 1) throw Error(ErrorCode::kInput, "b must be positive");
  return {tau_continued(w, b, 0), b};
}

cplx tau_continued(cplx w, int b, int winding) {
  const cplx lg(std::log(std::abs(w)), std::arg(w) + 2.0 * kPi * winding);
  return static_cast<double>(b) * lg / cplx(0.0, 2.0 * kPi);
}

std::array<int, 2> monodromy_slope(int b, int winding, std::array<int, 2> pq) {
  long long p = pq[0] + static_cast<long long>(winding) * b * pq[1];
  long long q = pq[1];
  const long long g = std::gcd(p < 0 ? -p : p, q < 0 ? -q : q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  return {static_cast<int>(p), static_cast<int>(q)};
}

BettiFormValue betti_form_Ib(cplx w, cplx v, int b) {
  if (v == cplx(0.0)) throw Error(ErrorCode::kInput, "v must be nonzero");
  const double L = std::log(std::abs(w));
  if (!(L < 0.0)) throw Error(ErrorCode::kInput, "w must lie in the punctured unit disk");
  BettiFormValue out;
  out.alpha_dw = std::log(std::abs(v)) / w;
  out.alpha_dv = -L / v;
  // On a fiber alpha~ = -L dv/v, and (i/2pi) K alpha~ ^ conj(alpha~) with
  // dv ^ dvbar = -2i dx dy gives density K L^2 / (pi |v|^2).
  const double K = -1.0 / (2.0 * b * L * L * L);
  out.fiber_density = K * L * L / (kPi * std::norm(v));
  return out;
}

cplx alpha_pairing(cplx w, cplx v, int b, cplx dw, cplx dv) {
  const auto f = betti_form_Ib(w, v, b);
  return f.alpha_dw * dw + f.alpha_dv * dv;
}

double fiber_integral(cplx w, int b, int angular_nodes) {
  const double L = std::log(std::abs(w));
  // v = exp(s + i t), s in (b L, 0], dx dy = e^{2s} ds dt.
  auto radial = [&](double s) {
    double acc = 0.0;
    for (int m = 0; m < angular_nodes; ++m) {
      const double t = 2.0 * kPi * m / angular_nodes;
      const cplx v = std::polar(std::exp(s), t);
      acc += betti_form_Ib(w, v, b).fiber_density;
    }
    return acc * (2.0 * kPi / angular_nodes) * std::exp(2.0 * s);
  };
  return boost::math::quadrature::gauss<double, 30>::integrate(radial, b * L, 0.0);
}

namespace {

// Max |curvature| of a sampled plane curve by central differences.
template <class Curve>
std::pair<double, double> max_fd_curvature(const Curve& c, double r, int samples) {
  const double h = 2.0 * r / (samples - 1);
  double best = 0.0, at = 0.0;
  for (int i = 1; i + 1 < samples; ++i) {
    const double y = -r + h * i;
    const cplx a = c(y - h), m = c(y), b = c(y + h);
    const cplx d1 = (b - a) / (2.0 * h);
    const cplx d2 = (b - 2.0 * m + a) / (h * h);
    const double kappa = std::abs((std::conj(d1) * d2).imag()) / std::pow(std::abs(d1), 3);
    if (kappa > best) {
      best = kappa;
      at = y;
    }
  }
  return {best, at};
}

}  // namespace

CurvatureReport curvature_blowup(double eta, int k, double alpha, double r, int samples) {
  if (!(eta > 0.0) || k < 1 || samples < 3) {
    throw Error(ErrorCode::kInput, "curvature needs eta > 0, k >= 1, samples >= 3");
  }
  auto image = [&](double y) { return std::pow(cplx(eta + alpha * y * y, y), k); };
  const auto [best, at] = max_fd_curvature(image, r, samples);
  CurvatureReport rep;
  rep.max_curvature = best;
  rep.at_y = at;
  rep.lower_bound = std::pow(eta, -k) * (k - 1 - 2.0 * alpha * eta) / k;
  return rep;
}

double arc_max_curvature(double eta, double alpha, double r, int samples) {
  auto arc = [&](double y) { return cplx(eta + alpha * y * y, y); };
  return max_fd_curvature(arc, r, samples).first;
}

}  // namespace k3dyn::fiber
