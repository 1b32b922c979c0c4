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

#include "k3dyn/surface_io.hpp"

#include <cmath>

#include "k3dyn/error.hpp"

namespace k3dyn::wehler {
namespace {

double scalar_value(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return static_cast<double>(parse_rational(v.get<std::string>()));
  throw Error(ErrorCode::kInput, "coefficient must be a number or rational string");
}

std::optional<Rational> exact_value(const nlohmann::json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  return std::nullopt;
}

const nlohmann::json& coeff_array(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array() ||
      j["coeffs"].size() != 27) {
    throw Error(ErrorCode::kInput, "surface config needs \"coeffs\" with 27 entries");
  }
  return j["coeffs"];
}

}  // namespace

Surface surface_from_json(const nlohmann::json& j) {
  const auto& arr = coeff_array(j);
  Surface s;
  bool all_real = true;
  for (int n = 0; n < 27; ++n) {
    const auto& e = arr[n];
    if (e.is_array()) {
      if (e.size() != 2) throw Error(ErrorCode::kInput, "complex entry must be [re, im]");
      s.c[n] = cplx(scalar_value(e[0]), scalar_value(e[1]));
    } else {
      s.c[n] = cplx(scalar_value(e), 0.0);
    }
    if (!std::isfinite(s.c[n].real()) || !std::isfinite(s.c[n].imag())) {
      throw Error(ErrorCode::kInput, "non-finite coefficient");
    }
    if (s.c[n].imag() != 0.0) all_real = false;
  }
  if (s.coeff_norm() == 0.0) throw Error(ErrorCode::kInput, "zero polynomial");
  const bool declared = j.value("real", all_real);
  if (declared && !all_real) {
    throw Error(ErrorCode::kInput, "surface declared real has complex coefficients");
  }
  s.real_coefficients = declared;
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    s.tol.point = t.value("point", s.tol.point);
    s.tol.form = t.value("form", s.tol.form);
    s.tol.newton = t.value("newton", s.tol.newton);
    s.tol.newton_steps = t.value("newton_steps", s.tol.newton_steps);
  }
  return s;
}

nlohmann::json surface_to_json(const Surface& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : s.c) arr.push_back({c.real(), c.imag()});
  return {{"coeffs", arr}, {"real", s.real_coefficients}};
}

std::optional<ExactSurface> exact_surface_from_json(const nlohmann::json& j) {
  const auto& arr = coeff_array(j);
  ExactSurface s;
  for (int n = 0; n < 27; ++n) {
    const auto& e = arr[n];
    if (e.is_array()) {
      if (e.size() != 2) return std::nullopt;
      auto re = exact_value(e[0]), im = exact_value(e[1]);
      if (!re || !im) return std::nullopt;
      s.c[n] = GaussRational(*re, *im);
    } else {
      auto re = exact_value(e);
      if (!re) return std::nullopt;
      s.c[n] = GaussRational(*re);
    }
  }
  return s;
}

}  // namespace k3dyn::wehler
