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

// Surface config JSON: {"coeffs": [27 entries], "real": bool}. An entry is
// either [re, im] (numbers or rational strings) or a rational string "p/q".
// Entry 9 i + 3 j + k multiplies x1^i x2^j x3^k.

#include <optional>

#include <json.hpp>

#include "k3dyn/wehler.hpp"
#include "k3dyn/wehler_exact.hpp"

namespace k3dyn::wehler {

Surface surface_from_json(const nlohmann::json& j);
nlohmann::json surface_to_json(const Surface& s);
// Only succeeds when every entry is an exact rational (strings or integers).
std::optional<ExactSurface> exact_surface_from_json(const nlohmann::json& j);

}  // namespace k3dyn::wehler
