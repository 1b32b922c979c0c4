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

// Single-linkage clustering of point clouds at a fixed link radius.

#include <cstddef>
#include <span>
#include <vector>

namespace k3dyn {

struct Clusters {
  std::vector<int> label;  // per point, 0..count-1 in order of first appearance
  int count = 0;
  std::vector<std::size_t> sizes;
};

// pts holds n points of dimension dim, row-major. Two points are linked when
// their Euclidean distance is at most radius. Coordinates listed in
// periodic_dims are taken mod 1.
Clusters single_linkage(std::span<const double> pts, int dim, double radius,
                        std::span<const int> periodic_dims = {});

}  // namespace k3dyn
