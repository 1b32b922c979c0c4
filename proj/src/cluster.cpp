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

#include "k3dyn/cluster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

#include "k3dyn/error.hpp"

namespace k3dyn {
namespace {

struct Dsu {
  std::vector<std::size_t> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::uint64_t cell_key(const std::array<long long, 3>& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (long long v : c) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

}  // namespace

Clusters single_linkage(std::span<const double> pts, int dim, double radius,
                        std::span<const int> periodic_dims) {
  if (dim < 1 || radius <= 0.0 || pts.size() % static_cast<std::size_t>(dim) != 0) {
    throw Error(ErrorCode::kInput, "bad clustering input");
  }
  const std::size_t n = pts.size() / static_cast<std::size_t>(dim);
  std::vector<char> periodic(dim, 0);
  for (int d : periodic_dims) {
    if (d < 0 || d >= dim) throw Error(ErrorCode::kInput, "periodic dimension out of range");
    periodic[d] = 1;
  }
  auto dist2 = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
      double x = pts[a * dim + d] - pts[b * dim + d];
      if (periodic[d]) x -= std::round(x);
      s += x * x;
    }
    return s;
  };
  // Bucket on the first three coordinates; periodic cells wrap.
  const int hd = std::min(dim, 3);
  const long long wrap_cells = std::max(1LL, static_cast<long long>(std::floor(1.0 / radius)));
  auto cell_of = [&](std::size_t i) {
    std::array<long long, 3> c{0, 0, 0};
    for (int d = 0; d < hd; ++d) {
      double x = pts[i * dim + d];
      if (periodic[d]) {
        x -= std::floor(x);
        c[d] = std::min(wrap_cells - 1, static_cast<long long>(x * wrap_cells));
      } else {
        c[d] = static_cast<long long>(std::floor(x / radius));
      }
    }
    return c;
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  std::vector<std::array<long long, 3>> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    cells[i] = cell_of(i);
    grid[cell_key(cells[i])].push_back(i);
  }
  Dsu dsu(n);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < n; ++i) {
    const int span_z = hd > 2 ? 1 : 0, span_y = hd > 1 ? 1 : 0;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -span_y; dy <= span_y; ++dy)
        for (int dz = -span_z; dz <= span_z; ++dz) {
          std::array<long long, 3> c = cells[i];
          const int off[3] = {dx, dy, dz};
          for (int d = 0; d < hd; ++d) {
            c[d] += off[d];
            if (periodic[d]) c[d] = ((c[d] % wrap_cells) + wrap_cells) % wrap_cells;
          }
          const auto it = grid.find(cell_key(c));
          if (it == grid.end()) continue;
          for (std::size_t j : it->second) {
            if (j > i && dsu.find(i) != dsu.find(j) && dist2(i, j) <= r2) dsu.unite(i, j);
          }
        }
  }
  Clusters out;
  out.label.assign(n, -1);
  std::unordered_map<std::size_t, int> id;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = dsu.find(i);
    auto [it, fresh] = id.emplace(root, out.count);
    if (fresh) {
      ++out.count;
      out.sizes.push_back(0);
    }
    out.label[i] = it->second;
    ++out.sizes[it->second];
  }
  return out;
}

}  // namespace k3dyn
