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

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "k3dyn/error.hpp"
#include "k3dyn/fiber.hpp"
#include "k3dyn/parallel.hpp"

namespace k3dyn::fiber {
namespace {

constexpr double kPi = 3.14159265358979323846;

cplx tau_from_log(const TauModel& m, cplx logw) {
  if (!m.ib) return m.tau;
  return static_cast<double>(m.b) * logw / cplx(0.0, 2.0 * kPi);
}

struct Gradient {
  double gx, gy;
  double norm() const { return std::hypot(gx, gy); }
};

Gradient fd_gradient(const RCurveProblem& prob, double x, double y, double h) {
  return {(r_residual(prob, x + h, y) - r_residual(prob, x - h, y)) / (2.0 * h),
          (r_residual(prob, x, y + h) - r_residual(prob, x, y - h)) / (2.0 * h)};
}

}  // namespace

cplx TModel::operator()(cplx w) const {
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * w + *it;
  return acc;
}

cplx TauModel::operator()(cplx w) const { return tau_from_log(*this, std::log(w)); }

double Grid2::cell() const { return std::max((x1 - x0) / nx, (y1 - y0) / ny); }

double r_residual(const RCurveProblem& prob, double x, double y) {
  cplx w, logw;
  if (prob.plane == GridPlane::kLog) {
    logw = -cplx(x, y);
    w = std::exp(logw);
  } else {
    w = cplx(x, y);
    logw = std::log(w);
  }
  const cplx tau = tau_from_log(prob.tau, logw);
  const cplx num = prob.t(w) - prob.alpha - prob.beta * tau;
  const cplx den = static_cast<double>(prob.p) + static_cast<double>(prob.q) * tau;
  return (num * std::conj(den)).imag();
}

std::vector<Polyline> trace_R_curve(const RCurveProblem& prob, const Grid2& grid,
                                    const RCurveOptions& opt) {
  if (grid.nx < 2 || grid.ny < 2 || !(grid.x1 > grid.x0) || !(grid.y1 > grid.y0)) {
    throw Error(ErrorCode::kInput, "invalid R-curve grid");
  }
  if (prob.p == 0 && prob.q == 0) throw Error(ErrorCode::kInput, "slope (p, q) must be nonzero");
  const int nx = grid.nx, ny = grid.ny;
  const double hx = (grid.x1 - grid.x0) / nx, hy = (grid.y1 - grid.y0) / ny;
  auto X = [&](double i) { return grid.x0 + i * hx; };
  auto Y = [&](double j) { return grid.y0 + j * hy; };

  std::vector<double> f(static_cast<std::size_t>(nx + 1) * (ny + 1));
  auto F = [&](int i, int j) -> double& { return f[static_cast<std::size_t>(j) * (nx + 1) + i]; };
  parallel_blocks(static_cast<std::size_t>(ny + 1), [&](std::size_t j) {
    for (int i = 0; i <= nx; ++i) F(i, static_cast<int>(j)) = r_residual(prob, X(i), Y(j));
  });

  // Edge crossings. Horizontal edge (i,j)-(i+1,j) has id j*nx + i; vertical
  // edge (i,j)-(i,j+1) has id H + j*(nx+1) + i.
  const long long n_h = static_cast<long long>(nx) * (ny + 1);
  auto h_id = [&](int i, int j) { return static_cast<long long>(j) * nx + i; };
  auto v_id = [&](int i, int j) { return n_h + static_cast<long long>(j) * (nx + 1) + i; };
  std::unordered_map<long long, int> index;
  std::vector<CurveVertex> pts;
  auto crossing = [&](long long id, double xa, double ya, double fa, double xb, double yb,
                      double fb) {
    auto [it, fresh] = index.try_emplace(id, static_cast<int>(pts.size()));
    if (fresh) {
      const double t = fa / (fa - fb);
      pts.push_back({xa + t * (xb - xa), ya + t * (yb - ya), 0.0, false});
    }
    return it->second;
  };
  auto positive = [](double v) { return v >= 0.0; };

  std::vector<std::array<int, 2>> adj;
  auto link = [&](int a, int b) {
    if (static_cast<int>(adj.size()) < static_cast<int>(pts.size())) adj.resize(pts.size(), {-1, -1});
    for (int pass = 0; pass < 2; ++pass) {
      const int u = pass == 0 ? a : b, v = pass == 0 ? b : a;
      if (adj[u][0] < 0) adj[u][0] = v;
      else adj[u][1] = v;
    }
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double f00 = F(i, j), f10 = F(i + 1, j), f11 = F(i + 1, j + 1), f01 = F(i, j + 1);
      const bool s00 = positive(f00), s10 = positive(f10), s11 = positive(f11), s01 = positive(f01);
      int bottom = -1, right = -1, top = -1, left = -1;
      if (s00 != s10) bottom = crossing(h_id(i, j), X(i), Y(j), f00, X(i + 1), Y(j), f10);
      if (s10 != s11) right = crossing(v_id(i + 1, j), X(i + 1), Y(j), f10, X(i + 1), Y(j + 1), f11);
      if (s01 != s11) top = crossing(h_id(i, j + 1), X(i), Y(j + 1), f01, X(i + 1), Y(j + 1), f11);
      if (s00 != s01) left = crossing(v_id(i, j), X(i), Y(j), f00, X(i), Y(j + 1), f01);
      std::vector<int> e;
      for (int c : {bottom, right, top, left})
        if (c >= 0) e.push_back(c);
      if (e.size() == 2) {
        link(e[0], e[1]);
      } else if (e.size() == 4) {
        const bool sc = positive(r_residual(prob, X(i + 0.5), Y(j + 0.5)));
        if (sc == s00) {
          link(bottom, right);
          link(left, top);
        } else {
          link(bottom, left);
          link(right, top);
        }
      }
    }
  }
  adj.resize(pts.size(), {-1, -1});

  // Transverse Newton refinement.
  const double hstep = 1e-6 * grid.cell();
  std::vector<double> gnorm(pts.size());
  std::vector<char> converged(pts.size(), 0);
  parallel_blocks((pts.size() + 255) / 256, [&](std::size_t blk) {
    const std::size_t lo = blk * 256, hi = std::min(pts.size(), lo + 256);
    for (std::size_t v = lo; v < hi; ++v) {
      auto& p = pts[v];
      const double x_start = p.x, y_start = p.y;
      double val = r_residual(prob, p.x, p.y);
      Gradient g = fd_gradient(prob, p.x, p.y, hstep);
      for (int it = 0; it < opt.newton_steps; ++it) {
        const double gn2 = g.gx * g.gx + g.gy * g.gy;
        if (!(gn2 > 0.0)) break;
        if (std::abs(val) <= opt.curve_tolerance * 1e-3 * std::sqrt(gn2)) break;
        const double nx_ = p.x - val * g.gx / gn2, ny_ = p.y - val * g.gy / gn2;
        if (std::hypot(nx_ - x_start, ny_ - y_start) > 2.0 * grid.cell()) break;
        p.x = nx_;
        p.y = ny_;
        val = r_residual(prob, p.x, p.y);
        g = fd_gradient(prob, p.x, p.y, hstep);
      }
      gnorm[v] = g.norm();
      p.residual = gnorm[v] > 0.0 ? std::abs(val) / gnorm[v] : std::numeric_limits<double>::infinity();
      converged[v] = p.residual <= opt.curve_tolerance;
    }
  });
  if (!pts.empty()) {
    std::vector<double> sorted = gnorm;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (std::size_t v = 0; v < pts.size(); ++v) {
      pts[v].singular = !converged[v] || gnorm[v] < opt.singular_gradient * median;
    }
  }

  // Chain the segments: open chains from their endpoints first, then loops.
  std::vector<Polyline> lines;
  std::vector<char> used(pts.size(), 0);
  auto walk = [&](int start, bool closed) {
    Polyline line;
    line.closed = closed;
    int prev = -1, cur = start;
    while (cur >= 0 && !used[cur]) {
      used[cur] = 1;
      line.v.push_back(pts[cur]);
      const int nxt = adj[cur][0] != prev ? adj[cur][0] : adj[cur][1];
      prev = cur;
      cur = nxt;
    }
    lines.push_back(std::move(line));
  };
  for (std::size_t v = 0; v < pts.size(); ++v) {
    const int deg = (adj[v][0] >= 0) + (adj[v][1] >= 0);
    if (!used[v] && deg <= 1) walk(static_cast<int>(v), false);
  }
  for (std::size_t v = 0; v < pts.size(); ++v) {
    if (!used[v]) walk(static_cast<int>(v), true);
  }
  return lines;
}

double TanFamily::y1() const { return 2.0 * kPi * p / (static_cast<double>(q) * b); }

RCurveProblem TanFamily::problem() const {
  if (q == 0 || b < 1 || k < 1) throw Error(ErrorCode::kInput, "tan family needs q != 0, b >= 1, k >= 1");
  RCurveProblem prob;
  prob.t.coeffs.assign(static_cast<std::size_t>(k) + 1, cplx(0.0));
  prob.t.coeffs.back() = std::polar(1.0, k * y0);
  prob.tau.ib = true;
  prob.tau.b = b;
  prob.p = p;
  prob.q = q;
  prob.plane = GridPlane::kLog;
  return prob;
}

double TanFamily::x_of(double y) const { return (y - y1()) * std::tan(k * (y - y0)); }

std::vector<Vec2> tan_closed_form(const TanFamily& fam, const Grid2& grid, double max_gap) {
  std::vector<Vec2> out;
  auto inside = [&](double x) { return x >= grid.x0 && x <= grid.x1; };
  auto slope = [&](double y) {
    const double c = std::cos(fam.k * (y - fam.y0));
    return std::tan(fam.k * (y - fam.y0)) + (y - fam.y1()) * fam.k / (c * c);
  };
  double y = grid.y0;
  bool was_inside = inside(fam.x_of(y));
  if (was_inside) out.push_back({fam.x_of(y), y});
  while (y < grid.y1) {
    const double dy =
        was_inside ? max_gap / std::max(1.0, std::abs(slope(y))) : max_gap;
    const double yn = std::min(grid.y1, y + std::max(dy, 1e-12));
    const double xn = fam.x_of(yn);
    const bool now_inside = inside(xn);
    if (now_inside != was_inside && std::isfinite(xn)) {
      // Locate the window boundary on this step by bisection.
      double a = y, c = yn;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + c);
        if (inside(fam.x_of(m)) == was_inside) a = m;
        else c = m;
      }
      const double yb = now_inside ? c : a;
      const double xb = fam.x_of(yb);
      if (inside(xb) && std::abs(xb - fam.x_of(now_inside ? a : c)) < 0.5) out.push_back({xb, yb});
      if (now_inside && yb < yn) {
        // Resume the fine steps from the entry point.
        was_inside = true;
        y = yb;
        continue;
      }
    }
    if (now_inside) out.push_back({xn, yn});
    was_inside = now_inside;
    y = yn;
  }
  // x cos - (y - y1) sin = 0 contains the whole line y = y1 when the
  // cosine vanishes there; dividing by it loses that component.
  const double y1 = fam.y1();
  if (y1 >= grid.y0 && y1 <= grid.y1 && std::abs(std::cos(fam.k * (y1 - fam.y0))) < 1e-12) {
    const int n = static_cast<int>(std::ceil((grid.x1 - grid.x0) / max_gap));
    for (int i = 0; i <= n; ++i) out.push_back({grid.x0 + (grid.x1 - grid.x0) * i / n, y1});
  }
  return out;
}

double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](std::span<const Vec2> from, std::span<const Vec2> to) {
    std::vector<double> best(from.size());
    parallel_blocks((from.size() + 127) / 128, [&](std::size_t blk) {
      const std::size_t lo = blk * 128, hi = std::min(from.size(), lo + 128);
      for (std::size_t i = lo; i < hi; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& q : to) {
          const double dx = from[i][0] - q[0], dy = from[i][1] - q[1];
          m = std::min(m, dx * dx + dy * dy);
        }
        best[i] = m;
      }
    });
    return std::sqrt(*std::max_element(best.begin(), best.end()));
  };
  return std::max(directed(a, b), directed(b, a));
}

std::vector<Vec2> vertices(const std::vector<Polyline>& lines) {
  std::vector<Vec2> out;
  for (const auto& l : lines)
    for (const auto& v : l.v) out.push_back({v.x, v.y});
  return out;
}

}  // namespace k3dyn::fiber
