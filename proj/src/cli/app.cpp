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

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include "k3dyn/cli.hpp"
#include "k3dyn/cohomology.hpp"
#include "k3dyn/error.hpp"
#include "k3dyn/fiber.hpp"
#include "k3dyn/measures.hpp"
#include "k3dyn/parallel.hpp"
#include "k3dyn/simd/kernels.hpp"
#include "k3dyn/surface_io.hpp"
#include "k3dyn/torus.hpp"
#include "k3dyn/wehler.hpp"

#ifndef K3DYN_VERSION
#define K3DYN_VERSION "dev"
#endif

namespace k3dyn::cli {
namespace {

using json = nlohmann::json;
using cplx = std::complex<double>;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInput, "not a number: '" + s + "'");
  }
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_double(t));
  return out;
}

std::vector<long long> parse_ints(const std::string& s) {
  std::vector<long long> out;
  for (const auto& t : split(s, ',')) {
    const double v = parse_double(t);
    if (v != std::round(v)) throw Error(ErrorCode::kInput, "not an integer: '" + t + "'");
    out.push_back(static_cast<long long>(v));
  }
  return out;
}

cplx parse_complex(const std::string& s) {
  const auto v = parse_doubles(s);
  if (v.size() == 1) return v[0];
  if (v.size() == 2) return {v[0], v[1]};
  throw Error(ErrorCode::kInput, "complex values are 're' or 're,im'");
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json p1_json(const wehler::P1Point& z) {
  if (wehler::is_infinite(z)) return "inf";
  return cjson(wehler::affine_value(z));
}

json point_json(const wehler::SurfacePoint& p) {
  return {{"z", json::array({p1_json(p.z[0]), p1_json(p.z[1]), p1_json(p.z[2])})},
          {"residual", p.residual}};
}

std::string csv_p1(const wehler::P1Point& z) {
  if (wehler::is_infinite(z)) return "inf,inf";
  const cplx v = wehler::affine_value(z);
  return fmt_double(v.real()) + "," + fmt_double(v.imag());
}

std::string polyline_csv(const std::vector<fiber::Polyline>& lines) {
  std::string out = "curve_id,x,y,residual,singular_flag\n";
  for (std::size_t c = 0; c < lines.size(); ++c)
    for (const auto& v : lines[c].v) {
      out += std::to_string(c) + "," + fmt_double(v.x) + "," + fmt_double(v.y) + "," +
             fmt_double(v.residual) + "," + (v.singular ? "1" : "0") + "\n";
    }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kInput, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInput, what + " is not valid JSON: " + e.what());
  }
}

// Options registered on a subcommand, settable from the command line or
// from --config.
struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::pair<CLI::Option*, std::function<void(const json&)>>> opts;
  std::map<std::string, std::function<json()>> values;

  template <class T>
  void add(const std::string& name, T& var, const std::string& help) {
    CLI::Option* o = app->add_option("--" + name, var, help)->capture_default_str();
    opts[name] = {o, [&var, name](const json& j) {
                    try {
                      var = j.get<T>();
                    } catch (const json::exception&) {
                      throw Error(ErrorCode::kInput, "config key '" + name + "' has the wrong type");
                    }
                  }};
    values[name] = [&var] { return json(var); };
  }
  void flag(const std::string& name, bool& var, const std::string& help) {
    CLI::Option* o = app->add_flag("--" + name, var, help);
    opts[name] = {o, [&var, name](const json& j) {
                    if (!j.is_boolean()) throw Error(ErrorCode::kInput, "config key '" + name + "' must be boolean");
                    var = j.get<bool>();
                  }};
    values[name] = [&var] { return json(var); };
  }
};

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  std::string out = "out";
  unsigned threads = 0;
  std::string surface;
};

struct Context {
  Globals g;
  json config = json::object();
  json inputs = json::array();
  std::ostream* err = nullptr;

  wehler::Surface surface(bool require_real) {
    wehler::Surface s;
    if (!g.surface.empty()) {
      const std::string text = read_file(g.surface);
      inputs.push_back({{"path", g.surface}, {"sha256", sha256_hex(text)}});
      s = wehler::surface_from_json(parse_json(text, g.surface));
    } else if (config.contains("surface")) {
      s = wehler::surface_from_json(config["surface"]);
    } else {
      std::mt19937_64 rng(g.seed);
      s = wehler::random_surface(rng, true);
    }
    if (require_real && !s.real_coefficients) {
      throw Error(ErrorCode::kInput, "this subcommand needs a surface with real coefficients");
    }
    return s;
  }

  wehler::SurfacePoint real_point(const wehler::Surface& s) {
    std::mt19937_64 rng(g.seed ^ 0x5eedULL);
    const auto pts = wehler::real_locus_sample(s, 1, rng);
    if (pts.empty()) throw Error(ErrorCode::kInput, "no real point found on the surface");
    return pts[0];
  }
};

double max_rel_spread(const wehler::OmegaValues& w) {
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      if (!w.values[a] || !w.values[b]) continue;
      const double d = std::abs(*w.values[a] - *w.values[b]) /
                       std::max(std::abs(*w.values[a]), std::abs(*w.values[b]));
      worst = std::max(worst, d);
    }
  return worst;
}

json slope_json(const fiber::RotationVector& T, const fiber::SlopeResult& r) {
  json j = {{"T", json::array({T.T[0], T.T[1]})},
            {"err", T.err},
            {"classification", fiber::slope_kind_name(r.kind)},
            {"k", nullptr},
            {"p", nullptr},
            {"q", nullptr}};
  if (r.kind == fiber::SlopeKind::kCircles) {
    j["k"] = r.circles.k;
    j["p"] = r.circles.p;
    j["q"] = r.circles.q;
  }
  if (r.kind == fiber::SlopeKind::kTorsion) j["torsion_order"] = r.torsion_order;
  if (r.kind == fiber::SlopeKind::kAmbiguous) {
    json c = json::array();
    for (const auto& d : r.candidates) c.push_back({{"k", d.k}, {"p", d.p}, {"q", d.q}});
    j["candidates"] = c;
  }
  return j;
}

fiber::Grid2 make_grid(const std::string& window, int n) {
  const auto w = parse_doubles(window);
  if (w.size() != 4 || !(w[1] > w[0]) || !(w[3] > w[2]) || n < 4) {
    throw Error(ErrorCode::kInput, "window is 'x0,x1,y0,y1' with x0 < x1, y0 < y1 and n >= 4");
  }
  return {w[0], w[1], w[2], w[3], n, n};
}

int exit_code(const Error& e) { return e.code() == ErrorCode::kInput ? kExitInput : kExitNumerical; }

void emit_error(std::ostream& out, const std::string& name, const std::string& msg, int code) {
  out << json({{"error", name}, {"message", msg}, {"exit_code", code}}).dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamics on Wehler surfaces and complex tori", "k3dyn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", K3DYN_VERSION);
  Context ctx;
  ctx.err = &err;
  app.add_option("--config", ctx.g.config, "JSON file of option values for the subcommand");
  app.add_option("--seed", ctx.g.seed, "64-bit seed")->capture_default_str();
  app.add_option("--out", ctx.g.out, "output directory")->capture_default_str();
  app.add_option("--threads", ctx.g.threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--surface", ctx.g.surface, "surface JSON file (default: random real surface)");

  std::map<std::string, std::unique_ptr<Command>> cmds;
  std::map<std::string, std::function<json(OutputSet&)>> actions;
  auto command = [&](const std::string& name, const std::string& help) -> Command& {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name, help);
    Command& ref = *c;
    cmds[name] = std::move(c);
    return ref;
  };

  // surface-check
  int sc_points = 200;
  {
    Command& c = command("surface-check", "smoothness, involutions and the 2-form on a surface");
    c.add("points", sc_points, "random surface points to test");
    actions["surface-check"] = [&](OutputSet& o) {
      const auto s = ctx.surface(false);
      std::mt19937_64 rng(ctx.g.seed);
      const auto smooth = wehler::certify_smooth(s, rng);
      const auto form = cohomology::derive_intersection_form(s, rng);
      double sigma2 = 0.0, omega_spread = 0.0, max_res = 0.0;
      int omega_points = 0;
      for (int i = 0; i < sc_points; ++i) {
        const auto p = wehler::sample_point(s, rng);
        max_res = std::max(max_res, p.residual);
        for (int k = 0; k < 3; ++k) {
          const auto q = wehler::sigma(s, wehler::sigma(s, p, k), k);
          for (int t = 0; t < 3; ++t) {
            const double na = std::hypot(std::abs(p.z[t].a), std::abs(p.z[t].b));
            const double nb = std::hypot(std::abs(q.z[t].a), std::abs(q.z[t].b));
            sigma2 = std::max(sigma2, std::abs(p.z[t].a * q.z[t].b - p.z[t].b * q.z[t].a) / (na * nb));
          }
        }
        try {
          omega_spread = std::max(omega_spread, max_rel_spread(wehler::omega(s, p)));
          ++omega_points;
        } catch (const Error&) {
        }
      }
      json q = json::array();
      for (const auto& r : form.Q) q.push_back(json::array({r[0], r[1], r[2]}));
      const auto sig = cohomology::signature(form);
      json witnesses = json::array();
      for (const auto& w : smooth.singular_witnesses) witnesses.push_back(point_json(w));
      json rep = {{"smooth", smooth.smooth},
                  {"newton_starts", smooth.starts},
                  {"singular_witnesses", witnesses},
                  {"intersection_form", q},
                  {"signature", json::array({sig[0], sig[1]})},
                  {"points", sc_points},
                  {"max_sample_residual", max_res},
                  {"max_sigma_squared_defect", sigma2},
                  {"omega_points", omega_points},
                  {"max_omega_relative_spread", omega_spread},
                  {"real_coefficients", s.real_coefficients}};
      o.add_json("surface.json", wehler::surface_to_json(s));
      o.add_json("surface_check.json", rep);
      return rep;
    };
  }

  // classify-word
  std::string cw_word = "1,2,3";
  int cw_growth = 0;
  {
    Command& c = command("classify-word", "cohomological type and entropy of a word in the involutions");
    c.add("word", cw_word, "comma-separated letters in 1..3");
    c.add("growth-nmax", cw_growth, "also fit the growth exponent up to this power (0 = skip)");
    c.app->alias("classify");
    actions["classify-word"] = [&](OutputSet& o) {
      const auto q = cohomology::fibration_form();
      const auto w = wehler::AutWord::parse(cw_word);
      const auto r = cohomology::classify_word(q, w);
      const auto m = cohomology::word_action(q, w);
      json mat = json::array();
      for (const auto& row : m) mat.push_back(json::array({row[0], row[1], row[2]}));
      json rep = {{"word", w.str()},
                  {"type", cohomology::type_name(r.type)},
                  {"lambda", r.lambda},
                  {"entropy", r.entropy},
                  {"charpoly", json::array({r.charpoly[0], r.charpoly[1], r.charpoly[2]})},
                  {"matrix", mat},
                  {"fixed_ray", r.fixed_ray ? json::array({(*r.fixed_ray)[0], (*r.fixed_ray)[1], (*r.fixed_ray)[2]})
                                            : json(nullptr)}};
      if (cw_growth > 0) {
        const auto g = cohomology::growth_exponent(q, w, cw_growth);
        rep["growth"] = {{"n_max", cw_growth},
                         {"exponent", g.exponent},
                         {"log_rate", g.log_rate},
                         {"loxodromic", g.loxodromic}};
      }
      o.add_json("classify.json", rep);
      return rep;
    };
  }

  // orbit
  std::string or_word = "1,2,3";
  std::size_t or_steps = 1000, or_every = 1;
  bool or_real = false;
  {
    Command& c = command("orbit", "iterate a word on a surface point");
    c.add("word", or_word, "word in the involutions");
    c.add("steps", or_steps, "number of iterations");
    c.add("every", or_every, "write every n-th point to the CSV");
    c.flag("real", or_real, "start at a real point of a real surface");
    actions["orbit"] = [&](OutputSet& o) {
      if (or_every < 1) throw Error(ErrorCode::kInput, "--every must be >= 1");
      const auto s = ctx.surface(or_real);
      std::mt19937_64 rng(ctx.g.seed);
      const auto p0 = or_real ? ctx.real_point(s) : wehler::sample_point(s, rng);
      const auto w = wehler::AutWord::parse(or_word);
      std::string csv = "step,re1,im1,re2,im2,re3,im3,residual\n";
      const auto st = wehler::iterate_word(s, w, p0, or_steps, [&](std::size_t i, const wehler::SurfacePoint& p) {
        if (i % or_every != 0) return;
        csv += std::to_string(i) + "," + csv_p1(p.z[0]) + "," + csv_p1(p.z[1]) + "," + csv_p1(p.z[2]) +
               "," + fmt_double(p.residual) + "\n";
      });
      json rep = {{"word", w.str()},
                  {"start", point_json(p0)},
                  {"steps", st.steps},
                  {"max_residual", st.max_residual},
                  {"max_imag", st.max_imag}};
      o.add("orbit.csv", std::move(csv));
      o.add_json("orbit.json", rep);
      return rep;
    };
  }

  // rotation
  int ro_axis = 2;
  std::size_t ro_steps = 10000;
  std::string ro_translation;
  int ro_dmax = fiber::kDefaultDmax;
  {
    Command& c = command("rotation", "rotation vector and slope class of a fiber translation");
    c.add("axis", ro_axis, "fibration axis 1..3 (surface mode)");
    c.add("steps", ro_steps, "orbit length");
    c.add("translation", ro_translation, "synthetic translation 'tx,ty' instead of a surface");
    c.add("dmax", ro_dmax, "denominator bound of the slope search");
    actions["rotation"] = [&](OutputSet& o) {
      json rep;
      if (!ro_translation.empty()) {
        const auto t = parse_doubles(ro_translation);
        if (t.size() != 2) throw Error(ErrorCode::kInput, "--translation is 'tx,ty'");
        std::vector<fiber::Vec2> orbit(ro_steps + 1);
        for (std::size_t n = 0; n <= ro_steps; ++n) {
          orbit[n] = {fiber::frac(std::fma(static_cast<double>(n), t[0], 0.0)),
                      fiber::frac(std::fma(static_cast<double>(n), t[1], 0.0))};
        }
        const auto T = fiber::rotation_vector(orbit);
        rep = slope_json(T, fiber::slope_detect(T, ro_dmax));
        rep["mode"] = "translation";
      } else {
        if (ro_axis < 1 || ro_axis > 3) throw Error(ErrorCode::kInput, "--axis must be 1, 2 or 3");
        const auto s = ctx.surface(true);
        const auto p = ctx.real_point(s);
        const auto r = fiber::real_circle_rotation(s, p, ro_axis - 1, ro_steps);
        rep = slope_json(r.T, fiber::slope_detect(r.T, ro_dmax));
        rep["mode"] = "real-fiber";
        rep["axis"] = ro_axis;
        rep["power"] = r.power;
        rep["start"] = point_json(p);
      }
      o.add_json("rotation.json", rep);
      return rep;
    };
  }

  // r-curve
  std::string rc_t = "0,0;1,0", rc_tau = "0,1", rc_window = "-1,1,-1,1", rc_plane = "w";
  int rc_ib = 0, rc_p = 1, rc_q = 0, rc_n = 256;
  double rc_alpha = 0.0, rc_beta = 0.0;
  {
    Command& c = command("r-curve", "trace the R-curve of a translation model");
    c.add("t", rc_t, "coefficients of t(w) = sum c_j w^j as 're,im;re,im;...'");
    c.add("tau", rc_tau, "constant fiber modulus 're,im'");
    c.add("ib", rc_ib, "use the I_b model tau = b log(w) / (2 pi i) with this b (0 = constant tau)");
    c.add("alpha", rc_alpha, "alpha");
    c.add("beta", rc_beta, "beta");
    c.add("p", rc_p, "slope p");
    c.add("q", rc_q, "slope q");
    c.add("plane", rc_plane, "grid plane: w or log");
    c.add("window", rc_window, "grid window 'x0,x1,y0,y1'");
    c.add("n", rc_n, "grid cells per side");
    actions["r-curve"] = [&](OutputSet& o) {
      fiber::RCurveProblem prob;
      for (const auto& term : split(rc_t, ';')) prob.t.coeffs.push_back(parse_complex(term));
      prob.tau.ib = rc_ib > 0;
      prob.tau.b = std::max(rc_ib, 1);
      prob.tau.tau = parse_complex(rc_tau);
      prob.alpha = rc_alpha;
      prob.beta = rc_beta;
      prob.p = rc_p;
      prob.q = rc_q;
      if (rc_plane != "w" && rc_plane != "log") throw Error(ErrorCode::kInput, "--plane is w or log");
      prob.plane = rc_plane == "w" ? fiber::GridPlane::kW : fiber::GridPlane::kLog;
      const auto grid = make_grid(rc_window, rc_n);
      const auto lines = fiber::trace_R_curve(prob, grid);
      std::size_t verts = 0, singular = 0;
      double max_res = 0.0;
      for (const auto& l : lines)
        for (const auto& v : l.v) {
          ++verts;
          singular += v.singular ? 1 : 0;
          max_res = std::max(max_res, v.residual);
        }
      json rep = {{"polylines", lines.size()}, {"vertices", verts}, {"singular_vertices", singular},
                  {"max_residual", max_res}, {"cell", grid.cell()}};
      o.add("r_curve.csv", polyline_csv(lines));
      o.add_json("r_curve.json", rep);
      return rep;
    };
  }

  // tan-family
  int tf_k = 1, tf_p = -1, tf_q = 1, tf_b = 8, tf_n = 512;
  double tf_y0 = 0.0;
  std::string tf_window = "-6,6,-3,3";
  {
    Command& c = command("tan-family", "R-curves of t0 w^k against x = (y - y1) tan(k (y - y0))");
    c.add("k", tf_k, "exponent k");
    c.add("y0", tf_y0, "phase y0 (k y0 = arg t0)");
    c.add("p", tf_p, "slope p");
    c.add("q", tf_q, "slope q");
    c.add("b", tf_b, "I_b parameter");
    c.add("window", tf_window, "grid window 'x0,x1,y0,y1' in the log plane");
    c.add("n", tf_n, "grid cells per side");
    actions["tan-family"] = [&](OutputSet& o) {
      fiber::TanFamily fam;
      fam.k = tf_k;
      fam.y0 = tf_y0;
      fam.p = tf_p;
      fam.q = tf_q;
      fam.b = tf_b;
      const auto grid = make_grid(tf_window, tf_n);
      const auto lines = fiber::trace_R_curve(fam.problem(), grid);
      const auto closed = fiber::tan_closed_form(fam, grid);
      const auto verts = fiber::vertices(lines);
      const double h = fiber::hausdorff(verts, closed);
      std::string cf = "x,y\n";
      for (const auto& v : closed) cf += fmt_double(v[0]) + "," + fmt_double(v[1]) + "\n";
      json rep = {{"k", tf_k}, {"y0", tf_y0}, {"y1", fam.y1()}, {"p", tf_p}, {"q", tf_q}, {"b", tf_b},
                  {"polylines", lines.size()}, {"vertices", verts.size()}, {"hausdorff", h},
                  {"cell", grid.cell()}, {"hausdorff_cells", h / grid.cell()}};
      o.add("tan_family.csv", polyline_csv(lines));
      o.add("tan_closed_form.csv", std::move(cf));
      o.add_json("tan_family.json", rep);
      return rep;
    };
  }

  // betti-form
  std::string bf_w = "0.5";
  int bf_b = 1, bf_nodes = 64;
  {
    Command& c = command("betti-form", "Betti form of the I_b model and its fiber integral");
    c.add("w", bf_w, "base point 're' or 're,im', 0 < |w| < 1");
    c.add("b", bf_b, "I_b parameter");
    c.add("angular-nodes", bf_nodes, "trapezoid nodes in arg v");
    actions["betti-form"] = [&](OutputSet& o) {
      const cplx w = parse_complex(bf_w);
      if (!(std::abs(w) > 0.0 && std::abs(w) < 1.0) || bf_b < 1) {
        throw Error(ErrorCode::kInput, "need 0 < |w| < 1 and b >= 1");
      }
      const double integral = fiber::fiber_integral(w, bf_b, bf_nodes);
      const cplx v = std::pow(std::abs(w), 0.5 * bf_b);
      const auto val = fiber::betti_form_Ib(w, v, bf_b);
      json rep = {{"w", cjson(w)},
                  {"b", bf_b},
                  {"fiber_integral", integral},
                  {"sample_v", cjson(v)},
                  {"alpha_dw", cjson(val.alpha_dw)},
                  {"alpha_dv", cjson(val.alpha_dv)},
                  {"fiber_density", val.fiber_density}};
      o.add_json("betti_form.json", rep);
      return rep;
    };
  }

  // curvature
  double cu_eta = 0.1, cu_alpha = 0.0, cu_r = 1.0;
  int cu_k = 2, cu_samples = 20001;
  {
    Command& c = command("curvature", "curvature of z^k images of arcs near the origin");
    c.add("eta", cu_eta, "distance of the arc from the origin");
    c.add("k", cu_k, "exponent");
    c.add("alpha", cu_alpha, "arc bending eta + i y + alpha y^2");
    c.add("r", cu_r, "arc half-length");
    c.add("samples", cu_samples, "samples along the arc");
    actions["curvature"] = [&](OutputSet& o) {
      const auto rep0 = fiber::curvature_blowup(cu_eta, cu_k, cu_alpha, cu_r, cu_samples);
      std::string csv = "y,re,im\n";
      const int m = 801;
      for (int i = 0; i < m; ++i) {
        const double y = -cu_r + 2.0 * cu_r * i / (m - 1);
        const cplx z = std::pow(cplx(cu_eta + cu_alpha * y * y, y), cu_k);
        csv += fmt_double(y) + "," + fmt_double(z.real()) + "," + fmt_double(z.imag()) + "\n";
      }
      json rep = {{"eta", cu_eta}, {"k", cu_k}, {"alpha", cu_alpha}, {"r", cu_r},
                  {"max_curvature", rep0.max_curvature}, {"at_y", rep0.at_y},
                  {"lower_bound", rep0.lower_bound},
                  {"arc_max_curvature", fiber::arc_max_curvature(cu_eta, cu_alpha, cu_r, cu_samples)}};
      o.add("curvature.csv", std::move(csv));
      o.add_json("curvature.json", rep);
      return rep;
    };
  }

  // torus-ue
  double ue_s1 = std::sqrt(3.0), ue_s2 = std::sqrt(2.0);
  long long ue_a = 1, ue_b = 0, ue_c = 0, ue_d = 1;
  std::size_t ue_n = 1000000;
  int ue_K = 3, ue_starts = 2;
  {
    Command& c = command("torus-ue", "Birkhoff character sums of the skew product on T^3");
    c.add("s1", ue_s1, "s1");
    c.add("s2", ue_s2, "s2");
    c.add("a", ue_a, "a");
    c.add("b", ue_b, "b");
    c.add("c", ue_c, "c");
    c.add("d", ue_d, "d");
    c.add("n", ue_n, "orbit length N");
    c.add("K", ue_K, "character height");
    c.add("starts", ue_starts, "random starting points");
    actions["torus-ue"] = [&](OutputSet& o) {
      const torus::SkewProduct g{ue_s1, ue_s2, ue_a, ue_b, ue_c, ue_d};
      const auto r = torus::unique_ergodicity_test(g, ue_n, ue_K, ctx.g.seed, ue_starts);
      std::string csv = "k,l,m,modulus\n";
      for (const auto& a : r.averages) {
        csv += std::to_string(a.klm[0]) + "," + std::to_string(a.klm[1]) + "," + std::to_string(a.klm[2]) +
               "," + fmt_double(a.modulus) + "\n";
      }
      json rep = {{"verdict", torus::ue_verdict_name(r.verdict)},
                  {"threshold", r.threshold},
                  {"max_average", r.max_average},
                  {"worst", json::array({r.worst[0], r.worst[1], r.worst[2]})},
                  {"characters", r.averages.size()},
                  {"determinant_nonzero", r.determinant_nonzero},
                  {"ergodic", r.ergodic},
                  {"invariant_character", r.invariant_character
                                              ? json::array({(*r.invariant_character)[0],
                                                             (*r.invariant_character)[1],
                                                             (*r.invariant_character)[2]})
                                              : json(nullptr)}};
      o.add("torus_ue.csv", std::move(csv));
      o.add_json("torus_ue.json", rep);
      return rep;
    };
  }

  // kummer-fit
  std::string kf_tau = "0,1";
  int kf_samples = 60;
  {
    Command& c = command("kummer-fit", "fit the (2,2,2) equation of the Kummer image");
    c.add("tau", kf_tau, "lattice modulus 're,im'");
    c.add("samples", kf_samples, "sampled images (>= 40)");
    actions["kummer-fit"] = [&](OutputSet& o) {
      const torus::Weierstrass W(parse_complex(kf_tau));
      std::mt19937_64 rng(ctx.g.seed);
      const auto fit = torus::kummer_fit(W, kf_samples, rng);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double even = 0.0, collinear = 0.0;
      for (int i = 0; i < 200; ++i) {
        const cplx a = u(rng) + u(rng) * W.tau, b = u(rng) + u(rng) * W.tau;
        const auto p = torus::kummer_phi(W, a, b), m = torus::kummer_phi(W, -a, -b);
        for (int t = 0; t < 3; ++t) {
          const double na = std::hypot(std::abs(p[t].a), std::abs(p[t].b));
          const double nb = std::hypot(std::abs(m[t].a), std::abs(m[t].b));
          even = std::max(even, std::abs(p[t].a * m[t].b - p[t].b * m[t].a) / (na * nb));
        }
        collinear = std::max(collinear, torus::collinearity_defect(W, a, b));
      }
      json rep = {{"tau", cjson(W.tau)},
                  {"g2", cjson(W.g2)},
                  {"g3", cjson(W.g3)},
                  {"samples", fit.samples},
                  {"singular_values", fit.singular_values},
                  {"gap_ratio", fit.gap_ratio},
                  {"closed_form_distance", fit.closed_form_distance},
                  {"evenness_defect", even},
                  {"collinearity_defect", collinear}};
      o.add_json("kummer_surface.json", wehler::surface_to_json(fit.surface));
      o.add_json("kummer_fit.json", rep);
      return rep;
    };
  }

  // real-structure
  double rs_t = 0.5;
  bool rs_grid = false;
  {
    Command& c = command("real-structure", "real structures on E x E with tau = 1/2 + i t");
    c.add("t", rs_t, "t > 0");
    c.flag("grid", rs_grid, "scan the 10^4-point grid of (0, 2] instead");
    actions["real-structure"] = [&](OutputSet& o) {
      auto sol_json = [](const torus::RealStructureSolution& s) {
        return json{{"t", s.t}, {"a", s.a}, {"b", s.b}, {"c", s.c}, {"d", s.d}, {"beta", cjson(s.beta)}};
      };
      json rep;
      if (rs_grid) {
        json hits = json::array();
        const auto grid = torus::real_structure_grid();
        for (double t : grid)
          for (const auto& s : torus::real_structure_classify(t)) hits.push_back(sol_json(s));
        rep = {{"grid_points", grid.size()}, {"solutions", hits}};
      } else {
        if (!(rs_t > 0.0)) throw Error(ErrorCode::kInput, "t must be positive");
        json sols = json::array();
        for (const auto& s : torus::real_structure_classify(rs_t)) sols.push_back(sol_json(s));
        rep = {{"t", rs_t}, {"solutions", sols}};
      }
      o.add_json("real_structure.json", rep);
      return rep;
    };
  }

  // deform
  std::string df_tau = "0,2", df_signs = "1,1,1";
  double df_eps = 1e-3;
  {
    Command& c = command("deform", "deform the Kummer image by a quadratic form");
    c.add("tau", df_tau, "rectangular lattice modulus 're,im'");
    c.add("eps", df_eps, "deformation size");
    c.add("signs", df_signs, "prescribed signs at v1, v2, v3");
    actions["deform"] = [&](OutputSet& o) {
      const torus::Weierstrass W(parse_complex(df_tau));
      const auto sv = parse_ints(df_signs);
      if (sv.size() != 3) throw Error(ErrorCode::kBadSignPattern, "--signs needs three entries");
      const std::array<int, 3> signs{static_cast<int>(sv[0]), static_cast<int>(sv[1]), static_cast<int>(sv[2])};
      const auto nodes = torus::kummer_nodes(W);
      const auto P = torus::swap_charts(torus::kummer_closed_form(W));
      const auto Q = torus::default_deformation_q(nodes, signs, ctx.g.seed);
      const auto r = torus::deform_222(P, nodes, Q, df_eps, signs);
      json node_list = json::array();
      for (const auto& n : r.nodes) {
        node_list.push_back({{"node", point_json(n.node)},
                             {"q_value", n.q_value},
                             {"singular_after", n.singular_after},
                             {"predicted_sheets", n.predicted_sheets}});
      }
      json sing = json::array();
      for (const auto& p : r.singular_points) sing.push_back(point_json(p));
      json rep = {{"tau", cjson(W.tau)},
                  {"eps", df_eps},
                  {"signs", json::array({signs[0], signs[1], signs[2]})},
                  {"singular_points", sing},
                  {"origin_signature", json::array({r.origin_signature[0], r.origin_signature[1]})},
                  {"real_torsion_nodes", json::array({nodes.real_torsion_nodes[0], nodes.real_torsion_nodes[1],
                                                      nodes.real_torsion_nodes[2]})},
                  {"nodes", node_list},
                  {"observed_sheets_v1", r.observed_sheets_v1}};
      o.add_json("q_form.json", wehler::surface_to_json(Q));
      o.add_json("deformed_surface.json", wehler::surface_to_json(r.surface));
      o.add_json("deform.json", rep);
      return rep;
    };
  }

  // sparse-subgroups
  double sp_eps = 0.5;
  int sp_den = 0, sp_grid = 400;
  {
    Command& c = command("sparse-subgroups", "kernels containing every subgroup of R^2/Z^2 that is not eps-dense");
    c.add("eps", sp_eps, "density scale");
    c.add("check-den", sp_den, "brute-force check over cyclic subgroups up to this denominator (0 = skip)");
    c.add("grid", sp_grid, "grid of the density oracle");
    actions["sparse-subgroups"] = [&](OutputSet& o) {
      const auto list = torus::sparse_subgroups(sp_eps);
      json arr = json::array();
      for (const auto& k : list) arr.push_back({{"m", k.m}, {"p", k.p}, {"q", k.q}});
      json rep = {{"eps", sp_eps}, {"kernels", list.size()}};
      o.add_json("sparse_subgroups.json", arr);
      if (sp_den > 0) {
        const auto chk = torus::sparse_bruteforce(list, sp_eps, sp_den, sp_grid);
        auto triples = [](const std::vector<std::array<long long, 3>>& v) {
          json a = json::array();
          for (const auto& t : v) a.push_back(json::array({t[0], t[1], t[2]}));
          return a;
        };
        json check = {{"max_den", sp_den},
                      {"grid", sp_grid},
                      {"subgroups", chk.subgroups},
                      {"non_dense", chk.non_dense},
                      {"uncovered", chk.uncovered},
                      {"uncovered_examples", triples(chk.uncovered_examples)},
                      {"nontrivial_non_dense", triples(chk.nontrivial_non_dense)}};
        o.add_json("sparse_check.json", check);
        rep["check"] = check;
      }
      return rep;
    };
  }

  // closure
  std::string cl_system = "torus", cl_start = "0.41421356237309515,0,0.7320508075688772,0";
  std::size_t cl_budget = 100000, cl_cloud = 20000;
  {
    Command& c = command("closure", "classify an orbit closure");
    c.add("system", cl_system, "torus (E x E, E = C/Z[i], SL2(Z)) or wehler");
    c.add("start", cl_start, "torus start 'Re u,Im u,Re v,Im v' (wehler: a sampled real point)");
    c.add("budget", cl_budget, "group elements applied");
    c.add("cloud", cl_cloud, "maximum rows written to cloud.csv");
    actions["closure"] = [&](OutputSet& o) {
      measures::ClosureOptions opt;
      opt.budget = cl_budget;
      opt.seed = ctx.g.seed;
      simd::Soa cloud;
      measures::OrbitClosureReport r;
      *ctx.err << "closure: " << cl_system << " budget " << cl_budget << "\n";
      if (cl_system == "torus") {
        const auto x = parse_doubles(cl_start);
        if (x.size() != 4) throw Error(ErrorCode::kInput, "--start needs four coordinates");
        const measures::TorusSystem sys{{{{{1, 1}, {0, 1}}}, {{{1, 0}, {1, 1}}}}};
        r = measures::classify_orbit_closure(sys, std::array<double, 4>{x[0], x[1], x[2], x[3]}, opt, &cloud);
      } else if (cl_system == "wehler") {
        const auto s = ctx.surface(true);
        r = measures::classify_orbit_closure(measures::WehlerSystem{s}, ctx.real_point(s), opt, &cloud);
      } else {
        throw Error(ErrorCode::kInput, "--system is torus or wehler");
      }
      json fib = json::array();
      for (const auto& f : r.fibrations) {
        json e = slope_json(f.T, f.slope);
        e["fibration"] = f.fibration;
        if (!f.error.empty()) e["error"] = f.error;
        fib.push_back(e);
      }
      json dim = nullptr;
      if (r.dimension) {
        dim = {{"value", r.dimension->value}, {"lo", r.dimension->lo}, {"hi", r.dimension->hi},
               {"r2", r.dimension->r2}, {"radii", r.dimension->radii},
               {"correlation", r.dimension->correlation}};
      }
      json rep = {{"system", cl_system},
                  {"label", measures::closure_label_name(r.label)},
                  {"budget", r.budget},
                  {"revisit", r.revisit},
                  {"distinct_points", r.distinct_points},
                  {"dimension", dim},
                  {"dimension_error", r.dimension_error},
                  {"fibrations", fib},
                  {"transversality", r.transversality},
                  {"candidate", r.candidate},
                  {"candidate_distance", r.candidate_distance},
                  {"haar_discrepancy", r.haar_discrepancy},
                  {"delta", opt.delta},
                  {"delta_cover", r.delta_cover},
                  {"dimension_three_anomaly", r.dimension_three_anomaly},
                  {"band", opt.band},
                  {"word_length", opt.word_length},
                  {"note", r.note}};
      std::string csv;
      const int dim_c = cloud.dim();
      for (int d = 0; d < dim_c; ++d) csv += (d ? ",c" : "c") + std::to_string(d);
      csv += "\n";
      const std::size_t stride = std::max<std::size_t>(1, (cloud.size() + cl_cloud - 1) / std::max<std::size_t>(1, cl_cloud));
      for (std::size_t i = 0; i < cloud.size(); i += stride) {
        for (int d = 0; d < dim_c; ++d) csv += (d ? "," : "") + fmt_double(cloud.coords[d][i]);
        csv += "\n";
      }
      o.add("cloud.csv", std::move(csv));
      o.add_json("closure.json", rep);
      return rep;
    };
  }

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      emit_error(out, "InputError", e.what(), kExitInput);
      return kExitInput;
    }
    set_thread_count(ctx.g.threads);
    std::string name;
    Command* cmd = nullptr;
    for (auto& [n, c] : cmds) {
      if (c->app->parsed()) {
        name = n;
        cmd = c.get();
      }
    }
    if (cmd == nullptr) throw Error(ErrorCode::kInput, "no subcommand");
    json run_info = {{"tool", "k3dyn"}, {"version", K3DYN_VERSION}, {"command", name}, {"seed", ctx.g.seed}};
    if (!ctx.g.config.empty()) {
      const std::string text = read_file(ctx.g.config);
      ctx.config = parse_json(text, ctx.g.config);
      if (!ctx.config.is_object()) throw Error(ErrorCode::kInput, "config must be a JSON object");
      run_info["config"] = {{"path", ctx.g.config}, {"sha256", sha256_hex(text)}};
      for (const auto& [key, val] : ctx.config.items()) {
        if (key == "surface") continue;
        const auto it = cmd->opts.find(key);
        if (it == cmd->opts.end()) throw Error(ErrorCode::kInput, "unknown config key '" + key + "'");
        if (it->second.first->count() == 0) it->second.second(val);
      }
    }
    OutputSet outputs(ctx.g.out);
    const json rep = actions.at(name)(outputs);
    json args = json::object();
    for (const auto& [key, get] : cmd->values) args[key] = get();
    run_info["arguments"] = args;
    run_info["inputs"] = ctx.inputs;
    run_info["inputs_sha256"] = sha256_hex(args.dump() + ctx.inputs.dump() +
                                           (ctx.config.contains("surface") ? ctx.config["surface"].dump() : ""));
    run_info["simd"] = simd::isa_name(simd::active_isa());
    outputs.commit(run_info);
    out << rep.dump(2) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    const int code = exit_code(e);
    emit_error(out, std::string(e.name()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    emit_error(out, "Internal", e.what(), kExitNumerical);
    return kExitNumerical;
  }
}

}  // namespace k3dyn::cli
