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

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "k3dyn/cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
  json report;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "k3dyn_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run run(std::vector<std::string> args) {
  std::vector<const char*> argv{"k3dyn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = k3dyn::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  r.report = json::parse(r.out, nullptr, false);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Every listed output exists with the recorded hash and size, and every
// file in the directory other than the manifest is listed.
void check_manifest(const fs::path& dir, std::initializer_list<const char*> expected) {
  REQUIRE(fs::exists(dir / "manifest.json"));
  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["tool"] == "k3dyn");
  CHECK(m.contains("seed"));
  CHECK(m.contains("version"));
  CHECK(m["inputs_sha256"].get<std::string>().size() == 64);
  std::vector<std::string> listed;
  for (const auto& o : m["outputs"]) {
    const std::string name = o["file"];
    listed.push_back(name);
    REQUIRE(fs::exists(dir / name));
    const std::string content = slurp(dir / name);
    CHECK(o["sha256"] == k3dyn::cli::sha256_hex(content));
    CHECK(o["bytes"] == content.size());
  }
  for (const char* e : expected) CHECK(std::find(listed.begin(), listed.end(), e) != listed.end());
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    CHECK(std::find(listed.begin(), listed.end(), name) != listed.end());
  }
}

std::vector<std::string> csv_header(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  return cols;
}

std::size_t csv_rows(const fs::path& p) {
  std::ifstream f(p);
  std::size_t n = 0;
  for (std::string line; std::getline(f, line);) n += !line.empty();
  return n == 0 ? 0 : n - 1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("sha256 of known strings") {
    CHECK(k3dyn::cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(k3dyn::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(k3dyn::cli::fmt_double(0.1) == "0.1");
    CHECK(k3dyn::cli::fmt_double(-2.5e-300) == "-2.5e-300");
  }

  TEST_CASE("real-structure example") {
    const fs::path d = scratch("rs");
    const Run r = run({"--out", d.string(), "real-structure", "--t", "0.5"});
    REQUIRE(r.code == 0);
    REQUIRE(r.report["solutions"].size() == 1);
    CHECK(r.report["solutions"][0]["b"] == 2);
    CHECK(r.report["solutions"][0]["d"] == 1);
    check_manifest(d, {"real_structure.json"});
    CHECK(json::parse(slurp(d / "real_structure.json")) == r.report);

    const fs::path g = scratch("rs_grid");
    const Run grid = run({"--out", g.string(), "real-structure", "--grid"});
    REQUIRE(grid.code == 0);
    CHECK(grid.report["grid_points"] == 10000);
    CHECK(grid.report["solutions"].size() == 3);
  }

  TEST_CASE("classify-word example") {
    const fs::path d = scratch("cw");
    const Run r = run({"--out", d.string(), "classify-word", "--word", "1,2,3"});
    REQUIRE(r.code == 0);
    CHECK(r.report["type"] == "Loxodromic");
    CHECK(std::abs(r.report["entropy"].get<double>() - std::log(9.0 + 4.0 * std::sqrt(5.0))) <= 1e-9);
    check_manifest(d, {"classify.json"});
    const Run alias = run({"--out", scratch("cw_alias").string(), "classify", "--word", "1,2"});
    REQUIRE(alias.code == 0);
    CHECK(alias.report["type"] == "Parabolic");
  }

  TEST_CASE("sparse-subgroups example") {
    const fs::path d = scratch("sp");
    const Run r = run({"--out", d.string(), "sparse-subgroups", "--eps", "0.5", "--check-den", "6"});
    REQUIRE(r.code == 0);
    check_manifest(d, {"sparse_subgroups.json", "sparse_check.json"});
    const json list = json::parse(slurp(d / "sparse_subgroups.json"));
    REQUIRE(list.is_array());
    for (const auto& k : list) {
      CHECK(k.contains("m"));
      CHECK(k.contains("p"));
      CHECK(k.contains("q"));
    }
    const json check = json::parse(slurp(d / "sparse_check.json"));
    CHECK(check["uncovered"] == 0);
    const fs::path b = scratch("sp_big");
    const Run big = run({"--out", b.string(), "sparse-subgroups", "--eps", "0.75"});
    REQUIRE(big.code == 0);
    CHECK(json::parse(slurp(b / "sparse_subgroups.json")).size() <= 1);
  }

  TEST_CASE("every subcommand writes its artifacts") {
    struct Case {
      std::vector<std::string> args;
      std::initializer_list<const char*> files;
    };
    const std::vector<Case> cases{
        {{"surface-check", "--points", "20"}, {"surface.json", "surface_check.json"}},
        {{"orbit", "--word", "1,2", "--steps", "200", "--real"}, {"orbit.csv", "orbit.json"}},
        {{"rotation", "--translation", "0.25,0.5", "--steps", "1000"}, {"rotation.json"}},
        {{"r-curve", "--tau", "0,1", "--t", "1,0", "--n", "64"}, {"r_curve.csv", "r_curve.json"}},
        {{"tan-family", "--k", "1", "--n", "128"}, {"tan_family.csv", "tan_closed_form.csv", "tan_family.json"}},
        {{"betti-form", "--w", "0.5", "--b", "1"}, {"betti_form.json"}},
        {{"curvature", "--eta", "0.1", "--k", "2"}, {"curvature.csv", "curvature.json"}},
        {{"torus-ue", "--n", "20000"}, {"torus_ue.csv", "torus_ue.json"}},
        {{"kummer-fit", "--samples", "40"}, {"kummer_surface.json", "kummer_fit.json"}},
        {{"deform"}, {"q_form.json", "deformed_surface.json", "deform.json"}},
        {{"closure", "--budget", "5000", "--cloud", "1000"}, {"cloud.csv", "closure.json"}},
    };
    int i = 0;
    for (const auto& c : cases) {
      CAPTURE(c.args[0]);
      const fs::path d = scratch("sub" + std::to_string(i++));
      std::vector<std::string> args{"--out", d.string()};
      args.insert(args.end(), c.args.begin(), c.args.end());
      const Run r = run(args);
      CHECK(r.code == 0);
      if (r.code != 0) {
        MESSAGE(r.out);
        continue;
      }
      CHECK_FALSE(r.report.is_discarded());
      check_manifest(d, c.files);
      const json m = json::parse(slurp(d / "manifest.json"));
      CHECK(m["command"] == c.args[0]);
    }
  }

  TEST_CASE("CSV artifacts have headers and rows") {
    const fs::path d = scratch("csv");
    REQUIRE(run({"--out", d.string(), "curvature", "--eta", "0.1", "--k", "2"}).code == 0);
    CHECK(csv_header(d / "curvature.csv").size() >= 2);
    CHECK(csv_rows(d / "curvature.csv") > 10);
    const fs::path c = scratch("csv_closure");
    REQUIRE(run({"--out", c.string(), "closure", "--budget", "3000", "--cloud", "500"}).code == 0);
    CHECK(csv_header(c / "cloud.csv") == std::vector<std::string>{"c0", "c1", "c2", "c3"});
    CHECK(csv_rows(c / "cloud.csv") <= 501);
    CHECK(csv_rows(c / "cloud.csv") >= 400);
    const fs::path t = scratch("csv_ue");
    REQUIRE(run({"--out", t.string(), "torus-ue", "--n", "5000", "--K", "2"}).code == 0);
    CHECK(csv_header(t / "torus_ue.csv") == std::vector<std::string>{"k", "l", "m", "modulus"});
    CHECK(csv_rows(t / "torus_ue.csv") == (5 * 5 * 5 - 1) / 2);
  }

  TEST_CASE("reruns are byte-identical, also across thread counts") {
    const std::vector<std::string> cmd{"closure", "--budget", "4000", "--cloud", "800"};
    std::vector<fs::path> dirs;
    for (const char* threads : {"1", "1", "3"}) {
      const fs::path d = scratch(std::string("det") + std::to_string(dirs.size()));
      std::vector<std::string> args{"--out", d.string(), "--seed", "7", "--threads", threads};
      args.insert(args.end(), cmd.begin(), cmd.end());
      REQUIRE(run(args).code == 0);
      dirs.push_back(d);
    }
    for (const char* f : {"cloud.csv", "closure.json", "manifest.json"}) {
      CHECK(slurp(dirs[0] / f) == slurp(dirs[1] / f));
      CHECK(slurp(dirs[0] / f) == slurp(dirs[2] / f));
    }
    const fs::path other = scratch("det_seed");
    std::vector<std::string> args{"--out", other.string(), "--seed", "8"};
    args.insert(args.end(), cmd.begin(), cmd.end());
    REQUIRE(run(args).code == 0);
    CHECK(slurp(dirs[0] / "cloud.csv") != slurp(other / "cloud.csv"));
  }

  TEST_CASE("config files fill options not given on the command line") {
    const fs::path d = scratch("cfg");
    {
      std::ofstream f(d / "cfg.json");
      f << R"({"t": 0.8660254037844386})";
    }
    const Run r = run({"--out", (d / "a").string(), "--config", (d / "cfg.json").string(), "real-structure"});
    REQUIRE(r.code == 0);
    REQUIRE(r.report["solutions"].size() == 1);
    CHECK(r.report["solutions"][0]["b"] == 1);
    const json m = json::parse(slurp(d / "a" / "manifest.json"));
    CHECK(m["config"]["sha256"] == k3dyn::cli::sha256_hex(slurp(d / "cfg.json")));
    CHECK(m["arguments"]["t"].get<double>() == doctest::Approx(std::sqrt(3.0) / 2.0));

    const Run cli_wins =
        run({"--out", (d / "b").string(), "--config", (d / "cfg.json").string(), "real-structure", "--t", "0.5"});
    REQUIRE(cli_wins.code == 0);
    CHECK(cli_wins.report["solutions"][0]["b"] == 2);

    {
      std::ofstream f(d / "bad.json");
      f << R"({"bogus": 1})";
    }
    const Run bad = run({"--out", (d / "c").string(), "--config", (d / "bad.json").string(), "real-structure"});
    CHECK(bad.code == 2);
    CHECK(bad.report["error"] == "InputError");
  }

  TEST_CASE("errors are JSON with exit codes") {
    const Run unknown = run({"--out", scratch("e1").string(), "no-such-command"});
    CHECK(unknown.code == 2);
    CHECK(unknown.report["exit_code"] == 2);
    const Run missing = run({"--out", scratch("e2").string()});
    CHECK(missing.code == 2);
    const Run badword = run({"--out", scratch("e3").string(), "classify-word", "--word", "1,4"});
    CHECK(badword.code == 2);
    CHECK(badword.report["error"] == "InputError");
    const Run badt = run({"--out", scratch("e4").string(), "real-structure", "--t", "-1"});
    CHECK(badt.code == 2);
    const Run signs = run({"--out", scratch("e5").string(), "deform", "--signs", "1,0,1"});
    CHECK(signs.code == 3);
    CHECK(signs.report["error"] == "BadSignPattern");
    CHECK(signs.report["message"].get<std::string>().size() > 0);
    CHECK_FALSE(fs::exists(scratch("e5") / "manifest.json"));
  }

  TEST_CASE("progress goes to stderr and stdout stays JSON") {
    const Run r = run({"--out", scratch("progress").string(), "closure", "--budget", "3000"});
    REQUIRE(r.code == 0);
    CHECK_FALSE(r.report.is_discarded());
    CHECK(r.report.contains("label"));
  }

  TEST_CASE("the installed binary runs") {
    const fs::path d = scratch("binary");
    const std::string cmd = std::string("\"") + K3DYN_TOOL_PATH + "\" --out \"" + d.string() +
                            "\" real-structure --t 0.5 > \"" + (d / "stdout.json").string() + "\"";
    CHECK(std::system(cmd.c_str()) == 0);
    const json r = json::parse(slurp(d / "stdout.json"));
    CHECK(r["solutions"][0]["b"] == 2);
    const std::string bad = std::string("\"") + K3DYN_TOOL_PATH + "\" --out \"" + d.string() +
                            "\" real-structure --t -1 > /dev/null";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == 2);
  }
}
