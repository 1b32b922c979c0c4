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

// Command-line front end: subcommand dispatch, JSON configs, artifact files
// and their manifest.

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace k3dyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

std::string sha256_hex(std::string_view data);

// Collects the files of one run and writes them, then the manifest, into a
// directory. Contents are kept so the manifest hashes exactly what was
// written.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  void add(const std::string& name, std::string content);
  void add_json(const std::string& name, const nlohmann::json& j);
  // Writes every file and manifest.json; returns the manifest.
  nlohmann::json commit(const nlohmann::json& run_info) const;
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

// Shortest round-trip decimal form, independent of locale.
std::string fmt_double(double x);

// Runs one command line. Machine output goes to out, progress to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace k3dyn::cli
