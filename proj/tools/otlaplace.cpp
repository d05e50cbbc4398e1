// Copyright 2026 The otlaplace Authors
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

// otlaplace: batch runner for the label-propagation experiments.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "otlaplace/error.hpp"
#include "otlaplace/experiments.hpp"

namespace {

std::string exit_code_table() {
  std::string out = "Exit codes:\n  0  success\n  1  unexpected failure\n  2  bad command line\n";
  for (int c = 0; c <= static_cast<int>(otlaplace::Errc::kConfigError); ++c) {
    const auto code = static_cast<otlaplace::Errc>(c);
    out += "  " + std::to_string(otlaplace::exit_code(code)) + " " +
           std::string(otlaplace::errc_name(code)) + "\n";
  }
  return out;
}

int report_error(const std::string& code, const std::string& message, int status) {
  nlohmann::json j{{"error", code}, {"message", message}, {"exit_code", status}};
  std::cerr << j.dump() << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised classification of point clouds on optimal-transport graphs"};
  app.footer(exit_code_table());
  std::string kind;
  std::optional<std::string> config_path;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  app.add_option("kind", kind, "synthetic2d | pointcloud | consistency | rates | tlp_demo")
      ->required();
  app.add_option("--config", config_path, "JSON config; defaults for the kind when omitted");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Base seed; trial t uses seed xor t");
  app.add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto parsed_kind = otlaplace::parse_experiment_kind(kind);
    auto config = config_path ? otlaplace::load_config(*config_path, parsed_kind)
                              : otlaplace::parse_config("{}", parsed_kind);
    if (jobs) config.jobs = *jobs;
    if (seed) config.seed = *seed;
    if (out) config.out_dir = *out;
    config.validate();
    for (const auto& name : otlaplace::run_experiment(config)) {
      std::cout << (config.out_dir / name).string() << "\n";
    }
  } catch (const otlaplace::Error& e) {
    const std::string name(otlaplace::errc_name(e.code()));
    std::string message = e.what();
    if (message.rfind(name + ": ", 0) == 0) message.erase(0, name.size() + 2);
    return report_error(name, message, otlaplace::exit_code(e.code()));
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), 1);
  }
  return 0;
}
