/*
 * Copyright (c) 2026, the sdn-evb authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sdnevb/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"explicit-state checking for a layered SDN event machine"};
  app.require_subcommand(0, 0);

  std::string mode;
  app.add_option("mode", mode, "simulate | explore | check | refine-check | decompose-check")
      ->required();

  sdnevb::RunnerOptions options;
  std::string levelText = "L3";
  std::string policyText;
  std::string ltlPath;
  std::string outPath;
  app.add_option("-s,--scenario", options.scenario,
                 "scenario name (resolved via SDN_EVB_SCENARIOS) or file path")
      ->required();
  app.add_option("-l,--level", levelText, "machine level, L0..L3")
      ->capture_default_str();
  app.add_option("-d,--depth", options.bounds.maxDepth,
                 "exploration depth bound, -1 for none")
      ->capture_default_str();
  app.add_option("-b,--branch", options.bounds.maxBranch,
                 "per-layer successor budget, -1 for none")
      ->capture_default_str();
  app.add_option("-p,--policy", policyText,
                 "exhaustive | seeded-random | priority-then-seed");
  app.add_option("--seed", options.seed, "seed for seeded policies")
      ->capture_default_str();
  app.add_option("--steps", options.steps, "simulation step budget")
      ->capture_default_str();
  app.add_option("-f,--ltl", ltlPath, "formula file for check mode");
  app.add_option("-o,--out", outPath, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& help) {
    std::cout << app.help();
    return sdnevb::kExitOk;
  } catch (const CLI::ParseError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return sdnevb::kExitUsage;
  }

  const auto level = sdnevb::parse_level(levelText);
  if (!level) {
    std::cerr << "error: unknown level: " << levelText << "\n";
    return sdnevb::kExitUsage;
  }
  options.level = *level;
  if (!policyText.empty()) options.policy = policyText;
  if (!ltlPath.empty()) options.formulasPath = ltlPath;

  std::ofstream file;
  if (!outPath.empty()) {
    file.open(outPath);
    if (!file) {
      std::cerr << "error: cannot write: " << outPath << "\n";
      return sdnevb::kExitUsage;
    }
  }
  std::ostream& out = outPath.empty() ? std::cout : file;
  return sdnevb::run_mode(mode, options, out, std::cerr);
}
