// Copyright 2026 The dutem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "dutem/error.hpp"
#include "dutem/kernels.hpp"
#include "dutem/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kSimulationCap = 3, kModelViolation = 4 };

struct Options {
  std::string config;
  std::string out = "dutem_out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::size_t> chi;
  std::string profile = "desk";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kicked-Ising noise learning and tensor-network error mitigation"};
  app.require_subcommand(1);
  Options opt;
  using Stage = std::function<dutem::StageStatus(const dutem::PipelineConfig&, const std::filesystem::path&)>;
  const std::map<std::string, std::pair<std::string, Stage>> stages{
      {"synth", {"inject noise and generate measurement data", dutem::stage_synth}},
      {"learn", {"learn the noise model from benchmark data", dutem::stage_learn}},
      {"mitigate", {"estimate unmitigated and mitigated correlators", dutem::stage_mitigate}},
      {"simulate", {"classical tensor-network benchmarks", dutem::stage_simulate}},
      {"report", {"sampling overheads and summary", dutem::stage_report}},
      {"run", {"all stages in order", dutem::run_pipeline}},
  };
  std::map<CLI::App*, Stage> dispatch;
  for (const auto& [name, entry] : stages) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", opt.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "artifact directory");
    sub->add_option("--seed", opt.seed, "override the configuration seed");
    sub->add_option("--threads", opt.threads, "OpenMP worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--chi", opt.chi, "override the maximum bond dimension")->check(CLI::PositiveNumber);
    sub->add_option("--profile", opt.profile, "sampling profile")->check(CLI::IsMember({"desk", "large"}));
    dispatch[sub] = entry.second;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  try {
    if (opt.threads) dutem::kernels::set_threads(*opt.threads);
    auto cfg = dutem::PipelineConfig::from_file(opt.config, dutem::profile_from_string(opt.profile));
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.chi) cfg.chi = *opt.chi;
    std::filesystem::create_directories(opt.out);
    for (const auto& [sub, stage] : dispatch) {
      if (!sub->parsed()) continue;
      const dutem::StageStatus st = stage(cfg, opt.out);
      for (const auto& w : st.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "artifacts written to " << opt.out << '\n';
      return st.model_violation ? kModelViolation : kOk;
    }
  } catch (const dutem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const dutem::SimulationCapExceeded& e) {
    std::cerr << "simulation cap exceeded: " << e.what() << '\n';
    return kSimulationCap;
  } catch (const dutem::ModelViolation& e) {
    std::cerr << "model violation: " << e.what() << '\n';
    return kModelViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
