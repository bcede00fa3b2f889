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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dutem/circuits.hpp"
#include "dutem/measurement.hpp"
#include "dutem/noise.hpp"
#include "json.hpp"

namespace dutem {

inline constexpr const char* kVersion = "0.1.0";

enum class Profile { desk, large };
Profile profile_from_string(const std::string& s);

// Parsed run configuration. Physics parameters have no defaults; numerical
// and sampling parameters default from the profile.
struct PipelineConfig {
  // model
  std::size_t n_qubits = 0;
  double J = 0, b = 0, h = 0;
  std::size_t t_max = 0;
  // injected noise: either a file or a random sparse model of given total rate
  std::optional<std::string> noise_file;
  double noise_total_rate = 0;
  double noise_weight2_scale = 0.25;  // weight-2 rates relative to weight-1
  double readout_error = 0;
  // measurement
  std::size_t settings = 256;
  std::size_t shots = 256;
  std::string backend = "auto";
  bool trex = true;
  std::size_t trex_shots = 1 << 14;
  // learning
  bool learn = true;
  std::vector<std::size_t> learn_depths{0, 2, 6, 12, 20, 34};
  std::size_t learn_settings = 64;
  std::size_t learn_shots = 32;
  std::size_t clifford_shots = 1 << 14;
  double untuned_split_weight = 1e-3;
  // tensor networks
  std::size_t chi = 64;
  double cutoff = 1e-12;
  bool light_cone = false;
  std::vector<std::size_t> convergence_chis{4, 8, 16, 32, 64};
  // sweep of b around its configured value
  std::vector<double> b_offsets;
  std::uint64_t seed = 0;
  Profile profile = Profile::desk;
  nlohmann::json raw;

  // Throws ConfigError naming the offending path.
  static PipelineConfig from_json(const nlohmann::json& j, Profile profile = Profile::desk);
  static PipelineConfig from_file(const std::string& path, Profile profile = Profile::desk);
  KickedIsingParams params(std::size_t t) const;
};

// Random sparse model with uniform(0.5, 1.5) rates, weight-2 rates scaled,
// normalized to the given total per layer; both slots share the draw.
NoiseModel random_sparse_model(std::size_t n, double total_rate, double weight2_scale, std::uint64_t seed);

struct StageStatus {
  bool model_violation = false;
  std::vector<std::string> warnings;
};

// Stages read and write artifacts under `out`.
StageStatus stage_synth(const PipelineConfig& cfg, const std::filesystem::path& out);
StageStatus stage_learn(const PipelineConfig& cfg, const std::filesystem::path& out);
StageStatus stage_mitigate(const PipelineConfig& cfg, const std::filesystem::path& out);
StageStatus stage_simulate(const PipelineConfig& cfg, const std::filesystem::path& out);
StageStatus stage_report(const PipelineConfig& cfg, const std::filesystem::path& out);
// All stages in order plus the optional b sweep.
StageStatus run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out);

std::string shots_file_name(std::size_t t);

}  // namespace dutem
