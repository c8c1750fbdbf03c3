/*
 Copyright 2026 The egcsi Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "egcsi/channel_synth.hpp"
#include "egcsi/eval_harness.hpp"
#include "egcsi/feedback_pipeline.hpp"

namespace egcsi {

/// Schema version written to and required in every config document.
inline constexpr int kConfigVersion = 1;

/// JSON text of an experiment config (pretty-printed, stable key order).
std::string experiment_config_to_json(const ExperimentConfig& cfg);
/// Parses an experiment config. Unknown keys, a wrong version or
/// out-of-range field values throw ConfigError. Cross-field checks (for
/// example disjoint train/test ids) are left to ExperimentConfig::validate,
/// so a config without environments can still carry pipeline settings.
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::string environments_to_json(const std::vector<EnvironmentSpec>& envs);
/// Accepts {"version": 1, "environments": [...]} or a bare array.
std::vector<EnvironmentSpec> environments_from_json(const std::string& text);
std::vector<EnvironmentSpec> load_environments(const std::filesystem::path& path);

std::string environment_to_json(const EnvironmentSpec& env);
EnvironmentSpec environment_from_json(const std::string& text);

std::string pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const std::string& text);

}  // namespace egcsi
