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

// JSON conversions shared by the config reader and the file containers.

#include <initializer_list>
#include <string>

#include "egcsi/alignment.hpp"
#include "egcsi/channel_synth.hpp"
#include "egcsi/decoupling.hpp"
#include "egcsi/eval_harness.hpp"
#include "egcsi/feedback_pipeline.hpp"
#include "json.hpp"

namespace egcsi::detail {

using nlohmann::json;

/// Throws ConfigError when `j` is not an object or holds a key outside `allowed`.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what);

json to_json(const SystemConfig& s);
json to_json(const EnvironmentSpec& e);
json to_json(const CodebookConfig& c);
json to_json(const DecouplingOptions& d);
json to_json(const PipelineConfig& p);
json to_json(const CodecPoint& c);
json to_json(const ExperimentConfig& x);

/// Missing keys keep their defaults. Values are validated.
SystemConfig system_from_json(const json& j);
EnvironmentSpec environment_from_json(const json& j);
CodebookConfig codebook_from_json(const json& j);
DecouplingOptions decoupling_from_json(const json& j);
/// Reads the "system", "codebook" and "decoupling" members of `j`, if present.
PipelineConfig pipeline_from_json(const json& j);
CodecPoint codec_point_from_json(const json& j);
ExperimentConfig experiment_from_json(const json& j);

}  // namespace egcsi::detail
