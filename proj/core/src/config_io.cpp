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
#include "egcsi/config_io.hpp"

#include <algorithm>
#include <string>

#include "binary_io.hpp"
#include "egcsi/errors.hpp"
#include "json_convert.hpp"

namespace egcsi {
namespace detail {
namespace {

template <typename T>
void read_into(const json& j, const char* key, T& out, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(what + "." + key + ": wrong type");
  }
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

void check_version(const json& j) {
  auto it = j.find("version");
  if (it == j.end()) throw ConfigError("config is missing \"version\"");
  if (!it->is_number_integer() || it->get<int>() != kConfigVersion)
    throw ConfigError("unsupported config version (expected " + std::to_string(kConfigVersion) + ")");
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) throw ConfigError(what + ": unknown key \"" + key + "\"");
  }
}

json to_json(const SystemConfig& s) {
  return json{{"n_tx", s.n_tx},
              {"n_sc", s.n_sc},
              {"carrier_hz", s.carrier_hz},
              {"bandwidth_hz", s.bandwidth_hz},
              {"geometry", s.geometry == ArrayGeometry::ula ? "ula" : "upa"},
              {"upa_horizontal", s.upa_horizontal},
              {"upa_vertical", s.upa_vertical}};
}

json to_json(const EnvironmentSpec& e) {
  return json{{"env_id", e.env_id},
              {"num_clusters", e.num_clusters},
              {"cluster_aod_centers_rad", e.cluster_aod_centers_rad},
              {"cluster_aod_spread_rad", e.cluster_aod_spread_rad},
              {"rms_delay_spread_s", e.rms_delay_spread_s},
              {"los_probability", e.los_probability},
              {"paths_per_cluster", {e.paths_per_cluster_min, e.paths_per_cluster_max}},
              {"power_decay_per_cluster_db", e.power_decay_per_cluster_db},
              {"los_k_factor_db", {e.los_k_factor_db_min, e.los_k_factor_db_max}},
              {"zod_center_rad", e.zod_center_rad},
              {"zod_spread_rad", e.zod_spread_rad},
              {"rng_seed", e.rng_seed}};
}

json to_json(const CodebookConfig& c) {
  return json{{"oversample_angular", c.oversample_angular},
              {"oversample_delay", c.oversample_delay},
              {"phase_bits", c.phase_bits}};
}

json to_json(const DecouplingOptions& d) {
  return json{{"eta", d.eta}, {"max_components", d.max_components}};
}

json to_json(const PipelineConfig& p) {
  return json{{"system", to_json(p.system)}, {"codebook", to_json(p.codebook)}, {"decoupling", to_json(p.decoupling)}};
}

json to_json(const CodecPoint& c) {
  return json{{"kind", to_string(c.kind)}, {"codeword_len", c.codeword_len}, {"element_bits", c.element_bits}};
}

json to_json(const ExperimentConfig& x) {
  json j = to_json(x.pipeline);
  j["version"] = kConfigVersion;
  j["train_envs"] = json::array();
  for (const auto& e : x.train_envs) j["train_envs"].push_back(to_json(e));
  j["test_envs"] = json::array();
  for (const auto& e : x.test_envs) j["test_envs"].push_back(to_json(e));
  j["train_samples_per_env"] = x.train_samples_per_env;
  j["test_samples_per_env"] = x.test_samples_per_env;
  j["codec_grid"] = json::array();
  for (const auto& c : x.codec_grid) j["codec_grid"].push_back(to_json(c));
  j["seeds"] = x.seeds;
  j["include_vanilla"] = x.include_vanilla;
  j["include_passthrough_bound"] = x.include_passthrough_bound;
  j["sweep"] = json{{"codeword_lens", x.sweep_codeword_lens}, {"train_env_counts", x.sweep_train_env_counts}};
  j["output_dir"] = x.output_dir;
  return j;
}

SystemConfig system_from_json(const json& j) {
  const std::string w = "system";
  require_keys(j, {"n_tx", "n_sc", "carrier_hz", "bandwidth_hz", "geometry", "upa_horizontal", "upa_vertical"}, w);
  SystemConfig s;
  read_into(j, "n_tx", s.n_tx, w);
  read_into(j, "n_sc", s.n_sc, w);
  read_into(j, "carrier_hz", s.carrier_hz, w);
  read_into(j, "bandwidth_hz", s.bandwidth_hz, w);
  std::string geom = "ula";
  read_into(j, "geometry", geom, w);
  if (geom == "ula")
    s.geometry = ArrayGeometry::ula;
  else if (geom == "upa")
    s.geometry = ArrayGeometry::upa;
  else
    throw ConfigError("system.geometry must be \"ula\" or \"upa\"");
  read_into(j, "upa_horizontal", s.upa_horizontal, w);
  read_into(j, "upa_vertical", s.upa_vertical, w);
  s.validate();
  return s;
}

EnvironmentSpec environment_from_json(const json& j) {
  const std::string w = "environment";
  require_keys(j,
               {"env_id", "num_clusters", "cluster_aod_centers_rad", "cluster_aod_spread_rad", "rms_delay_spread_s",
                "los_probability", "paths_per_cluster", "power_decay_per_cluster_db", "los_k_factor_db",
                "zod_center_rad", "zod_spread_rad", "rng_seed"},
               w);
  EnvironmentSpec e;
  read_into(j, "env_id", e.env_id, w);
  const std::string we = w + " " + e.env_id;
  read_into(j, "num_clusters", e.num_clusters, we);
  read_into(j, "cluster_aod_centers_rad", e.cluster_aod_centers_rad, we);
  read_into(j, "cluster_aod_spread_rad", e.cluster_aod_spread_rad, we);
  read_into(j, "rms_delay_spread_s", e.rms_delay_spread_s, we);
  read_into(j, "los_probability", e.los_probability, we);
  std::vector<int> ppc{e.paths_per_cluster_min, e.paths_per_cluster_max};
  read_into(j, "paths_per_cluster", ppc, we);
  if (ppc.size() != 2) throw ConfigError(we + ".paths_per_cluster must be [min, max]");
  e.paths_per_cluster_min = ppc[0];
  e.paths_per_cluster_max = ppc[1];
  read_into(j, "power_decay_per_cluster_db", e.power_decay_per_cluster_db, we);
  std::vector<double> kf{e.los_k_factor_db_min, e.los_k_factor_db_max};
  read_into(j, "los_k_factor_db", kf, we);
  if (kf.size() != 2) throw ConfigError(we + ".los_k_factor_db must be [min, max]");
  e.los_k_factor_db_min = kf[0];
  e.los_k_factor_db_max = kf[1];
  read_into(j, "zod_center_rad", e.zod_center_rad, we);
  read_into(j, "zod_spread_rad", e.zod_spread_rad, we);
  read_into(j, "rng_seed", e.rng_seed, we);
  e.validate();
  return e;
}

CodebookConfig codebook_from_json(const json& j) {
  const std::string w = "codebook";
  require_keys(j, {"oversample_angular", "oversample_delay", "phase_bits"}, w);
  CodebookConfig c;
  read_into(j, "oversample_angular", c.oversample_angular, w);
  read_into(j, "oversample_delay", c.oversample_delay, w);
  read_into(j, "phase_bits", c.phase_bits, w);
  c.validate();
  return c;
}

DecouplingOptions decoupling_from_json(const json& j) {
  const std::string w = "decoupling";
  require_keys(j, {"eta", "max_components"}, w);
  DecouplingOptions d;
  read_into(j, "eta", d.eta, w);
  read_into(j, "max_components", d.max_components, w);
  d.validate();
  return d;
}

PipelineConfig pipeline_from_json(const json& j) {
  PipelineConfig p;
  if (auto it = j.find("system"); it != j.end()) p.system = system_from_json(*it);
  if (auto it = j.find("codebook"); it != j.end()) p.codebook = codebook_from_json(*it);
  if (auto it = j.find("decoupling"); it != j.end()) p.decoupling = decoupling_from_json(*it);
  return p;
}

CodecPoint codec_point_from_json(const json& j) {
  const std::string w = "codec_grid";
  require_keys(j, {"kind", "codeword_len", "element_bits"}, w);
  CodecPoint c;
  std::string kind = to_string(c.kind);
  read_into(j, "kind", kind, w);
  c.kind = codec_kind_from_string(kind);
  read_into(j, "codeword_len", c.codeword_len, w);
  read_into(j, "element_bits", c.element_bits, w);
  return c;
}

ExperimentConfig experiment_from_json(const json& j) {
  const std::string w = "config";
  require_keys(j,
               {"version", "system", "codebook", "decoupling", "train_envs", "test_envs", "train_samples_per_env",
                "test_samples_per_env", "codec_grid", "seeds", "include_vanilla", "include_passthrough_bound",
                "sweep", "output_dir"},
               w);
  check_version(j);
  ExperimentConfig x;
  x.pipeline = pipeline_from_json(j);
  if (auto it = j.find("train_envs"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("train_envs must be an array");
    for (const auto& e : *it) x.train_envs.push_back(environment_from_json(e));
  }
  if (auto it = j.find("test_envs"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("test_envs must be an array");
    for (const auto& e : *it) x.test_envs.push_back(environment_from_json(e));
  }
  read_into(j, "train_samples_per_env", x.train_samples_per_env, w);
  read_into(j, "test_samples_per_env", x.test_samples_per_env, w);
  if (auto it = j.find("codec_grid"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("codec_grid must be an array");
    x.codec_grid.clear();
    for (const auto& c : *it) x.codec_grid.push_back(codec_point_from_json(c));
  }
  read_into(j, "seeds", x.seeds, w);
  read_into(j, "include_vanilla", x.include_vanilla, w);
  read_into(j, "include_passthrough_bound", x.include_passthrough_bound, w);
  if (auto it = j.find("sweep"); it != j.end()) {
    require_keys(*it, {"codeword_lens", "train_env_counts"}, "sweep");
    read_into(*it, "codeword_lens", x.sweep_codeword_lens, "sweep");
    read_into(*it, "train_env_counts", x.sweep_train_env_counts, "sweep");
  }
  read_into(j, "output_dir", x.output_dir, w);
  return x;
}

}  // namespace detail

std::string experiment_config_to_json(const ExperimentConfig& cfg) { return detail::to_json(cfg).dump(2) + "\n"; }

ExperimentConfig experiment_config_from_json(const std::string& text) {
  return detail::experiment_from_json(detail::parse_text(text));
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return experiment_config_from_json(detail::read_text(path));
}

std::string environments_to_json(const std::vector<EnvironmentSpec>& envs) {
  detail::json j{{"version", kConfigVersion}, {"environments", detail::json::array()}};
  for (const auto& e : envs) j["environments"].push_back(detail::to_json(e));
  return j.dump(2) + "\n";
}

std::vector<EnvironmentSpec> environments_from_json(const std::string& text) {
  const detail::json j = detail::parse_text(text);
  const detail::json* arr = &j;
  if (j.is_object()) {
    detail::require_keys(j, {"version", "environments"}, "environments file");
    detail::check_version(j);
    auto it = j.find("environments");
    if (it == j.end()) throw ConfigError("environments file has no \"environments\" array");
    arr = &*it;
  }
  if (!arr->is_array()) throw ConfigError("environments must be an array");
  std::vector<EnvironmentSpec> out;
  for (const auto& e : *arr) out.push_back(detail::environment_from_json(e));
  return out;
}

std::vector<EnvironmentSpec> load_environments(const std::filesystem::path& path) {
  return environments_from_json(detail::read_text(path));
}

std::string environment_to_json(const EnvironmentSpec& env) { return detail::to_json(env).dump(2) + "\n"; }

EnvironmentSpec environment_from_json(const std::string& text) {
  return detail::environment_from_json(detail::parse_text(text));
}

std::string pipeline_config_to_json(const PipelineConfig& cfg) {
  detail::json j = detail::to_json(cfg);
  j["version"] = kConfigVersion;
  return j.dump(2) + "\n";
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
  const detail::json j = detail::parse_text(text);
  detail::require_keys(j, {"version", "system", "codebook", "decoupling"}, "pipeline config");
  detail::check_version(j);
  return detail::pipeline_from_json(j);
}

}  // namespace egcsi
