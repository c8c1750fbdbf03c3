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
#include "egcsi/channel_synth.hpp"

#include <algorithm>
#include <cmath>

#include "egcsi/errors.hpp"

namespace egcsi {

namespace {

constexpr double kAodLimit = kPi / 2.0 - 1e-6;

CVector ula_response(double spatial_freq, int n) {
  // spatial_freq is sin(angle); element t has phase pi * t * spatial_freq.
  CVector a(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int t = 0; t < n; ++t) a(t) = scale * std::exp(kJ * (kPi * t * spatial_freq));
  return a;
}

}  // namespace

void SystemConfig::validate() const {
  if (n_tx < 1 || n_sc < 1) throw ConfigError("n_tx and n_sc must be >= 1");
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
    throw ConfigError("bandwidth_hz must be positive");
  if (!(carrier_hz > 0.0)) throw ConfigError("carrier_hz must be positive");
  if (!(subcarrier_spacing_hz() > 0.0)) throw ConfigError("subcarrier spacing must be positive");
  if (geometry == ArrayGeometry::upa) {
    if (upa_horizontal < 1 || upa_vertical < 1 || upa_horizontal * upa_vertical != n_tx)
      throw ConfigError("UPA requires upa_horizontal * upa_vertical == n_tx");
  }
}

double MultipathSet::total_power() const {
  double p = 0.0;
  for (const auto& path : paths) p += std::norm(path.gain);
  return p;
}

void EnvironmentSpec::validate() const {
  if (num_clusters < 1) throw ConfigError(env_id + ": num_clusters must be >= 1");
  if (static_cast<int>(cluster_aod_centers_rad.size()) != num_clusters)
    throw ConfigError(env_id + ": cluster_aod_centers_rad must have num_clusters entries");
  for (double c : cluster_aod_centers_rad)
    if (!(std::abs(c) < kPi / 2.0)) throw ConfigError(env_id + ": cluster center outside (-pi/2, pi/2)");
  if (!(cluster_aod_spread_rad >= 0.0)) throw ConfigError(env_id + ": negative AoD spread");
  if (!(rms_delay_spread_s > 0.0)) throw ConfigError(env_id + ": rms_delay_spread_s must be positive");
  if (!(los_probability >= 0.0 && los_probability <= 1.0))
    throw ConfigError(env_id + ": los_probability outside [0, 1]");
  if (paths_per_cluster_min < 1 || paths_per_cluster_max < paths_per_cluster_min)
    throw ConfigError(env_id + ": invalid paths_per_cluster range");
  if (!(los_k_factor_db_min >= 0.0) || los_k_factor_db_max < los_k_factor_db_min)
    throw ConfigError(env_id + ": invalid LOS K-factor range");
  if (!(zod_spread_rad >= 0.0)) throw ConfigError(env_id + ": negative elevation spread");
}

CVector steering_vector(double aod_rad, int n_tx) {
  return ula_response(std::sin(aod_rad), n_tx);
}

CVector steering_vector(const PathParams& path, const SystemConfig& cfg) {
  if (cfg.geometry == ArrayGeometry::ula) return steering_vector(path.aod_rad, cfg.n_tx);
  const CVector h = ula_response(std::sin(path.aod_rad) * std::cos(path.zod_rad), cfg.upa_horizontal);
  const CVector v = ula_response(std::sin(path.zod_rad), cfg.upa_vertical);
  CVector a(cfg.n_tx);
  for (int i = 0; i < cfg.upa_horizontal; ++i)
    a.segment(i * cfg.upa_vertical, cfg.upa_vertical) = h(i) * v;
  return a;
}

ChannelMatrix synthesize_channel(const MultipathSet& set, const SystemConfig& cfg) {
  cfg.validate();
  if (set.paths.empty()) throw ConfigError("synthesize_channel: empty path list");
  const double window = cfg.delay_window_s();
  const double spacing = cfg.subcarrier_spacing_hz();
  const double scale = std::sqrt(static_cast<double>(cfg.n_tx) / static_cast<double>(set.paths.size()));

  ChannelMatrix h;
  h.entries = CMatrix::Zero(cfg.n_tx, cfg.n_sc);
  CVector ramp(cfg.n_sc);
  for (const auto& path : set.paths) {
    if (!(path.delay_s >= 0.0 && path.delay_s < window))
      throw ConfigError("synthesize_channel: delay outside [0, 1/spacing)");
    const CVector a = steering_vector(path, cfg);
    for (int k = 0; k < cfg.n_sc; ++k)
      ramp(k) = path.gain * std::exp(-kJ * (2.0 * kPi * k * spacing * path.delay_s));
    h.entries.noalias() += scale * a * ramp.transpose();
  }
  h.ground_truth_paths = set;
  return h;
}

MultipathSet sample_multipath(const EnvironmentSpec& env, Rng& rng, const SystemConfig& cfg) {
  env.validate();
  const double window = cfg.delay_window_s();
  const double max_delay = std::nextafter(window, 0.0);
  auto draw_delay = [&] { return std::min(rng.exponential(env.rms_delay_spread_s), max_delay); };
  auto draw_aod = [&](int cluster) {
    const double s = env.cluster_aod_spread_rad;
    const double aod = env.cluster_aod_centers_rad[static_cast<std::size_t>(cluster)] + rng.uniform(-s, s);
    return std::clamp(aod, -kAodLimit, kAodLimit);
  };
  auto draw_zod = [&] {
    const double s = env.zod_spread_rad;
    return std::clamp(env.zod_center_rad + rng.uniform(-s, s), -kAodLimit, kAodLimit);
  };

  // Always consume the LOS draw so the stream layout does not depend on it.
  const bool los = rng.uniform() < env.los_probability;

  struct Draft {
    PathParams p;
    double power;
  };
  std::vector<Draft> scattered;
  std::optional<PathParams> los_path;
  for (int c = 0; c < env.num_clusters; ++c) {
    int count = rng.uniform_int(env.paths_per_cluster_min, env.paths_per_cluster_max);
    const double cluster_gain_db = -env.power_decay_per_cluster_db * c;
    if (c == 0 && los) {
      PathParams p;
      p.aod_rad = draw_aod(0);
      p.zod_rad = draw_zod();
      p.delay_s = draw_delay();
      p.gain = std::exp(kJ * rng.uniform(-kPi, kPi));
      los_path = p;
      --count;
    }
    for (int i = 0; i < count; ++i) {
      Draft d;
      d.p.aod_rad = draw_aod(c);
      d.p.zod_rad = draw_zod();
      d.p.delay_s = draw_delay();
      d.power = std::pow(10.0, cluster_gain_db / 10.0) *
                std::exp(-d.p.delay_s / env.rms_delay_spread_s);
      d.p.gain = std::sqrt(d.power) * rng.complex_normal();
      scattered.push_back(d);
    }
  }
  std::stable_sort(scattered.begin(), scattered.end(),
                   [](const Draft& a, const Draft& b) { return a.p.delay_s < b.p.delay_s; });

  MultipathSet set;
  if (los_path) {
    double others = 0.0;
    for (const auto& d : scattered) others += std::norm(d.p.gain);
    const double k_db = rng.uniform(env.los_k_factor_db_min, env.los_k_factor_db_max);
    PathParams p = *los_path;
    if (!scattered.empty()) p.delay_s = std::min(p.delay_s, scattered.front().p.delay_s);
    const double power = others > 0.0 ? std::pow(10.0, k_db / 10.0) * others : 1.0;
    p.gain *= std::sqrt(power);
    set.paths.push_back(p);
  }
  for (const auto& d : scattered) set.paths.push_back(d.p);

  // The Gaussian gains are almost surely nonzero; guard the measure-zero case.
  double total = set.total_power();
  if (!(total > 0.0)) {
    set.paths.front().gain = 1.0;
    total = set.total_power();
  }
  const double norm = 1.0 / std::sqrt(total);
  for (auto& p : set.paths) p.gain *= norm;
  return set;
}

Dataset generate_dataset(const EnvironmentSpec& env, std::size_t n_samples, const SystemConfig& cfg,
                         std::uint64_t seed) {
  if (n_samples < 1) throw ConfigError("generate_dataset: n_samples must be >= 1");
  cfg.validate();
  env.validate();
  Dataset ds;
  ds.env_id = env.env_id;
  ds.system = cfg;
  ds.environment = env;
  ds.seed = seed;
  ds.samples.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    ds.samples[i] = synthesize_channel(sample_multipath(env, rng, cfg), cfg);
  }
  return ds;
}

std::vector<EnvironmentSpec> random_environments(std::size_t count, std::uint64_t seed,
                                                 const std::string& id_prefix) {
  std::vector<EnvironmentSpec> envs;
  envs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, {0x656e76ULL, static_cast<std::uint64_t>(i)}));
    EnvironmentSpec e;
    e.env_id = id_prefix + "-" + std::to_string(i);
    e.num_clusters = rng.uniform_int(1, 4);
    e.cluster_aod_centers_rad.clear();
    for (int c = 0; c < e.num_clusters; ++c) e.cluster_aod_centers_rad.push_back(rng.uniform(-1.1, 1.1));
    e.cluster_aod_spread_rad = rng.uniform(0.02, 0.12);
    e.rms_delay_spread_s = rng.uniform(0.15e-6, 0.8e-6);
    e.los_probability = rng.uniform();
    e.paths_per_cluster_min = 1;
    e.paths_per_cluster_max = rng.uniform_int(2, 6);
    e.power_decay_per_cluster_db = rng.uniform(1.0, 6.0);
    e.rng_seed = derive_seed(seed, {0x73656564ULL, static_cast<std::uint64_t>(i)});
    envs.push_back(std::move(e));
  }
  return envs;
}

}  // namespace egcsi
