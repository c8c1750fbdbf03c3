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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "egcsi/rng.hpp"
#include "egcsi/types.hpp"

namespace egcsi {

/// One propagation path of the wideband geometric model.
///
/// The gain absorbs the carrier phase exp(-j 2 pi f_1 tau), so only the
/// subcarrier offsets k * spacing enter the synthesized phase ramp.
struct PathParams {
  cplx gain{1.0, 0.0};
  double aod_rad = 0.0;
  double delay_s = 0.0;
  /// Elevation, used only by the UPA geometry.
  double zod_rad = 0.0;

  bool operator==(const PathParams&) const = default;
};

struct MultipathSet {
  std::vector<PathParams> paths;

  double total_power() const;
};

/// Parameterized distribution over multipath sets, standing in for one
/// propagation environment.
struct EnvironmentSpec {
  std::string env_id = "env";
  int num_clusters = 1;
  std::vector<double> cluster_aod_centers_rad{0.0};
  double cluster_aod_spread_rad = 0.1;
  double rms_delay_spread_s = 0.3e-6;
  double los_probability = 0.5;
  int paths_per_cluster_min = 1;
  int paths_per_cluster_max = 4;
  double power_decay_per_cluster_db = 3.0;
  /// Rician K-factor of the LOS path relative to all other paths, drawn
  /// uniformly in dB. Must be >= 0 dB so the LOS path dominates.
  double los_k_factor_db_min = 3.0;
  double los_k_factor_db_max = 10.0;
  double zod_center_rad = 0.0;
  double zod_spread_rad = 0.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
  bool operator==(const EnvironmentSpec&) const = default;
};

/// Spatial-frequency CSI, n_tx rows by n_sc columns.
struct ChannelMatrix {
  CMatrix entries;
  std::optional<MultipathSet> ground_truth_paths;
};

/// Half-wavelength ULA response, unit norm.
CVector steering_vector(double aod_rad, int n_tx);

/// Array response for the configured geometry. In UPA mode this is the
/// Kronecker product of the horizontal and vertical ULA responses.
CVector steering_vector(const PathParams& path, const SystemConfig& cfg);

/// Superposition of the paths per the wideband geometric model. Column k
/// carries the phase ramp exp(-j 2 pi k spacing tau).
ChannelMatrix synthesize_channel(const MultipathSet& paths, const SystemConfig& cfg);

/// Draws one multipath set from the environment distribution.
///
/// Total path power is normalized to one. When a LOS path is drawn it is
/// placed first, takes the earliest delay, and carries K times the power
/// of all remaining paths combined.
MultipathSet sample_multipath(const EnvironmentSpec& env, Rng& rng, const SystemConfig& cfg);

struct Dataset {
  std::string env_id;
  /// "synthetic" for generated data, "external" for imported channels.
  std::string source = "synthetic";
  SystemConfig system;
  std::optional<EnvironmentSpec> environment;
  std::uint64_t seed = 0;
  std::vector<ChannelMatrix> samples;
};

/// Sample i is drawn from Rng(derive_seed(seed, i)), so any subset of
/// samples can be regenerated independently and in any order.
Dataset generate_dataset(const EnvironmentSpec& env, std::size_t n_samples,
                         const SystemConfig& cfg, std::uint64_t seed);
inline Dataset generate_dataset(const EnvironmentSpec& env, std::size_t n_samples,
                                const SystemConfig& cfg) {
  return generate_dataset(env, n_samples, cfg, env.rng_seed);
}

/// Random environment family used by `gen-envs`: cluster count, centers,
/// spreads and LOS probability are themselves drawn from `seed`.
std::vector<EnvironmentSpec> random_environments(std::size_t count, std::uint64_t seed,
                                                 const std::string& id_prefix = "env");

}  // namespace egcsi
