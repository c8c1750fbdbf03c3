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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "egcsi/channel_synth.hpp"
#include "egcsi/codec.hpp"
#include "egcsi/feedback_pipeline.hpp"

namespace egcsi {

struct CodecPoint {
  CodecKind kind = CodecKind::linear_pca;
  int codeword_len = 8;
  int element_bits = 6;

  bool operator==(const CodecPoint&) const = default;
};

/// One generalization experiment. Training and test environments must have
/// disjoint env_ids; a test environment may share a training environment's
/// distribution parameters under a new id (intra-environment check).
struct ExperimentConfig {
  PipelineConfig pipeline;
  std::vector<EnvironmentSpec> train_envs;
  std::vector<EnvironmentSpec> test_envs;
  std::size_t train_samples_per_env = 1000;
  std::size_t test_samples_per_env = 500;
  std::vector<CodecPoint> codec_grid{CodecPoint{}};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  /// Add a vanilla linear_pca row, trained on raw angular-delay CSI at the
  /// EG row's measured bit budget, for every linear_pca grid point.
  bool include_vanilla = true;
  /// Add the lossless passthrough row (decoupling error only).
  bool include_passthrough_bound = true;
  /// Codeword lengths for `sweep` along the bit axis (linear_pca, EG side).
  std::vector<int> sweep_codeword_lens;
  /// Training-environment counts for `sweep` along the environment axis;
  /// each count uses a prefix of train_envs.
  std::vector<std::size_t> sweep_train_env_counts;
  std::string output_dir = "results";

  void validate() const;
};

struct ResultRow {
  /// "eg", "vanilla", "topk-eg" or "passthrough-bound".
  std::string scheme;
  CodecKind kind = CodecKind::linear_pca;
  int codeword_len = 0;
  int element_bits = 0;
  /// EG codeword length of the grid point this row belongs to.
  int point_codeword_len = 0;
  std::uint64_t seed = 0;
  std::size_t n_train_envs = 0;
  double mean_bits = 0.0;
  /// Bit budget the row was matched to (vanilla rows); mean_bits otherwise.
  double target_bits = 0.0;
  double nmse_db_mean = 0.0;
  std::vector<std::string> env_ids;
  std::vector<double> nmse_db_per_env;
  /// Mean R-hat over the training channels.
  double train_mean_r_hat = 0.0;
  /// Test samples whose decoupling hit the component cap.
  std::size_t cap_hits = 0;
  std::string note;
};

/// Seed aggregate: mean and sample standard deviation across seeds.
struct SummaryRow {
  std::string scheme;
  CodecKind kind = CodecKind::linear_pca;
  int point_codeword_len = 0;
  int element_bits = 0;
  std::size_t n_train_envs = 0;
  std::size_t n_seeds = 0;
  double mean_bits = 0.0;
  double nmse_db_mean = 0.0;
  double nmse_db_std = 0.0;
};

/// Optional progress sink; receives one human-readable line per event.
using ProgressFn = std::function<void(const std::string&)>;

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// One run_experiment per codeword length, linear_pca at the first grid
/// point's element_bits.
std::vector<ResultRow> sweep_bits(const ExperimentConfig& cfg, const std::vector<int>& codeword_lens,
                                  const ProgressFn& progress = {});
/// One run_experiment per training-environment count (prefixes of train_envs).
std::vector<ResultRow> sweep_train_envs(const ExperimentConfig& cfg, const std::vector<std::size_t>& env_counts,
                                        const ProgressFn& progress = {});

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string per_env_csv(const std::vector<ResultRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string results_json(const std::vector<ResultRow>& rows, const std::vector<SummaryRow>& summary);

/// Writes <prefix>.csv, <prefix>_per_env.csv, <prefix>_summary.csv and
/// <prefix>.json into `dir`, which must exist.
void write_results(const std::filesystem::path& dir, const std::string& prefix, const std::vector<ResultRow>& rows);

/// Vanilla baseline: linear codec on the raw angular-delay features.
ChannelMatrix vanilla_roundtrip(const ChannelMatrix& h, const Transforms& t, const CodecSpec& codec);

/// Codeword length whose M * Q_f is closest to `target_bits` (ties to the
/// smaller M), clamped to [1, max_len].
int matched_codeword_len(double target_bits, int element_bits, int max_len);

}  // namespace egcsi
