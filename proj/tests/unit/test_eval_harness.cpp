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
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "egcsi/errors.hpp"
#include "egcsi/eval_harness.hpp"
#include "support.hpp"

namespace egcsi {
namespace {

namespace fs = std::filesystem;

// Small arrays keep PCA training fast.
ExperimentConfig small_experiment(std::size_t n_train = 1, std::size_t n_test = 3) {
  ExperimentConfig cfg;
  cfg.pipeline.system.n_tx = 16;
  cfg.pipeline.system.n_sc = 16;
  const auto envs = random_environments(n_train + n_test, 21);
  cfg.train_envs.assign(envs.begin(), envs.begin() + static_cast<std::ptrdiff_t>(n_train));
  cfg.test_envs.assign(envs.begin() + static_cast<std::ptrdiff_t>(n_train), envs.end());
  cfg.train_samples_per_env = 200;
  cfg.test_samples_per_env = 60;
  cfg.codec_grid = {{CodecKind::linear_pca, 8, 6}};
  cfg.seeds = {1};
  return cfg;
}

const ResultRow& find_row(const std::vector<ResultRow>& rows, const std::string& scheme, std::uint64_t seed) {
  for (const auto& r : rows)
    if (r.scheme == scheme && r.seed == seed) return r;
  throw std::runtime_error("row not found: " + scheme);
}

TEST(RunExperiment, SmokeTableShape) {
  ExperimentConfig cfg = small_experiment();
  cfg.seeds = {1, 2};
  const auto rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 6u);
  for (std::uint64_t seed : {1u, 2u}) {
    const ResultRow& eg = find_row(rows, "eg", seed);
    const ResultRow& van = find_row(rows, "vanilla", seed);
    const ResultRow& bound = find_row(rows, "passthrough-bound", seed);
    EXPECT_EQ(eg.env_ids.size(), 3u);
    EXPECT_EQ(eg.nmse_db_per_env.size(), 3u);
    EXPECT_EQ(eg.n_train_envs, 1u);
    EXPECT_GE(eg.train_mean_r_hat, 1.0);
    EXPECT_GT(eg.mean_bits, 0.0);
    EXPECT_TRUE(std::isfinite(eg.nmse_db_mean));
    EXPECT_EQ(van.kind, CodecKind::linear_pca);
    EXPECT_EQ(van.element_bits, 6);
    EXPECT_EQ(van.mean_bits, van.codeword_len * 6.0);
    if (van.note.empty()) EXPECT_LE(std::abs(van.mean_bits - van.target_bits), 6.0);
    EXPECT_EQ(bound.kind, CodecKind::passthrough);
  }
}

TEST(RunExperiment, PassthroughBoundHoldsPerEnvironment) {
  ExperimentConfig cfg = small_experiment();
  cfg.include_vanilla = false;
  for (const auto& r : run_experiment(cfg)) {
    if (r.scheme != "passthrough-bound") continue;
    for (double v : r.nmse_db_per_env) EXPECT_LE(v, 10.0 * std::log10(1.0 - cfg.pipeline.decoupling.eta) + 1e-9);
  }
}

TEST(RunExperiment, IntraEnvironmentEgNotWorseThanVanilla) {
  ExperimentConfig cfg = small_experiment(1, 0);
  EnvironmentSpec same = cfg.train_envs[0];
  same.env_id = "same-distribution";
  cfg.test_envs = {same};
  cfg.seeds = {1, 2, 3};
  cfg.include_passthrough_bound = false;
  const auto rows = run_experiment(cfg);
  for (std::uint64_t seed : {1u, 2u, 3u})
    EXPECT_LE(find_row(rows, "eg", seed).nmse_db_mean, find_row(rows, "vanilla", seed).nmse_db_mean) << "seed " << seed;
}

TEST(RunExperiment, DeterministicAndSeedSensitive) {
  ExperimentConfig cfg = small_experiment();
  const std::string a = results_csv(run_experiment(cfg));
  EXPECT_EQ(results_csv(run_experiment(cfg)), a);
  cfg.seeds = {5};
  EXPECT_NE(results_csv(run_experiment(cfg)), a);
}

TEST(RunExperiment, ValidationRejectsBadConfigs) {
  ExperimentConfig cfg = small_experiment();
  cfg.test_envs[0].env_id = cfg.train_envs[0].env_id;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg = small_experiment();
  cfg.test_envs.clear();
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg = small_experiment();
  cfg.seeds.clear();
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg = small_experiment();
  cfg.codec_grid = {{CodecKind::linear_pca, 0, 6}};
  EXPECT_THROW(run_experiment(cfg), ConfigError);
}

TEST(Sweep, SinglePointEqualsRunExperiment) {
  const ExperimentConfig cfg = small_experiment();
  EXPECT_EQ(results_csv(sweep_bits(cfg, {8})), results_csv(run_experiment(cfg)));
  EXPECT_EQ(results_csv(sweep_train_envs(cfg, {1})), results_csv(run_experiment(cfg)));
}

TEST(Sweep, EnvAxisAcceptsConfiguredSweepGrid) {
  ExperimentConfig cfg = small_experiment(2, 1);
  cfg.include_vanilla = false;
  cfg.include_passthrough_bound = false;
  cfg.sweep_train_env_counts = {1, 2};
  cfg.sweep_codeword_lens = {4, 8};
  const auto rows = sweep_train_envs(cfg, cfg.sweep_train_env_counts);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].n_train_envs, 1u);
  EXPECT_EQ(rows[1].n_train_envs, 2u);
}

TEST(Sweep, EgErrorNonIncreasingInBits) {
  ExperimentConfig cfg = small_experiment();
  cfg.seeds = {1, 2};
  cfg.include_vanilla = false;
  cfg.include_passthrough_bound = false;
  const auto summary = summarize(sweep_bits(cfg, {2, 8, 32}));
  std::vector<double> eg;
  for (const auto& s : summary)
    if (s.scheme == "eg") eg.push_back(s.nmse_db_mean);
  ASSERT_EQ(eg.size(), 3u);
  EXPECT_LE(eg[1], eg[0]);
  EXPECT_LE(eg[2], eg[1]);
}

TEST(Summarize, MeanAndSampleStd) {
  std::vector<ResultRow> rows(3);
  const double v[] = {-10.0, -12.0, -14.0};
  for (int i = 0; i < 3; ++i) {
    rows[i].scheme = "eg";
    rows[i].point_codeword_len = 8;
    rows[i].element_bits = 6;
    rows[i].n_train_envs = 1;
    rows[i].seed = static_cast<std::uint64_t>(i);
    rows[i].mean_bits = 100.0 + i;
    rows[i].nmse_db_mean = v[i];
  }
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].n_seeds, 3u);
  EXPECT_DOUBLE_EQ(s[0].nmse_db_mean, -12.0);
  EXPECT_DOUBLE_EQ(s[0].nmse_db_std, 2.0);
  EXPECT_DOUBLE_EQ(s[0].mean_bits, 101.0);
}

TEST(MatchedCodewordLen, RoundsToNearestTiesDown) {
  EXPECT_EQ(matched_codeword_len(48.0, 6, 100), 8);
  EXPECT_EQ(matched_codeword_len(50.9, 6, 100), 8);
  EXPECT_EQ(matched_codeword_len(51.0, 6, 100), 8);
  EXPECT_EQ(matched_codeword_len(51.1, 6, 100), 9);
  EXPECT_EQ(matched_codeword_len(1.0, 6, 100), 1);
  EXPECT_EQ(matched_codeword_len(1e9, 6, 100), 100);
  EXPECT_THROW(matched_codeword_len(10.0, 0, 10), ConfigError);
}

TEST(WriteResults, FilesAndMissingDirectory) {
  const auto rows = run_experiment(small_experiment());
  EXPECT_THROW(write_results("/nonexistent_dir_egcsi", "x", rows), IoError);
  const fs::path dir = fs::temp_directory_path() / "egcsi_write_results_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_results(dir, "exp", rows);
  for (const char* f : {"exp.csv", "exp_per_env.csv", "exp_summary.csv", "exp.json"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 4);
  fs::remove_all(dir);
  const std::string csv = results_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "scheme,kind,codeword_len,element_bits,point_codeword_len,seed,n_train_envs,mean_bits,target_bits,"
            "nmse_db_mean,train_mean_r_hat,cap_hits,note");
}

}  // namespace
}  // namespace egcsi
