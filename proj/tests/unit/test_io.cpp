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

#include <filesystem>
#include <cstring>

#include "egcsi/config_io.hpp"
#include "egcsi/dataset_io.hpp"
#include "egcsi/errors.hpp"
#include "support.hpp"

namespace egcsi {
namespace {

namespace fs = std::filesystem;

class TempDir {
public:
  TempDir() : path_(fs::temp_directory_path() / ("egcsi_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

private:
  fs::path path_;
};

ExperimentConfig sample_experiment() {
  ExperimentConfig cfg;
  const auto envs = random_environments(4, 3);
  cfg.train_envs = {envs[0], envs[1]};
  cfg.test_envs = {envs[2], envs[3]};
  cfg.codec_grid = {{CodecKind::linear_pca, 4, 6}, {CodecKind::topk, 6, 5}};
  cfg.seeds = {7, 8};
  cfg.pipeline.decoupling.eta = 0.95;
  cfg.pipeline.codebook.phase_bits = 3;
  cfg.sweep_codeword_lens = {2, 4};
  cfg.sweep_train_env_counts = {1, 2};
  return cfg;
}

TEST(ConfigIo, ExperimentRoundTrip) {
  const ExperimentConfig cfg = sample_experiment();
  const std::string text = experiment_config_to_json(cfg);
  const ExperimentConfig back = experiment_config_from_json(text);
  EXPECT_EQ(back.train_envs, cfg.train_envs);
  EXPECT_EQ(back.test_envs, cfg.test_envs);
  EXPECT_EQ(back.codec_grid, cfg.codec_grid);
  EXPECT_EQ(back.seeds, cfg.seeds);
  EXPECT_EQ(back.pipeline.codebook, cfg.pipeline.codebook);
  EXPECT_EQ(back.pipeline.decoupling.eta, 0.95);
  EXPECT_EQ(back.sweep_codeword_lens, cfg.sweep_codeword_lens);
  EXPECT_EQ(experiment_config_to_json(back), text);
}

TEST(ConfigIo, RejectsUnknownKeysVersionAndSyntax) {
  std::string text = experiment_config_to_json(sample_experiment());
  EXPECT_THROW(experiment_config_from_json(text.substr(0, text.size() / 2)), ConfigError);
  std::string extra = text;
  extra.insert(1, "\"bogus\": 1,");
  EXPECT_THROW(experiment_config_from_json(extra), ConfigError);
  std::string version = text;
  version.replace(version.find("\"version\": 1"), 12, "\"version\": 2");
  EXPECT_THROW(experiment_config_from_json(version), ConfigError);
  EXPECT_THROW(load_experiment_config("/nonexistent/egcsi.json"), Error);
}

TEST(ConfigIo, ValidationErrorsSurface) {
  ExperimentConfig cfg = sample_experiment();
  cfg.test_envs[0].env_id = cfg.train_envs[0].env_id;
  EXPECT_THROW(experiment_config_from_json(experiment_config_to_json(cfg)).validate(), ConfigError);
  cfg = sample_experiment();
  cfg.pipeline.decoupling.eta = 1.5;
  EXPECT_THROW(experiment_config_from_json(experiment_config_to_json(cfg)), ConfigError);
}

TEST(ConfigIo, EnvironmentsBothForms) {
  const auto envs = random_environments(3, 11);
  EXPECT_EQ(environments_from_json(environments_to_json(envs)), envs);
  std::string bare = "[" + environment_to_json(envs[0]) + "," + environment_to_json(envs[1]) + "]";
  const auto back = environments_from_json(bare);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1], envs[1]);
  EXPECT_EQ(environment_from_json(environment_to_json(envs[2])), envs[2]);
}

TEST(ConfigIo, PipelineRoundTrip) {
  PipelineConfig p;
  p.system.geometry = ArrayGeometry::upa;
  p.codebook = {4, 2, 5};
  p.decoupling = {0.9, 12};
  const PipelineConfig back = pipeline_config_from_json(pipeline_config_to_json(p));
  EXPECT_EQ(back.system, p.system);
  EXPECT_EQ(back.codebook, p.codebook);
  EXPECT_EQ(back.decoupling.max_components, 12);
}

TEST(DatasetIo, RoundTripIsExact) {
  EnvironmentSpec env;
  env.env_id = "x";
  const Dataset ds = generate_dataset(env, 5, SystemConfig{}, 42);
  const auto bytes = serialize_dataset(ds);
  const Dataset back = deserialize_dataset(bytes);
  EXPECT_EQ(back.env_id, "x");
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.source, "synthetic");
  ASSERT_TRUE(back.environment.has_value());
  EXPECT_EQ(*back.environment, env);
  ASSERT_EQ(back.samples.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.samples[i].entries, ds.samples[i].entries);
    EXPECT_FALSE(back.samples[i].ground_truth_paths.has_value());
  }
  EXPECT_EQ(serialize_dataset(back), bytes);
}

TEST(DatasetIo, EntryOrderIsRowMajorInterleaved) {
  Dataset ds;
  ds.env_id = "tiny";
  ds.source = "external";
  ds.system.n_tx = 2;
  ds.system.n_sc = 2;
  ChannelMatrix h;
  h.entries.resize(2, 2);
  h.entries << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(7, 8);
  ds.samples.push_back(h);
  const auto bytes = serialize_dataset(ds);
  ASSERT_GE(bytes.size(), 64u);
  for (int i = 0; i < 8; ++i) {
    double v = 0.0;
    std::memcpy(&v, bytes.data() + bytes.size() - 64 + 8 * i, 8);
    EXPECT_EQ(v, i + 1.0);
  }
}

TEST(DatasetIo, MalformedRejected) {
  EnvironmentSpec env;
  auto bytes = serialize_dataset(generate_dataset(env, 2, SystemConfig{}, 1));
  auto bad = bytes;
  bad[3] = 'Z';
  EXPECT_THROW(deserialize_dataset(bad), FormatError);
  bad = bytes;
  bad.pop_back();
  EXPECT_THROW(deserialize_dataset(bad), FormatError);
  bad = bytes;
  bad.push_back(0);
  EXPECT_THROW(deserialize_dataset(bad), FormatError);
  EXPECT_THROW(deserialize_dataset(std::vector<std::uint8_t>{1, 2, 3}), Error);
}

TEST(DatasetIo, SaveToMissingDirectoryFails) {
  EnvironmentSpec env;
  const Dataset ds = generate_dataset(env, 1, SystemConfig{}, 1);
  EXPECT_THROW(save_dataset("/nonexistent_dir_egcsi/a.egds", ds), IoError);
  TempDir dir;
  save_dataset(dir.path() / "a.egds", ds);
  EXPECT_EQ(load_dataset(dir.path() / "a.egds").samples[0].entries, ds.samples[0].entries);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1u);
}

TEST(FeedbackFileIo, RoundTripAndTrailingBytes) {
  FeedbackFile f;
  f.env_id = "env-3";
  f.codec = "linear_pca";
  f.payload_bits = 48;
  f.seed = 9;
  f.messages = {{1, 2, 3}, {}, {255}};
  const auto bytes = serialize_feedback_file(f);
  const FeedbackFile back = deserialize_feedback_file(bytes);
  EXPECT_EQ(back.env_id, f.env_id);
  EXPECT_EQ(back.codec, f.codec);
  EXPECT_EQ(back.payload_bits, 48u);
  EXPECT_EQ(back.messages, f.messages);
  auto bad = bytes;
  bad.push_back(0);
  EXPECT_THROW(deserialize_feedback_file(bad), FormatError);
  bad = bytes;
  bad.pop_back();
  EXPECT_THROW(deserialize_feedback_file(bad), Error);
  TempDir dir;
  save_feedback_file(dir.path() / "f.egfb", f);
  EXPECT_EQ(load_feedback_file(dir.path() / "f.egfb").messages, f.messages);
}

}  // namespace
}  // namespace egcsi
