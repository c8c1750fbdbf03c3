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
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "egcsi/config_io.hpp"
#include "egcsi/dataset_io.hpp"
#include "support.hpp"

namespace egcsi {
namespace {

namespace fs = std::filesystem;

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("egcsi_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ExperimentConfig cfg;
    cfg.pipeline.system.n_tx = 16;
    cfg.pipeline.system.n_sc = 16;
    const auto envs = random_environments(4, 9);
    cfg.train_envs = {envs[0]};
    cfg.test_envs = {envs[1], envs[2], envs[3]};
    cfg.train_samples_per_env = 100;
    cfg.test_samples_per_env = 40;
    cfg.codec_grid = {{CodecKind::linear_pca, 6, 6}};
    cfg.seeds = {1, 2};
    std::ofstream(dir_ / "config.json") << experiment_config_to_json(cfg);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, GenDataMissingDirectoryFailsWithoutFiles) {
  ASSERT_EQ(run({"gen-envs", "--count", "3", "--seed", "4", "--out", p("envs.json")}), cli::kExitOk) << err_.str();
  const auto before = std::distance(fs::directory_iterator(dir_), fs::directory_iterator{});
  const int rc = run({"gen-data", "--envs", p("envs.json"), "--samples", "5", "--out-dir", p("missing")});
  EXPECT_NE(rc, cli::kExitOk);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_FALSE(fs::exists(dir_ / "missing"));
  EXPECT_EQ(std::distance(fs::directory_iterator(dir_), fs::directory_iterator{}), before);
}

TEST_F(CliTest, GenDataWritesOneFilePerEnvironment) {
  ASSERT_EQ(run({"gen-envs", "--count", "3", "--seed", "4", "--out", p("envs.json")}), cli::kExitOk) << err_.str();
  fs::create_directories(dir_ / "data");
  ASSERT_EQ(run({"gen-data", "--config", p("config.json"), "--envs", p("envs.json"), "--samples", "5", "--out-dir",
                 p("data")}),
            cli::kExitOk)
      << err_.str();
  for (const char* id : {"env-0", "env-1", "env-2"}) {
    const Dataset ds = load_dataset(dir_ / "data" / (std::string(id) + ".egds"));
    EXPECT_EQ(ds.samples.size(), 5u);
    EXPECT_EQ(ds.system.n_tx, 16);
  }
}

TEST_F(CliTest, EncodeDecodeThroughFilesMatchesInMemory) {
  fs::create_directories(dir_ / "data");
  ASSERT_EQ(run({"gen-data", "--config", p("config.json"), "--samples", "30", "--out-dir", p("data")}), cli::kExitOk)
      << err_.str();
  const ExperimentConfig cfg = load_experiment_config(dir_ / "config.json");
  const std::string train = p("data/" + cfg.train_envs[0].env_id + ".egds");
  const std::string test = p("data/" + cfg.test_envs[0].env_id + ".egds");
  ASSERT_EQ(run({"train-codec", "--config", p("config.json"), "--data", train, "--kind", "linear_pca",
                 "--codeword-len", "6", "--element-bits", "6", "--out", p("codec.bin")}),
            cli::kExitOk)
      << err_.str();
  ASSERT_EQ(run({"encode", "--config", p("config.json"), "--data", test, "--codec", p("codec.bin"), "--out",
                 p("fb.bin")}),
            cli::kExitOk)
      << err_.str();
  ASSERT_EQ(run({"decode", "--in", p("fb.bin"), "--codec", p("codec.bin"), "--out", p("rec.egds")}), cli::kExitOk)
      << err_.str();
  ASSERT_EQ(run({"eval", "--config", p("config.json"), "--data", test, "--codec", p("codec.bin"), "--out",
                 p("eval.jsonl")}),
            cli::kExitOk)
      << err_.str();

  const Dataset truth = load_dataset(test);
  const Dataset rec = load_dataset(dir_ / "rec.egds");
  EXPECT_EQ(rec.source, "external");
  const FeedbackContext ctx(cfg.pipeline);
  const SpecCodec codec(load_codec(dir_ / "codec.bin"));
  ASSERT_EQ(rec.samples.size(), truth.samples.size());
  std::istringstream lines(read_all(dir_ / "eval.jsonl"));
  std::string line;
  for (std::size_t i = 0; i < truth.samples.size(); ++i) {
    const ReconstructionReport mem = reconstruct_and_report(truth.samples[i], ctx, codec);
    EXPECT_EQ(rec.samples[i].entries, mem.h_hat.entries);
    EXPECT_EQ(nmse_db(truth.samples[i], rec.samples[i]), mem.nmse_db);
    ASSERT_TRUE(std::getline(lines, line));
    EXPECT_NE(line.find("\"r_hat\":" + std::to_string(mem.r_hat)), std::string::npos) << line;
  }
}

TEST_F(CliTest, ExperimentIsByteIdenticalAcrossRuns) {
  fs::create_directories(dir_ / "a");
  fs::create_directories(dir_ / "b");
  ASSERT_EQ(run({"experiment", "--config", p("config.json"), "--seed", "3", "--out-dir", p("a")}), cli::kExitOk)
      << err_.str();
  ASSERT_EQ(run({"experiment", "--config", p("config.json"), "--seed", "3", "--out-dir", p("b")}), cli::kExitOk)
      << err_.str();
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    ++files;
    EXPECT_EQ(read_all(e.path()), read_all(dir_ / "b" / e.path().filename())) << e.path();
  }
  EXPECT_EQ(files, 4u);
}

TEST_F(CliTest, SweepWritesCurveFiles) {
  fs::create_directories(dir_ / "s");
  ASSERT_EQ(run({"sweep", "--config", p("config.json"), "--seed", "1", "--axis", "bits", "--grid", "2,6", "--out-dir",
                 p("s")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "s" / "sweep_bits.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "s" / "sweep_bits.json"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"experiment", "--bogus-flag"}), cli::kExitUsage);
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"no-such-command"}), cli::kExitUsage);
  std::ofstream(dir_ / "bad.json") << "{\"version\": 1, \"nope\": 2}";
  EXPECT_EQ(run({"experiment", "--config", p("bad.json")}), cli::kExitUsage);
  EXPECT_EQ(run({"experiment", "--config", p("config.json"), "--eta", "2"}), cli::kExitUsage);
}

}  // namespace
}  // namespace egcsi
