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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "egcsi/channel_synth.hpp"
#include "egcsi/errors.hpp"
#include "support.hpp"

namespace egcsi {
namespace {

using testing::random_multipath;

TEST(SteeringVector, BroadsideIsUniform) {
  const CVector a = steering_vector(0.0, 4);
  for (int t = 0; t < 4; ++t) EXPECT_NEAR(std::abs(a(t) - cplx(0.5, 0.0)), 0.0, 1e-15);
}

TEST(SteeringVector, EndfireLimitAlternates) {
  const double phi = std::asin(1.0 - 1e-12);
  const CVector a = steering_vector(phi, 4);
  const double expected[] = {0.5, -0.5, 0.5, -0.5};
  for (int t = 0; t < 4; ++t) EXPECT_NEAR(std::abs(a(t) - cplx(expected[t], 0.0)), 0.0, 1e-9);
}

TEST(SteeringVector, MatchesScalarLoop) {
  const double phi = 0.3;
  const int n = 32;
  const CVector a = steering_vector(phi, n);
  for (int t = 0; t < n; ++t) {
    const double arg = kPi * t * std::sin(phi);
    const cplx ref(std::cos(arg) / std::sqrt(32.0), std::sin(arg) / std::sqrt(32.0));
    EXPECT_LE(std::abs(a(t) - ref), 1e-12) << "t=" << t;
  }
  EXPECT_NEAR(a.norm(), 1.0, 1e-14);
}

TEST(SteeringVector, DistinctSinesAreNotCollinear) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double p1 = rng.uniform(-1.5, 1.5);
    const double p2 = rng.uniform(-1.5, 1.5);
    if (std::abs(std::sin(p1) - std::sin(p2)) < 1e-6) continue;
    EXPECT_LT(std::abs(steering_vector(p1, 32).dot(steering_vector(p2, 32))), 1.0);
  }
}

TEST(SteeringVector, UpaIsKroneckerOfUlas) {
  SystemConfig cfg;
  cfg.geometry = ArrayGeometry::upa;
  PathParams p;
  p.aod_rad = 0.4;
  p.zod_rad = -0.2;
  const CVector a = steering_vector(p, cfg);
  ASSERT_EQ(a.size(), 32);
  EXPECT_NEAR(a.norm(), 1.0, 1e-14);
  const double sh = std::sin(p.aod_rad) * std::cos(p.zod_rad);
  const double sv = std::sin(p.zod_rad);
  for (int h = 0; h < 8; ++h)
    for (int v = 0; v < 4; ++v) {
      const cplx ref = std::exp(kJ * (kPi * h * sh)) * std::exp(kJ * (kPi * v * sv)) / std::sqrt(32.0);
      EXPECT_LE(std::abs(a(h * 4 + v) - ref), 1e-12);
    }
}

TEST(SynthesizeChannel, SinglePathAtOriginIsAllOnes) {
  SystemConfig cfg;
  MultipathSet s{{PathParams{}}};
  const ChannelMatrix h = synthesize_channel(s, cfg);
  EXPECT_LE((h.entries - CMatrix::Ones(32, 32)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SynthesizeChannel, OpposedEqualPathsCancel) {
  SystemConfig cfg;
  PathParams a;
  a.aod_rad = 0.2;
  a.delay_s = 1e-7;
  PathParams b = a;
  b.gain = -a.gain;
  const ChannelMatrix h = synthesize_channel(MultipathSet{{a, b}}, cfg);
  EXPECT_LE(h.entries.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SynthesizeChannel, ColumnFormulaByScalarLoop) {
  SystemConfig cfg;
  Rng rng(5);
  const MultipathSet s = random_multipath(rng, cfg, 3);
  const ChannelMatrix h = synthesize_channel(s, cfg);
  const double df = cfg.bandwidth_hz / cfg.n_sc;
  for (int k = 0; k < cfg.n_sc; ++k)
    for (int t = 0; t < cfg.n_tx; ++t) {
      cplx ref = 0.0;
      for (const auto& p : s.paths) {
        const double ph = kPi * t * std::sin(p.aod_rad) - 2.0 * kPi * k * df * p.delay_s;
        ref += p.gain * cplx(std::cos(ph), std::sin(ph));
      }
      ref *= std::sqrt(32.0 / 3.0) / std::sqrt(32.0);
      EXPECT_LE(std::abs(h.entries(t, k) - ref), 1e-12);
    }
}

TEST(SynthesizeChannel, Linearity) {
  SystemConfig cfg;
  Rng rng(17);
  const MultipathSet s = random_multipath(rng, cfg, 3);
  CMatrix sum = CMatrix::Zero(32, 32);
  // Each single-path synthesis carries sqrt(N_T/1); rescale to the 3-path normalization.
  for (const auto& p : s.paths) sum += synthesize_channel(MultipathSet{{p}}, cfg).entries / std::sqrt(3.0);
  const ChannelMatrix h = synthesize_channel(s, cfg);
  EXPECT_LE(testing::rel_err(h.entries, sum), 1e-12);
}

TEST(SynthesizeChannel, GainScalingScalesNorm) {
  SystemConfig cfg;
  Rng rng(3);
  MultipathSet s = random_multipath(rng, cfg, 4);
  const double n0 = synthesize_channel(s, cfg).entries.norm();
  const cplx c(1.5, -2.0);
  for (auto& p : s.paths) p.gain *= c;
  EXPECT_NEAR(synthesize_channel(s, cfg).entries.norm(), std::abs(c) * n0, 1e-12 * n0);
}

TEST(SynthesizeChannel, Rejects) {
  SystemConfig cfg;
  EXPECT_THROW(synthesize_channel(MultipathSet{}, cfg), ConfigError);
  PathParams p;
  p.delay_s = cfg.delay_window_s();
  EXPECT_THROW(synthesize_channel(MultipathSet{{p}}, cfg), ConfigError);
}

TEST(SystemConfig, SpacingTimesCountIsBandwidth) {
  SystemConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.subcarrier_spacing_hz() * cfg.n_sc, cfg.bandwidth_hz);
  cfg.n_tx = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  SystemConfig upa;
  upa.geometry = ArrayGeometry::upa;
  upa.upa_horizontal = 5;
  EXPECT_THROW(upa.validate(), ConfigError);
}

TEST(SampleMultipath, DegenerateEnvironmentGivesSinglePathAtCenter) {
  SystemConfig cfg;
  EnvironmentSpec env;
  env.num_clusters = 1;
  env.cluster_aod_centers_rad = {0.25};
  env.cluster_aod_spread_rad = 0.0;
  env.los_probability = 1.0;
  env.paths_per_cluster_min = env.paths_per_cluster_max = 1;
  Rng rng(1);
  const MultipathSet s = sample_multipath(env, rng, cfg);
  ASSERT_EQ(s.paths.size(), 1u);
  EXPECT_DOUBLE_EQ(s.paths[0].aod_rad, 0.25);
  EXPECT_NEAR(s.total_power(), 1.0, 1e-12);
}

TEST(SampleMultipath, DeterministicForSameSeed) {
  SystemConfig cfg;
  EnvironmentSpec env;
  env.num_clusters = 2;
  env.cluster_aod_centers_rad = {-0.3, 0.6};
  Rng a(99), b(99);
  for (int i = 0; i < 20; ++i) {
    const auto s1 = sample_multipath(env, a, cfg);
    const auto s2 = sample_multipath(env, b, cfg);
    EXPECT_EQ(s1.paths, s2.paths);
  }
}

TEST(SampleMultipath, InvariantsHold) {
  SystemConfig cfg;
  EnvironmentSpec env;
  env.num_clusters = 3;
  env.cluster_aod_centers_rad = {-0.8, 0.1, 1.2};
  env.cluster_aod_spread_rad = 0.4;
  env.rms_delay_spread_s = 5e-6;  // forces clipping
  env.los_probability = 0.5;
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto s = sample_multipath(env, rng, cfg);
    ASSERT_GE(s.paths.size(), 1u);
    EXPECT_NEAR(s.total_power(), 1.0, 1e-12);
    for (const auto& p : s.paths) {
      EXPECT_GE(p.delay_s, 0.0);
      EXPECT_LT(p.delay_s, cfg.delay_window_s());
      EXPECT_LT(std::abs(p.aod_rad), kPi / 2);
    }
  }
}

TEST(SampleMultipath, LosPathDominatesAndComesFirst) {
  SystemConfig cfg;
  EnvironmentSpec env;
  env.num_clusters = 2;
  env.cluster_aod_centers_rad = {0.0, 0.5};
  env.los_probability = 1.0;
  env.paths_per_cluster_min = 2;
  env.paths_per_cluster_max = 4;
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto s = sample_multipath(env, rng, cfg);
    const double los = std::norm(s.paths[0].gain);
    EXPECT_GE(los, s.total_power() - los);
    for (const auto& p : s.paths) EXPECT_LE(s.paths[0].delay_s, p.delay_s);
  }
}

TEST(SampleMultipath, BimodalAodHistogram) {
  SystemConfig cfg;
  EnvironmentSpec env;
  env.num_clusters = 2;
  env.cluster_aod_centers_rad = {-0.5, 0.5};
  env.cluster_aod_spread_rad = 0.1;
  env.power_decay_per_cluster_db = 0.0;
  Rng rng(2024);
  // 0.02-rad bins over [-1, 1].
  std::vector<int> hist(100, 0);
  for (int i = 0; i < 10000; ++i)
    for (const auto& p : sample_multipath(env, rng, cfg).paths) {
      const int b = static_cast<int>(std::floor((p.aod_rad + 1.0) / 0.02));
      if (b >= 0 && b < 100) ++hist[static_cast<std::size_t>(b)];
    }
  auto mode_in = [&](double lo, double hi) {
    int best = -1;
    double best_center = 0.0;
    for (int b = 0; b < 100; ++b) {
      const double c = -1.0 + 0.02 * (b + 0.5);
      if (c < lo || c > hi) continue;
      if (hist[static_cast<std::size_t>(b)] > best) {
        best = hist[static_cast<std::size_t>(b)];
        best_center = c;
      }
    }
    return best_center;
  };
  // Uniform spread: smooth the histogram mode by taking the mass centroid of each half.
  auto centroid = [&](double lo, double hi) {
    double num = 0.0, den = 0.0;
    for (int b = 0; b < 100; ++b) {
      const double c = -1.0 + 0.02 * (b + 0.5);
      if (c < lo || c > hi) continue;
      num += c * hist[static_cast<std::size_t>(b)];
      den += hist[static_cast<std::size_t>(b)];
    }
    return num / den;
  };
  EXPECT_NEAR(centroid(-1.0, 0.0), -0.5, 0.05);
  EXPECT_NEAR(centroid(0.0, 1.0), 0.5, 0.05);
  EXPECT_NEAR(mode_in(-1.0, 0.0), -0.5, 0.1 + 0.01);
  EXPECT_NEAR(mode_in(0.0, 1.0), 0.5, 0.1 + 0.01);
  // Valley between the modes.
  EXPECT_LT(hist[50], hist[25] / 10 + 1);
}

TEST(SampleMultipath, DifferentEnvironmentsDifferInDistribution) {
  SystemConfig cfg;
  EnvironmentSpec a;
  a.cluster_aod_centers_rad = {-0.4};
  EnvironmentSpec b = a;
  b.cluster_aod_centers_rad = {0.4};
  Rng ra(1), rb(1);
  double mean_a = 0.0, mean_b = 0.0;
  int na = 0, nb = 0;
  for (int i = 0; i < 2000; ++i) {
    for (const auto& p : sample_multipath(a, ra, cfg).paths) mean_a += p.aod_rad, ++na;
    for (const auto& p : sample_multipath(b, rb, cfg).paths) mean_b += p.aod_rad, ++nb;
  }
  EXPECT_GT(mean_b / nb - mean_a / na, 0.7);
}

TEST(EnvironmentSpec, Validation) {
  EnvironmentSpec e;
  EXPECT_NO_THROW(e.validate());
  e.los_probability = 1.5;
  EXPECT_THROW(e.validate(), ConfigError);
  e = EnvironmentSpec{};
  e.num_clusters = 2;  // only one center
  EXPECT_THROW(e.validate(), ConfigError);
  e = EnvironmentSpec{};
  e.rms_delay_spread_s = 0.0;
  EXPECT_THROW(e.validate(), ConfigError);
  e = EnvironmentSpec{};
  e.paths_per_cluster_min = 3;
  e.paths_per_cluster_max = 2;
  EXPECT_THROW(e.validate(), ConfigError);
}

TEST(GenerateDataset, DeterministicAndNonzero) {
  SystemConfig cfg;
  EnvironmentSpec env;
  env.rng_seed = 42;
  const Dataset a = generate_dataset(env, 100, cfg);
  const Dataset b = generate_dataset(env, 100, cfg);
  ASSERT_EQ(a.samples.size(), 100u);
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_TRUE(a.samples[i].entries == b.samples[i].entries);
    EXPECT_GT(a.samples[i].entries.norm(), 0.0);
  }
  EXPECT_EQ(a.env_id, env.env_id);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_THROW(generate_dataset(env, 0, cfg), ConfigError);
}

TEST(GenerateDataset, SamplesAreIndependentlyAddressable) {
  SystemConfig cfg;
  EnvironmentSpec env;
  const Dataset ds = generate_dataset(env, 10, cfg, 7);
  Rng rng(derive_seed(7, 6));
  const ChannelMatrix h6 = synthesize_channel(sample_multipath(env, rng, cfg), cfg);
  EXPECT_TRUE(h6.entries == ds.samples[6].entries);
}

TEST(GenerateDataset, BulkSanity) {
  SystemConfig cfg;
  EnvironmentSpec env;
  env.num_clusters = 2;
  env.cluster_aod_centers_rad = {-0.2, 0.7};
  const Dataset ds = generate_dataset(env, 9000, cfg, 3);
  ASSERT_EQ(ds.samples.size(), 9000u);
  for (const auto& h : ds.samples) {
    ASSERT_TRUE(h.entries.allFinite());
    ASSERT_GT(h.entries.norm(), 0.0);
  }
}

TEST(RandomEnvironments, ValidDistinctAndReproducible) {
  const auto a = random_environments(11, 5);
  const auto b = random_environments(11, 5);
  ASSERT_EQ(a.size(), 11u);
  EXPECT_EQ(a, b);
  for (const auto& e : a) EXPECT_NO_THROW(e.validate());
  EXPECT_NE(a[0].rng_seed, a[1].rng_seed);
  EXPECT_NE(a[0].env_id, a[1].env_id);
}

TEST(Rng, UniformIntCoversRange) {
  Rng rng(1);
  std::vector<int> seen(5, 0);
  for (int i = 0; i < 1000; ++i) ++seen[static_cast<std::size_t>(rng.uniform_int(2, 6) - 2)];
  for (int c : seen) EXPECT_GT(c, 100);
}

TEST(Rng, ComplexNormalHasUnitPower) {
  Rng rng(2);
  double p = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) p += std::norm(rng.complex_normal());
  EXPECT_NEAR(p / n, 1.0, 0.01);
}

}  // namespace
}  // namespace egcsi
