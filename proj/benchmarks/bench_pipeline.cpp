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
#include <benchmark/benchmark.h>

#include <vector>

#include "egcsi/bits.hpp"
#include "egcsi/channel_synth.hpp"
#include "egcsi/codec.hpp"
#include "egcsi/feedback_pipeline.hpp"
#include "egcsi/svd.hpp"

namespace {

using namespace egcsi;

const std::vector<ChannelMatrix>& channels() {
  static const std::vector<ChannelMatrix> hs = [] {
    EnvironmentSpec env;
    env.env_id = "bench";
    return generate_dataset(env, 64, SystemConfig{}, 5).samples;
  }();
  return hs;
}

const FeedbackContext& context() {
  static const FeedbackContext ctx{PipelineConfig{}};
  return ctx;
}

const SpecCodec& pca_codec() {
  static const SpecCodec codec = [] {
    std::vector<RVector> rows;
    for (const auto& h : channels())
      for (const auto& a : aligned_components(h, context())) rows.push_back(to_features(a.entries));
    RMatrix x(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    const SystemConfig sys;
    return SpecCodec(train_codec(CodecKind::linear_pca, x, 16, 6, sys.n_tx, sys.n_sc));
  }();
  return codec;
}

void BM_Svd32(benchmark::State& state) {
  const CMatrix m = channels()[0].entries;
  for (auto _ : state) benchmark::DoNotOptimize(svd_complex(m));
}
BENCHMARK(BM_Svd32);

void BM_AlignedComponents(benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(aligned_components(channels()[i++ % channels().size()], context()));
}
BENCHMARK(BM_AlignedComponents);

void BM_EncodePca(benchmark::State& state) {
  const auto& codec = pca_codec();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(eg_encode(channels()[i++ % channels().size()], context(), codec));
}
BENCHMARK(BM_EncodePca);

void BM_DecodePca(benchmark::State& state) {
  const auto& codec = pca_codec();
  const FeedbackMessage msg = eg_encode(channels()[0], context(), codec);
  for (auto _ : state) benchmark::DoNotOptimize(eg_decode(msg, context(), codec));
}
BENCHMARK(BM_DecodePca);

void BM_WireRoundTrip(benchmark::State& state) {
  const auto& codec = pca_codec();
  const FeedbackMessage msg = eg_encode(channels()[0], context(), codec);
  const MessageLayout layout = message_layout(context(), codec);
  for (auto _ : state) {
    const auto bytes = serialize(msg, layout);
    benchmark::DoNotOptimize(deserialize(bytes, layout, context().codebooks()));
  }
}
BENCHMARK(BM_WireRoundTrip);

void BM_BitStringAppend(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  for (auto _ : state) {
    BitString b;
    for (int k = 0; k < 1024; ++k) b.append(static_cast<std::uint64_t>(k), width);
    benchmark::DoNotOptimize(b.to_bytes());
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_BitStringAppend)->Arg(1)->Arg(6)->Arg(14)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
