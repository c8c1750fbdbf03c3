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
#include "egcsi/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "binary_io.hpp"
#include "egcsi/errors.hpp"
#include "json_convert.hpp"

namespace egcsi {
namespace {

constexpr std::uint64_t kTrainTag = 0;
constexpr std::uint64_t kTestTag = 1;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string scheme_for(CodecKind k) {
  switch (k) {
    case CodecKind::linear_pca: return "eg";
    case CodecKind::topk: return "topk-eg";
    case CodecKind::passthrough: return "passthrough-bound";
  }
  return "eg";
}

/// Row-major feature rows accumulated one at a time.
class FeatureRows {
public:
  explicit FeatureRows(int dim) : dim_(dim) {}
  void add(const RVector& f) { data_.insert(data_.end(), f.data(), f.data() + f.size()); }
  Eigen::Index rows() const { return static_cast<Eigen::Index>(data_.size() / static_cast<std::size_t>(dim_)); }
  RMatrix take() {
    RMatrix m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        data_.data(), rows(), dim_);
    std::vector<double>().swap(data_);
    return m;
  }

private:
  int dim_;
  std::vector<double> data_;
};

CodecSpec truncate_pca(const CodecSpec& full, int m, int element_bits) {
  CodecSpec s = full;
  s.codeword_len = m;
  s.element_bits = element_bits;
  s.basis = full.basis.leftCols(m);
  s.lo = full.lo.head(m);
  s.hi = full.hi.head(m);
  s.validate();
  return s;
}

struct PointPlan {
  CodecPoint point;
  SpecCodec codec;
  double train_bits = 0.0;
  int vanilla_len = 0;
  std::string vanilla_note;
};

struct Accum {
  std::vector<std::vector<double>> ratios;  // per test env
  double bits = 0.0;
  std::size_t count = 0;
};

ResultRow finish_row(const Accum& acc, const std::vector<EnvironmentSpec>& test_envs) {
  ResultRow row;
  std::vector<double> all;
  for (std::size_t e = 0; e < test_envs.size(); ++e) {
    row.env_ids.push_back(test_envs[e].env_id);
    row.nmse_db_per_env.push_back(batch_nmse_db(acc.ratios[e]));
    all.insert(all.end(), acc.ratios[e].begin(), acc.ratios[e].end());
  }
  row.nmse_db_mean = batch_nmse_db(all);
  row.mean_bits = acc.bits / static_cast<double>(acc.count);
  return row;
}

std::vector<ResultRow> run_seed(const ExperimentConfig& cfg, const FeedbackContext& ctx, std::uint64_t seed,
                                const ProgressFn& progress) {
  const SystemConfig& sys = cfg.pipeline.system;
  const int dim = 2 * sys.n_tx * sys.n_sc;
  auto say = [&](const std::string& s) {
    if (progress) progress("seed " + std::to_string(seed) + ": " + s);
  };

  const bool need_vanilla =
      cfg.include_vanilla && std::any_of(cfg.codec_grid.begin(), cfg.codec_grid.end(),
                                         [](const CodecPoint& p) { return p.kind == CodecKind::linear_pca; });

  // Training features.
  FeatureRows eg_rows(dim);
  FeatureRows raw_rows(dim);
  double r_hat_sum = 0.0;
  std::size_t n_train = 0;
  std::size_t train_caps = 0;
  for (const auto& env : cfg.train_envs) {
    const Dataset ds =
        generate_dataset(env, cfg.train_samples_per_env, sys, derive_seed(env.rng_seed, {seed, kTrainTag}));
    for (const auto& h : ds.samples) {
      DecouplingResult dec;
      for (const auto& a : aligned_components(h, ctx, &dec)) eg_rows.add(to_features(a.entries));
      if (dec.cap_hit) ++train_caps;
      r_hat_sum += static_cast<double>(dec.r_hat());
      ++n_train;
      if (need_vanilla) raw_rows.add(to_features(to_angular_delay(h, ctx.transforms()).entries));
    }
  }
  const double train_r_hat = r_hat_sum / static_cast<double>(n_train);
  say("trained on " + std::to_string(n_train) + " channels, mean R-hat " + fmt(train_r_hat) + ", " +
      std::to_string(eg_rows.rows()) + " aligned components");
  if (train_caps > 0) say("component cap hit on " + std::to_string(train_caps) + " training channels");

  const auto q_m = static_cast<double>(ctx.codebooks().metadata_bits());
  RMatrix eg_features = eg_rows.take();

  // EG codecs. linear_pca directions are nested, so one fit at the largest
  // codeword length serves every grid point.
  int max_pca = 0;
  for (const auto& p : cfg.codec_grid)
    if (p.kind == CodecKind::linear_pca) max_pca = std::max(max_pca, p.codeword_len);
  CodecSpec pca_full;
  if (max_pca > 0) pca_full = train_codec(CodecKind::linear_pca, eg_features, max_pca, 1, sys.n_tx, sys.n_sc);

  std::vector<PointPlan> plans;
  for (const auto& p : cfg.codec_grid) {
    CodecSpec spec;
    if (p.kind == CodecKind::linear_pca)
      spec = truncate_pca(pca_full, p.codeword_len, p.element_bits);
    else if (p.kind == CodecKind::topk)
      spec = train_codec(CodecKind::topk, eg_features, p.codeword_len, p.element_bits, sys.n_tx, sys.n_sc);
    else
      spec = passthrough_spec(sys.n_tx, sys.n_sc);
    PointPlan plan{p, SpecCodec(spec), 0.0, 0, {}};
    plan.train_bits = train_r_hat * (q_m + static_cast<double>(spec.payload_bits()));
    if (need_vanilla && p.kind == CodecKind::linear_pca) {
      plan.vanilla_len = matched_codeword_len(plan.train_bits, p.element_bits, dim);
      const double gap = std::abs(plan.vanilla_len * p.element_bits - plan.train_bits);
      if (gap > p.element_bits) plan.vanilla_note = "infeasible bit match: gap " + fmt(gap) + " bits";
    }
    plans.push_back(std::move(plan));
  }
  eg_features.resize(0, 0);

  int max_vanilla = 0;
  for (const auto& pl : plans) max_vanilla = std::max(max_vanilla, pl.vanilla_len);
  CodecSpec vanilla_full;
  if (max_vanilla > 0) {
    RMatrix raw = raw_rows.take();
    vanilla_full = train_codec(CodecKind::linear_pca, raw, max_vanilla, 1, sys.n_tx, sys.n_sc);
  }
  std::vector<CodecSpec> vanilla_specs(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i)
    if (plans[i].vanilla_len > 0)
      vanilla_specs[i] = truncate_pca(vanilla_full, plans[i].vanilla_len, plans[i].point.element_bits);

  const SpecCodec bound_codec(passthrough_spec(sys.n_tx, sys.n_sc));
  const MessageLayout bound_layout = message_layout(ctx, bound_codec);
  std::vector<MessageLayout> layouts;
  for (const auto& pl : plans) layouts.push_back(message_layout(ctx, pl.codec));

  // Test evaluation.
  const std::size_t n_env = cfg.test_envs.size();
  auto fresh = [&] {
    Accum a;
    a.ratios.resize(n_env);
    return a;
  };
  std::vector<Accum> eg_acc(plans.size(), fresh());
  std::vector<Accum> van_acc(plans.size(), fresh());
  Accum bound_acc = fresh();
  std::size_t test_caps = 0;

  auto run_eg = [&](const ChannelMatrix& h, const std::vector<AlignedComponent>& comps, const Codec& codec,
                    const MessageLayout& layout, Accum& acc, std::size_t e, bool wire) {
    FeedbackMessage msg;
    msg.metadata_bits = layout.metadata_bits();
    for (const auto& a : comps) msg.records.push_back({a.metadata, codec.encode(a.entries)});
    const FeedbackMessage rx = wire ? deserialize(serialize(msg, layout), layout, ctx.codebooks()) : msg;
    acc.ratios[e].push_back(nmse_ratio(h, eg_decode(rx, ctx, codec)));
    acc.bits += static_cast<double>(rx.total_bits());
    ++acc.count;
  };

  for (std::size_t e = 0; e < n_env; ++e) {
    const auto& env = cfg.test_envs[e];
    const Dataset ds =
        generate_dataset(env, cfg.test_samples_per_env, sys, derive_seed(env.rng_seed, {seed, kTestTag}));
    std::size_t env_caps = 0;
    for (const auto& h : ds.samples) {
      DecouplingResult dec;
      const auto comps = aligned_components(h, ctx, &dec);
      if (dec.cap_hit) ++env_caps;
      for (std::size_t i = 0; i < plans.size(); ++i) {
        run_eg(h, comps, plans[i].codec, layouts[i], eg_acc[i], e, true);
        if (plans[i].vanilla_len > 0) {
          van_acc[i].ratios[e].push_back(nmse_ratio(h, vanilla_roundtrip(h, ctx.transforms(), vanilla_specs[i])));
          van_acc[i].bits += static_cast<double>(vanilla_specs[i].payload_bits());
          ++van_acc[i].count;
        }
      }
      // The lossless bound skips the byte round trip; its payload is raw float64.
      if (cfg.include_passthrough_bound) run_eg(h, comps, bound_codec, bound_layout, bound_acc, e, false);
    }
    if (env_caps > 0) say("component cap hit on " + std::to_string(env_caps) + " test channels of " + env.env_id);
    test_caps += env_caps;
  }

  std::vector<ResultRow> rows;
  auto stamp = [&](ResultRow r, const std::string& scheme, const CodecSpec& s, int point) {
    r.scheme = scheme;
    r.kind = s.kind;
    r.codeword_len = s.kind == CodecKind::passthrough ? s.feature_dim() : s.codeword_len;
    r.element_bits = s.kind == CodecKind::passthrough ? 64 : s.element_bits;
    r.point_codeword_len = point;
    r.seed = seed;
    r.n_train_envs = cfg.train_envs.size();
    r.train_mean_r_hat = train_r_hat;
    r.target_bits = r.mean_bits;
    return r;
  };
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& pl = plans[i];
    ResultRow eg = stamp(finish_row(eg_acc[i], cfg.test_envs), scheme_for(pl.point.kind), pl.codec.spec(),
                         pl.point.codeword_len);
    eg.cap_hits = test_caps;
    rows.push_back(eg);
    if (pl.vanilla_len > 0) {
      ResultRow v =
          stamp(finish_row(van_acc[i], cfg.test_envs), "vanilla", vanilla_specs[i], pl.point.codeword_len);
      v.target_bits = pl.train_bits;
      v.note = pl.vanilla_note;
      say("point M=" + std::to_string(pl.point.codeword_len) + ": EG " + fmt(eg.nmse_db_mean) + " dB at " +
          fmt(eg.mean_bits) + " bits, vanilla " + fmt(v.nmse_db_mean) + " dB at " + fmt(v.mean_bits) +
          " bits (budget " + fmt(pl.train_bits) + ")" + (v.note.empty() ? "" : ", " + v.note));
      rows.push_back(v);
    }
  }
  if (cfg.include_passthrough_bound) {
    ResultRow b = stamp(finish_row(bound_acc, cfg.test_envs), "passthrough-bound", bound_codec.spec(), 0);
    b.cap_hits = test_caps;
    rows.push_back(b);
  }
  return rows;
}

void csv_escape(std::ostringstream& os, const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

}  // namespace

void ExperimentConfig::validate() const {
  pipeline.system.validate();
  pipeline.codebook.validate();
  pipeline.decoupling.validate();
  if (train_envs.empty()) throw ConfigError("experiment needs at least one training environment");
  if (test_envs.empty()) throw ConfigError("experiment needs at least one test environment");
  if (train_samples_per_env == 0 || test_samples_per_env == 0)
    throw ConfigError("samples per environment must be positive");
  if (codec_grid.empty()) throw ConfigError("codec_grid is empty");
  if (seeds.empty()) throw ConfigError("seeds is empty");
  std::set<std::string> train_ids;
  for (const auto& e : train_envs) {
    e.validate();
    if (!train_ids.insert(e.env_id).second) throw ConfigError("duplicate training env_id " + e.env_id);
  }
  std::set<std::string> test_ids;
  for (const auto& e : test_envs) {
    e.validate();
    if (train_ids.count(e.env_id)) throw ConfigError("env_id " + e.env_id + " is in both training and test sets");
    if (!test_ids.insert(e.env_id).second) throw ConfigError("duplicate test env_id " + e.env_id);
  }
  const int dim = 2 * pipeline.system.n_tx * pipeline.system.n_sc;
  for (const auto& p : codec_grid) {
    CodecSpec s;
    s.kind = p.kind;
    s.codeword_len = p.codeword_len;
    s.element_bits = p.element_bits;
    s.n_tx = pipeline.system.n_tx;
    s.n_sc = pipeline.system.n_sc;
    s.validate();
    if (p.kind == CodecKind::linear_pca && p.codeword_len > dim)
      throw ConfigError("codeword_len exceeds the feature dimension");
  }
  for (int m : sweep_codeword_lens)
    if (m < 1 || m > dim) throw ConfigError("sweep codeword length out of range");
  for (std::size_t k : sweep_train_env_counts)
    if (k < 1 || k > train_envs.size()) throw ConfigError("sweep training-environment count out of range");
}

ChannelMatrix vanilla_roundtrip(const ChannelMatrix& h, const Transforms& t, const CodecSpec& codec) {
  const CMatrix ht = t.forward(h.entries);
  const Codeword cw = encode(codec, ht);
  ChannelMatrix out;
  out.entries = t.inverse(decode(codec, cw.bits));
  return out;
}

int matched_codeword_len(double target_bits, int element_bits, int max_len) {
  if (element_bits < 1 || max_len < 1) throw ConfigError("matched_codeword_len: invalid arguments");
  const double ratio = target_bits / element_bits;
  int m = static_cast<int>(std::floor(ratio));
  if (ratio - m > 0.5) ++m;
  return std::clamp(m, 1, max_len);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const FeedbackContext ctx(cfg.pipeline);
  std::vector<ResultRow> rows;
  for (std::uint64_t seed : cfg.seeds) {
    auto r = run_seed(cfg, ctx, seed, progress);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::vector<ResultRow> sweep_bits(const ExperimentConfig& cfg, const std::vector<int>& codeword_lens,
                                  const ProgressFn& progress) {
  if (codeword_lens.empty()) throw ConfigError("sweep_bits: empty grid");
  std::vector<int> lens = codeword_lens;
  std::sort(lens.begin(), lens.end());
  lens.erase(std::unique(lens.begin(), lens.end()), lens.end());
  ExperimentConfig c = cfg;
  const int qf = cfg.codec_grid.empty() ? CodecPoint{}.element_bits : cfg.codec_grid.front().element_bits;
  c.codec_grid.clear();
  for (int m : lens) c.codec_grid.push_back({CodecKind::linear_pca, m, qf});
  return run_experiment(c, progress);
}

std::vector<ResultRow> sweep_train_envs(const ExperimentConfig& cfg, const std::vector<std::size_t>& env_counts,
                                        const ProgressFn& progress) {
  if (env_counts.empty()) throw ConfigError("sweep_train_envs: empty grid");
  std::vector<std::size_t> counts = env_counts;
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
  std::vector<ResultRow> rows;
  for (std::size_t k : counts) {
    if (k < 1 || k > cfg.train_envs.size()) throw ConfigError("sweep_train_envs: count out of range");
    ExperimentConfig c = cfg;
    c.train_envs.resize(k);
    c.sweep_train_env_counts.clear();
    auto r = run_experiment(c, [&](const std::string& s) {
      if (progress) progress(std::to_string(k) + " training envs, " + s);
    });
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::size_t, int, std::string, int>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  std::vector<Key> order;
  for (const auto& r : rows) {
    Key k{r.n_train_envs, r.point_codeword_len, r.scheme, r.element_bits};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& k : order) {
    const auto& g = groups[k];
    SummaryRow s;
    s.scheme = g.front()->scheme;
    s.kind = g.front()->kind;
    s.point_codeword_len = g.front()->point_codeword_len;
    s.element_bits = g.front()->element_bits;
    s.n_train_envs = g.front()->n_train_envs;
    s.n_seeds = g.size();
    double bits = 0.0;
    double nmse = 0.0;
    for (const auto* r : g) {
      bits += r->mean_bits;
      nmse += r->nmse_db_mean;
    }
    const double n = static_cast<double>(g.size());
    s.mean_bits = bits / n;
    s.nmse_db_mean = nmse / n;
    if (g.size() > 1) {
      double ss = 0.0;
      for (const auto* r : g) ss += (r->nmse_db_mean - s.nmse_db_mean) * (r->nmse_db_mean - s.nmse_db_mean);
      s.nmse_db_std = std::sqrt(ss / (n - 1.0));
    }
    out.push_back(s);
  }
  return out;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "scheme,kind,codeword_len,element_bits,point_codeword_len,seed,n_train_envs,mean_bits,target_bits,"
        "nmse_db_mean,train_mean_r_hat,cap_hits,note\n";
  for (const auto& r : rows) {
    os << r.scheme << ',' << to_string(r.kind) << ',' << r.codeword_len << ',' << r.element_bits << ','
       << r.point_codeword_len << ',' << r.seed << ',' << r.n_train_envs << ',' << fmt(r.mean_bits) << ','
       << fmt(r.target_bits) << ',' << fmt(r.nmse_db_mean) << ',' << fmt(r.train_mean_r_hat) << ',' << r.cap_hits
       << ',';
    csv_escape(os, r.note);
    os << '\n';
  }
  return os.str();
}

std::string per_env_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "scheme,kind,codeword_len,point_codeword_len,seed,n_train_envs,env_id,nmse_db\n";
  for (const auto& r : rows)
    for (std::size_t e = 0; e < r.env_ids.size(); ++e) {
      os << r.scheme << ',' << to_string(r.kind) << ',' << r.codeword_len << ',' << r.point_codeword_len << ','
         << r.seed << ',' << r.n_train_envs << ',';
      csv_escape(os, r.env_ids[e]);
      os << ',' << fmt(r.nmse_db_per_env[e]) << '\n';
    }
  return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "scheme,kind,point_codeword_len,element_bits,n_train_envs,n_seeds,mean_bits,nmse_db_mean,nmse_db_std\n";
  for (const auto& s : rows)
    os << s.scheme << ',' << to_string(s.kind) << ',' << s.point_codeword_len << ',' << s.element_bits << ','
       << s.n_train_envs << ',' << s.n_seeds << ',' << fmt(s.mean_bits) << ',' << fmt(s.nmse_db_mean) << ','
       << fmt(s.nmse_db_std) << '\n';
  return os.str();
}

std::string results_json(const std::vector<ResultRow>& rows, const std::vector<SummaryRow>& summary) {
  using detail::json;
  json j{{"format", "egcsi-results"}, {"version", 1}, {"rows", json::array()}, {"summary", json::array()}};
  for (const auto& r : rows) {
    json per_env = json::array();
    for (std::size_t e = 0; e < r.env_ids.size(); ++e)
      per_env.push_back({{"env_id", r.env_ids[e]}, {"nmse_db", r.nmse_db_per_env[e]}});
    j["rows"].push_back({{"scheme", r.scheme},
                         {"kind", to_string(r.kind)},
                         {"codeword_len", r.codeword_len},
                         {"element_bits", r.element_bits},
                         {"point_codeword_len", r.point_codeword_len},
                         {"seed", r.seed},
                         {"n_train_envs", r.n_train_envs},
                         {"mean_bits", r.mean_bits},
                         {"target_bits", r.target_bits},
                         {"nmse_db_mean", r.nmse_db_mean},
                         {"nmse_db_per_env", per_env},
                         {"train_mean_r_hat", r.train_mean_r_hat},
                         {"cap_hits", r.cap_hits},
                         {"note", r.note}});
  }
  for (const auto& s : summary)
    j["summary"].push_back({{"scheme", s.scheme},
                            {"kind", to_string(s.kind)},
                            {"point_codeword_len", s.point_codeword_len},
                            {"element_bits", s.element_bits},
                            {"n_train_envs", s.n_train_envs},
                            {"n_seeds", s.n_seeds},
                            {"mean_bits", s.mean_bits},
                            {"nmse_db_mean", s.nmse_db_mean},
                            {"nmse_db_std", s.nmse_db_std}});
  return j.dump(2) + "\n";
}

void write_results(const std::filesystem::path& dir, const std::string& prefix, const std::vector<ResultRow>& rows) {
  if (!std::filesystem::is_directory(dir)) throw IoError("output directory does not exist: " + dir.string());
  const auto summary = summarize(rows);
  auto put = [&](const std::string& name, const std::string& text) {
    detail::write_file_atomic(dir / name, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  };
  put(prefix + ".csv", results_csv(rows));
  put(prefix + "_per_env.csv", per_env_csv(rows));
  put(prefix + "_summary.csv", summary_csv(summary));
  put(prefix + ".json", results_json(rows, summary));
}

}  // namespace egcsi
