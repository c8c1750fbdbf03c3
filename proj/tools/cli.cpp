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
#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "egcsi/config_io.hpp"
#include "egcsi/dataset_io.hpp"
#include "egcsi/errors.hpp"
#include "egcsi/eval_harness.hpp"
#include "json.hpp"

namespace egcsi::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::optional<int> max_components;
  std::optional<int> phase_bits;
  std::optional<int> oversample;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--eta", c.eta, "Decoupling energy threshold");
  sub->add_option("--max-components", c.max_components, "Ceiling on decoupled components");
  sub->add_option("--phase-bits", c.phase_bits, "Peak-phase quantization bits");
  sub->add_option("--oversample", c.oversample, "Angular and delay codebook oversampling");
}

ExperimentConfig load_base(const Common& c) {
  ExperimentConfig x = c.config.empty() ? ExperimentConfig{} : load_experiment_config(c.config);
  if (c.eta) x.pipeline.decoupling.eta = *c.eta;
  if (c.max_components) x.pipeline.decoupling.max_components = *c.max_components;
  if (c.phase_bits) x.pipeline.codebook.phase_bits = *c.phase_bits;
  if (c.oversample) x.pipeline.codebook.oversample_angular = x.pipeline.codebook.oversample_delay = *c.oversample;
  if (c.seed) x.seeds = {*c.seed};
  x.pipeline.system.validate();
  x.pipeline.codebook.validate();
  x.pipeline.decoupling.validate();
  return x;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw IoError("output directory does not exist: " + parent.string());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string());
    os << text;
    if (!os.flush()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename to " + path.string());
  }
}

void require_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("output directory does not exist: " + dir);
}

std::string fixed(double v, int prec = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::vector<EnvironmentSpec> all_envs(const ExperimentConfig& x) {
  std::vector<EnvironmentSpec> envs = x.train_envs;
  envs.insert(envs.end(), x.test_envs.begin(), x.test_envs.end());
  return envs;
}

// --- subcommands -----------------------------------------------------------

int cmd_gen_envs(const Common& c, std::size_t count, const std::string& prefix, const std::string& out_path,
                 std::ostream& out) {
  if (count == 0) throw ConfigError("--count must be positive");
  const auto envs = random_environments(count, c.seed.value_or(1), prefix);
  write_text_atomic(out_path, environments_to_json(envs));
  out << "wrote " << envs.size() << " environments to " << out_path << "\n";
  for (const auto& e : envs)
    out << "  " << e.env_id << ": " << e.num_clusters << " clusters, LOS p=" << fixed(e.los_probability)
        << ", rms delay " << fixed(e.rms_delay_spread_s * 1e6) << " us\n";
  return kExitOk;
}

int cmd_gen_data(const Common& c, const std::string& envs_file, const std::vector<std::string>& only,
                 std::size_t samples, const std::string& out_dir, std::ostream& out) {
  require_dir(out_dir);
  if (samples == 0) throw ConfigError("--samples must be positive");
  const ExperimentConfig x = load_base(c);
  std::vector<EnvironmentSpec> envs = envs_file.empty() ? all_envs(x) : load_environments(envs_file);
  if (!only.empty()) {
    std::vector<EnvironmentSpec> keep;
    for (const auto& id : only) {
      auto it = std::find_if(envs.begin(), envs.end(), [&](const EnvironmentSpec& e) { return e.env_id == id; });
      if (it == envs.end()) throw ConfigError("unknown env_id " + id);
      keep.push_back(*it);
    }
    envs = keep;
  }
  if (envs.empty()) throw ConfigError("no environments given (use --envs or --config)");

  std::vector<Dataset> sets;
  for (const auto& e : envs) {
    const std::uint64_t seed = c.seed ? derive_seed(e.rng_seed, *c.seed) : e.rng_seed;
    sets.push_back(generate_dataset(e, samples, x.pipeline.system, seed));
  }
  std::vector<fs::path> written;
  try {
    for (const auto& ds : sets) {
      const fs::path p = fs::path(out_dir) / (ds.env_id + ".egds");
      save_dataset(p, ds);
      written.push_back(p);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
  for (std::size_t i = 0; i < sets.size(); ++i)
    out << "wrote " << sets[i].samples.size() << " channels of " << sets[i].env_id << " to " << written[i].string()
        << "\n";
  return kExitOk;
}

int cmd_train_codec(const Common& c, const std::vector<std::string>& data, const std::string& kind, int m, int qf,
                    const std::string& out_path, std::ostream& out) {
  const ExperimentConfig x = load_base(c);
  const FeedbackContext ctx(x.pipeline);
  const auto& sys = x.pipeline.system;
  const CodecKind k = codec_kind_from_string(kind);
  std::vector<RVector> rows;
  double r_hat = 0.0;
  std::size_t n = 0;
  for (const auto& f : data) {
    const Dataset ds = load_dataset(f);
    if (!(ds.system == sys)) throw ConfigError(f + ": system configuration differs from the pipeline config");
    for (const auto& h : ds.samples) {
      for (const auto& a : aligned_components(h, ctx)) rows.push_back(to_features(a.entries));
      ++n;
    }
  }
  if (rows.empty()) throw ConfigError("no training channels");
  RMatrix feats(static_cast<Eigen::Index>(rows.size()), 2 * sys.n_tx * sys.n_sc);
  for (std::size_t i = 0; i < rows.size(); ++i) feats.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  r_hat = static_cast<double>(rows.size()) / static_cast<double>(n);
  rows.clear();
  const CodecSpec spec = train_codec(k, feats, m, qf, sys.n_tx, sys.n_sc);
  fs::path p(out_path);
  require_dir(p.has_parent_path() ? p.parent_path().string() : ".");
  save_codec(p, spec);
  out << "trained " << to_string(k) << " on " << feats.rows() << " aligned components from " << n
      << " channels (mean R-hat " << fixed(r_hat) << "), " << spec.payload_bits() << " payload bits per component\n";
  return kExitOk;
}

int cmd_encode(const Common& c, const std::string& data, const std::string& codec_path, const std::string& out_path,
               std::ostream& out) {
  const ExperimentConfig x = load_base(c);
  const FeedbackContext ctx(x.pipeline);
  const SpecCodec codec(load_codec(codec_path));
  const MessageLayout layout = message_layout(ctx, codec);
  const Dataset ds = load_dataset(data);
  if (!(ds.system == x.pipeline.system)) throw ConfigError("dataset system configuration differs from the config");
  FeedbackFile f;
  f.env_id = ds.env_id;
  f.pipeline = x.pipeline;
  f.codec = codec.name();
  f.payload_bits = codec.payload_bits();
  f.seed = c.seed.value_or(ds.seed);
  std::vector<FeedbackMessage> msgs;
  for (const auto& h : ds.samples) {
    msgs.push_back(eg_encode(h, ctx, codec));
    f.messages.push_back(serialize(msgs.back(), layout));
  }
  save_feedback_file(out_path, f);
  const OverheadReport rep = overhead_report(msgs);
  out << "encoded " << msgs.size() << " channels of " << ds.env_id << ": mean R-hat " << fixed(rep.mean_r_hat)
      << ", mean " << fixed(rep.mean_bits, 1) << " bits\n";
  return kExitOk;
}

int cmd_decode(const std::string& in_path, const std::string& codec_path, const std::string& out_path,
               std::ostream& out) {
  const FeedbackFile f = load_feedback_file(in_path);
  const FeedbackContext ctx(f.pipeline);
  const SpecCodec codec(load_codec(codec_path));
  if (codec.payload_bits() != f.payload_bits || codec.name() != f.codec)
    throw ConfigError("codec does not match the one used for encoding");
  const MessageLayout layout = message_layout(ctx, codec);
  Dataset ds;
  ds.env_id = f.env_id;
  ds.source = "external";
  ds.system = f.pipeline.system;
  ds.seed = f.seed;
  for (std::size_t i = 0; i < f.messages.size(); ++i) {
    try {
      ds.samples.push_back(eg_decode(deserialize(f.messages[i], layout, ctx.codebooks()), ctx, codec));
    } catch (const MalformedBitstreamError& e) {
      throw MalformedBitstreamError("message " + std::to_string(i) + ": " + e.what());
    }
  }
  save_dataset(out_path, ds);
  out << "decoded " << ds.samples.size() << " channels of " << ds.env_id << " to " << out_path << "\n";
  return kExitOk;
}

int cmd_eval(const Common& c, const std::vector<std::string>& data, const std::string& codec_path,
             const std::string& out_path, std::ostream& out) {
  const ExperimentConfig x = load_base(c);
  const FeedbackContext ctx(x.pipeline);
  const SpecCodec codec(load_codec(codec_path));
  std::string lines;
  for (const auto& file : data) {
    const Dataset ds = load_dataset(file);
    if (!(ds.system == x.pipeline.system)) throw ConfigError(file + ": system configuration differs from the config");
    std::vector<double> ratios;
    double r_hat = 0.0;
    double bits = 0.0;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
      const auto rep = reconstruct_and_report(ds.samples[i], ctx, codec);
      ratios.push_back(nmse_ratio(ds.samples[i], rep.h_hat));
      r_hat += static_cast<double>(rep.r_hat);
      bits += static_cast<double>(rep.bits_used);
      lines += json{{"env_id", ds.env_id}, {"sample", i}, {"nmse_db", rep.nmse_db}, {"r_hat", rep.r_hat},
                    {"bits", rep.bits_used}}
                   .dump() +
               "\n";
    }
    const double n = static_cast<double>(ds.samples.size());
    out << ds.env_id << ": NMSE " << fixed(batch_nmse_db(ratios)) << " dB, mean R-hat " << fixed(r_hat / n)
        << ", mean " << fixed(bits / n, 1) << " bits over " << ds.samples.size() << " channels\n";
  }
  write_text_atomic(out_path, lines);
  return kExitOk;
}

void print_summary(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << std::left << std::setw(18) << "scheme" << std::setw(8) << "envs" << std::setw(8) << "M" << std::setw(10)
      << "seeds" << std::setw(12) << "bits" << "NMSE dB (mean +- std)\n";
  for (const auto& s : summarize(rows))
    out << std::left << std::setw(18) << s.scheme << std::setw(8) << s.n_train_envs << std::setw(8)
        << s.point_codeword_len << std::setw(10) << s.n_seeds << std::setw(12) << fixed(s.mean_bits, 1)
        << fixed(s.nmse_db_mean) << " +- " << fixed(s.nmse_db_std) << "\n";
}

ProgressFn progress_to(std::ostream& err) {
  return [&err](const std::string& s) { err << s << "\n"; };
}

int cmd_experiment(const Common& c, const std::string& out_dir_flag, std::ostream& out, std::ostream& err) {
  ExperimentConfig x = load_base(c);
  if (!out_dir_flag.empty()) x.output_dir = out_dir_flag;
  require_dir(x.output_dir);
  const auto rows = run_experiment(x, progress_to(err));
  write_results(x.output_dir, "experiment", rows);
  print_summary(rows, out);
  out << "results written to " << x.output_dir << "/experiment.{csv,json}\n";
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& axis, const std::vector<std::size_t>& grid,
              const std::string& out_dir_flag, std::ostream& out, std::ostream& err) {
  ExperimentConfig x = load_base(c);
  if (!out_dir_flag.empty()) x.output_dir = out_dir_flag;
  require_dir(x.output_dir);
  std::vector<ResultRow> rows;
  std::string prefix;
  if (axis == "bits") {
    std::vector<int> lens;
    for (auto g : grid) lens.push_back(static_cast<int>(g));
    if (lens.empty()) lens = x.sweep_codeword_lens;
    rows = sweep_bits(x, lens, progress_to(err));
    prefix = "sweep_bits";
  } else {
    std::vector<std::size_t> counts = grid.empty() ? x.sweep_train_env_counts : grid;
    rows = sweep_train_envs(x, counts, progress_to(err));
    prefix = "sweep_envs";
  }
  write_results(x.output_dir, prefix, rows);
  print_summary(rows, out);
  out << "results written to " << x.output_dir << "/" << prefix << ".{csv,json}\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Environment-generalizable CSI feedback simulator", "egcsi"};
  app.require_subcommand(1);

  Common c_envs, c_data, c_train, c_enc, c_dec, c_eval, c_exp, c_sweep;

  auto* gen_envs = app.add_subcommand("gen-envs", "Draw random environment specs");
  add_common(gen_envs, c_envs);
  std::size_t env_count = 11;
  std::string env_prefix = "env";
  std::string envs_out;
  gen_envs->add_option("--count", env_count, "Number of environments");
  gen_envs->add_option("--prefix", env_prefix, "env_id prefix");
  gen_envs->add_option("--out", envs_out, "Output JSON file")->required();

  auto* gen_data = app.add_subcommand("gen-data", "Generate channel datasets, one file per environment");
  add_common(gen_data, c_data);
  std::string data_envs;
  std::vector<std::string> data_only;
  std::size_t data_samples = 1000;
  std::string data_out_dir;
  gen_data->add_option("--envs", data_envs, "Environment JSON (default: environments of --config)")
      ->check(CLI::ExistingFile);
  gen_data->add_option("--env", data_only, "Restrict to these env_ids");
  gen_data->add_option("--samples", data_samples, "Channels per environment");
  gen_data->add_option("--out-dir", data_out_dir, "Existing output directory")->required();

  auto* train = app.add_subcommand("train-codec", "Train a codec on aligned path components");
  add_common(train, c_train);
  std::vector<std::string> train_data;
  std::string train_kind = "linear_pca";
  int train_m = 8;
  int train_qf = 6;
  std::string train_out;
  train->add_option("--data", train_data, "Dataset files")->required()->check(CLI::ExistingFile);
  train->add_option("--kind", train_kind, "passthrough | topk | linear_pca");
  train->add_option("--codeword-len", train_m, "Codeword length M (or K for topk)");
  train->add_option("--element-bits", train_qf, "Bits per codeword element");
  train->add_option("--out", train_out, "Output codec file")->required();

  auto* enc = app.add_subcommand("encode", "Encode a dataset into feedback messages");
  add_common(enc, c_enc);
  std::string enc_data, enc_codec, enc_out;
  enc->add_option("--data", enc_data, "Dataset file")->required()->check(CLI::ExistingFile);
  enc->add_option("--codec", enc_codec, "Codec file")->required()->check(CLI::ExistingFile);
  enc->add_option("--out", enc_out, "Output feedback file")->required();

  auto* dec = app.add_subcommand("decode", "Reconstruct channels from feedback messages");
  add_common(dec, c_dec);
  std::string dec_in, dec_codec, dec_out;
  dec->add_option("--in", dec_in, "Feedback file")->required()->check(CLI::ExistingFile);
  dec->add_option("--codec", dec_codec, "Codec file")->required()->check(CLI::ExistingFile);
  dec->add_option("--out", dec_out, "Output dataset file")->required();

  auto* eval = app.add_subcommand("eval", "Per-channel NMSE, R-hat and bits through the wire format");
  add_common(eval, c_eval);
  std::vector<std::string> eval_data;
  std::string eval_codec, eval_out;
  eval->add_option("--data", eval_data, "Dataset files")->required()->check(CLI::ExistingFile);
  eval->add_option("--codec", eval_codec, "Codec file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Output JSON-lines file")->required();

  auto* exp = app.add_subcommand("experiment", "Run the EG vs vanilla generalization experiment");
  add_common(exp, c_exp);
  std::string exp_out_dir;
  exp->add_option("--out-dir", exp_out_dir, "Existing output directory (overrides output_dir)");

  auto* sweep = app.add_subcommand("sweep", "Sweep feedback bits or training-environment count");
  add_common(sweep, c_sweep);
  std::string sweep_axis;
  std::vector<std::size_t> sweep_grid;
  std::string sweep_out_dir;
  sweep->add_option("--axis", sweep_axis, "bits | envs")->required()->check(CLI::IsMember({"bits", "envs"}));
  sweep->add_option("--grid", sweep_grid, "Codeword lengths or environment counts")->delimiter(',');
  sweep->add_option("--out-dir", sweep_out_dir, "Existing output directory (overrides output_dir)");

  std::vector<std::string> argv_store{"egcsi"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_envs->parsed()) return cmd_gen_envs(c_envs, env_count, env_prefix, envs_out, out);
    if (gen_data->parsed()) return cmd_gen_data(c_data, data_envs, data_only, data_samples, data_out_dir, out);
    if (train->parsed()) return cmd_train_codec(c_train, train_data, train_kind, train_m, train_qf, train_out, out);
    if (enc->parsed()) return cmd_encode(c_enc, enc_data, enc_codec, enc_out, out);
    if (dec->parsed()) return cmd_decode(dec_in, dec_codec, dec_out, out);
    if (eval->parsed()) return cmd_eval(c_eval, eval_data, eval_codec, eval_out, out);
    if (exp->parsed()) return cmd_experiment(c_exp, exp_out_dir, out, err);
    if (sweep->parsed()) return cmd_sweep(c_sweep, sweep_axis, sweep_grid, sweep_out_dir, out, err);
  } catch (const ConfigError& e) {
    err << "egcsi: configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "egcsi: error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace egcsi::cli
