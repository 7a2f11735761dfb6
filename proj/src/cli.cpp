// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "rwkvlab/alloc_tracker.hpp"
#include "rwkvlab/baseline.hpp"
#include "rwkvlab/checkpoint.hpp"
#include "rwkvlab/diagnostics.hpp"
#include "rwkvlab/error.hpp"
#include "rwkvlab/harness.hpp"
#include "rwkvlab/model.hpp"
#include "rwkvlab/pairs.hpp"
#include "rwkvlab/pooling.hpp"
#include "rwkvlab/report.hpp"

namespace rwkvlab {
namespace {

constexpr std::size_t kRandomBaselineDim = 50;

struct RunOptions {
  // model
  std::string checkpoint;
  std::size_t d_model = ModelConfig{}.d_model;
  std::size_t n_layers = ModelConfig{}.n_layers;
  std::size_t vocab_size = ModelConfig{}.vocab_size;
  bool layer_norm = false;
  std::uint64_t seed = 42;
  // data and evaluation
  std::string data;
  std::string split = "validation";
  std::string word_vectors;
  std::string oov = "zero";
  std::string layers = "1,3,5,7,9,11";
  std::size_t layer = 0;  // 0: last layer
  std::string method = "rwkv";
  std::string pooling = "average";
  std::optional<std::uint64_t> pool_seed;
  int threads = 1;
  std::size_t warmup = 0;
  bool no_track_memory = false;
  // output
  std::string report;
  std::string format = "csv";
  std::string out;
  std::string out_dir;
  // embed
  std::vector<std::string> texts;
  std::string input;
  // bench / diagnose
  std::string lengths = "64,128,256,512,1024";
  std::string query_seeds;
  std::size_t bins = 64;
  bool scaling = false;
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::FormatError, std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) fail(ErrorKind::FormatError, "cannot write '" + path + "'");
}

ModelConfig model_config(const RunOptions& o) {
  ModelConfig c;
  c.d_model = o.d_model;
  c.n_layers = o.n_layers;
  c.vocab_size = o.vocab_size;
  c.layer_norm = o.layer_norm;
  c.seed = o.seed;
  c.validate();
  return c;
}

RwkvParams load_model(const RunOptions& o) {
  if (!o.checkpoint.empty()) return load_checkpoint_file(o.checkpoint);
  return init_model(model_config(o));
}

PoolStrategy pool_strategy(const RunOptions& o, std::size_t d) {
  const PoolKind kind = parse_pool_kind(o.pooling);
  if (kind == PoolKind::adaptive) {
    return PoolStrategy::adaptive(random_query(d, o.pool_seed.value_or(o.seed)));
  }
  return {kind, std::nullopt};
}

OovPolicy oov_policy(const std::string& name) {
  if (name == "zero") return OovPolicy::zero_vector;
  if (name == "skip") return OovPolicy::skip;
  fail(ErrorKind::ConfigError, "unknown OOV policy '" + name + "' (zero|skip)");
}

std::unique_ptr<SentenceEmbedder> make_baseline(const RunOptions& o,
                                                std::span<const std::string> texts) {
  if (!o.word_vectors.empty()) {
    return std::make_unique<WordAverageEmbedder>(
        "glove_baseline", load_word_vectors_file(o.word_vectors), oov_policy(o.oov));
  }
  return std::make_unique<WordAverageEmbedder>(
      "random_vector_baseline", random_word_vectors(texts, kRandomBaselineDim, o.seed),
      oov_policy(o.oov));
}

std::vector<std::string> record_texts(std::span<const SentencePairRecord> records) {
  std::vector<std::string> texts;
  for (const auto& r : records) {
    texts.push_back(r.sentence1);
    texts.push_back(r.sentence2);
  }
  return texts;
}

std::size_t resolve_layer(const RunOptions& o, const RwkvParams& params) {
  return o.layer == 0 ? params.config.n_layers : o.layer;
}

SweepOptions sweep_options(const RunOptions& o, const RwkvParams& params,
                           const PoolStrategy& strategy) {
  SweepOptions s;
  s.split = o.split;
  s.threads = o.threads;
  s.warmup = o.warmup;
  s.seed = o.seed;
  s.config_digest = model_config_digest(params.config, strategy);
  s.track_memory = !o.no_track_memory;
  return s;
}

void emit_report(const RunOptions& o, const EvalReport& report, std::ostream& out) {
  write_output(o.report, write_report(report, parse_report_format(o.format)), out);
}

std::string format_vector(const Vec64& v) {
  std::string line;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), i == 0 ? "%.17g" : ",%.17g", v[i]);
    line += buf;
  }
  return line + "\n";
}

// --- subcommands -----------------------------------------------------------

int cmd_init(const RunOptions& o, std::ostream& out) {
  if (o.out.empty()) fail(ErrorKind::ConfigError, "init needs --out");
  save_checkpoint_file(init_model(model_config(o)), o.out);
  out << "wrote " << o.out << "\n";
  return kExitOk;
}

int cmd_embed(const RunOptions& o, std::ostream& out) {
  std::vector<std::string> texts = o.texts;
  if (!o.input.empty()) {
    std::istringstream in(read_file(o.input, "input file"));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) texts.push_back(line);
    }
  }
  if (texts.empty()) fail(ErrorKind::ConfigError, "embed needs --text or --input");

  std::unique_ptr<SentenceEmbedder> embedder;
  std::optional<RwkvParams> params;
  if (o.method == "baseline") {
    embedder = make_baseline(o, texts);
  } else if (o.method == "rwkv") {
    params = load_model(o);
    embedder = std::make_unique<RwkvLayerEmbedder>(
        *params, resolve_layer(o, *params), pool_strategy(o, params->config.d_model));
  } else {
    fail(ErrorKind::ConfigError, "unknown --method '" + o.method + "' (rwkv|baseline)");
  }
  std::string text;
  for (const auto& t : texts) text += format_vector(embedder->embed(t));
  write_output(o.out, text, out);
  return kExitOk;
}

int cmd_eval(const RunOptions& o, std::ostream& out) {
  const auto records = load_pairs_file(o.data);
  const RwkvParams params = load_model(o);
  const PoolStrategy strategy = pool_strategy(o, params.config.d_model);
  const SweepOptions options = sweep_options(o, params, strategy);
  std::unique_ptr<SentenceEmbedder> embedder;
  if (o.method == "baseline") {
    embedder = make_baseline(o, record_texts(records));
  } else if (o.method == "rwkv") {
    embedder = std::make_unique<RwkvLayerEmbedder>(params, resolve_layer(o, params), strategy);
  } else {
    fail(ErrorKind::ConfigError, "unknown --method '" + o.method + "' (rwkv|baseline)");
  }
  emit_report(o, evaluate_method(*embedder, records, options), out);
  return kExitOk;
}

int cmd_sweep(const RunOptions& o, std::ostream& out) {
  const auto layers = parse_index_list(o.layers);
  const auto records = load_pairs_file(o.data);
  const RwkvParams params = load_model(o);
  const PoolStrategy strategy = pool_strategy(o, params.config.d_model);
  const auto baseline = make_baseline(o, record_texts(records));
  const SentenceEmbedder* baselines[] = {baseline.get()};
  emit_report(o,
              layer_sweep(params, records, layers, strategy, baselines,
                          sweep_options(o, params, strategy)),
              out);
  return kExitOk;
}

int cmd_bench(const RunOptions& o, std::ostream& out) {
  const auto lengths = parse_index_list(o.lengths);
  const RwkvParams params = load_model(o);
  const ScalingResult r = scaling_benchmark(params, lengths, o.seed);
  std::ostringstream s;
  s.precision(6);
  s << "n,recurrent_seconds,attention_seconds\n";
  for (std::size_t i = 0; i < r.lengths.size(); ++i) {
    s << r.lengths[i] << "," << r.recurrent_seconds[i] << "," << r.attention_seconds[i] << "\n";
  }
  s << "# exponent recurrent=" << r.recurrent_exponent << " attention=" << r.attention_exponent
    << "\n";
  write_output(o.out, s.str(), out);
  return kExitOk;
}

int cmd_diagnose(const RunOptions& o, std::ostream& out) {
  const auto records = load_pairs_file(o.data);
  const RwkvParams params = load_model(o);
  DiagnosticsOptions d;
  d.sentences = record_texts(records);
  d.bins = o.bins;
  d.seed = o.seed;
  if (o.scaling) d.scaling_lengths = parse_index_list(o.lengths);
  if (!o.query_seeds.empty()) {
    for (std::size_t s : parse_index_list(o.query_seeds)) d.query_seeds.push_back(s);
    d.sweep_records = records;
    d.sweep_layer = resolve_layer(o, params);
  }
  const DiagnosticsProfile profile = build_profile(params, d);
  write_output(o.out, profile_to_json(profile), out);
  if (!o.out_dir.empty()) write_profile_csvs(profile, o.out_dir);
  return kExitOk;
}

// --- option wiring -----------------------------------------------------------

void add_model_options(CLI::App* app, RunOptions& o) {
  auto* ckpt = app->add_option("--checkpoint", o.checkpoint,
                               "Load the model from a checkpoint instead of seeded init");
  auto* d = app->add_option("--d-model", o.d_model, "Model width")->capture_default_str();
  auto* n = app->add_option("--n-layers", o.n_layers, "Layer count")->capture_default_str();
  auto* v = app->add_option("--vocab-size", o.vocab_size, "Hashing-tokenizer buckets")
                ->capture_default_str();
  auto* ln = app->add_flag("--layer-norm", o.layer_norm, "Enable layer normalization");
  for (auto* opt : {d, n, v, ln}) ckpt->excludes(opt);
}

void add_seed_option(CLI::App* app, RunOptions& o) {
  app->add_option("--seed", o.seed, "Seed for model init, baseline vectors and queries")
      ->capture_default_str();
}

void add_pooling_options(CLI::App* app, RunOptions& o) {
  app->add_option("--pooling", o.pooling, "average | max | last | adaptive")
      ->capture_default_str();
  app->add_option("--pool-seed", o.pool_seed, "Seed of the adaptive query (default: --seed)");
}

void add_eval_options(CLI::App* app, RunOptions& o) {
  app->add_option("--data", o.data, "Pair TSV: label<TAB>sentence1<TAB>sentence2")->required();
  app->add_option("--split-name", o.split, "Split name written to the report")
      ->capture_default_str();
  app->add_option("--word-vectors", o.word_vectors,
                  "Word vectors in 'word v1 .. vd' text format (default: seeded random 50-d)");
  app->add_option("--oov", o.oov, "zero | skip")->capture_default_str();
  app->add_option("--threads", o.threads, "Worker threads for pair scoring")
      ->capture_default_str();
  app->add_option("--warmup", o.warmup, "Untimed embeddings before timing")
      ->capture_default_str();
  app->add_flag("--no-track-memory", o.no_track_memory, "Report peak_bytes as 0");
  app->add_option("--report", o.report, "Report path (default: stdout)");
  app->add_option("--format", o.format, "csv | json")->capture_default_str();
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) fail(ErrorKind::ConfigError, "--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path || rest.empty()) return rest;
  // Config values go right after the subcommand so that later flags win.
  auto extra = config_file_args(read_file(*path, "config file"));
  rest.insert(rest.begin() + 1, extra.begin(), extra.end());
  return rest;
}

}  // namespace

std::vector<std::string> config_file_args(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::ConfigError, "config line is not key=value", line_no);
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    std::replace(key.begin(), key.end(), '_', '-');
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(start, comma - start);
    std::size_t value = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      fail(ErrorKind::ConfigError, "bad integer list '" + text + "'");
    }
    out.push_back(value);
    start = comma + 1;
  }
  return out;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunOptions o;
  CLI::App app{"rwkvlab: RWKV linear-attention embedding lab", "rwkvlab"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.footer(
      "--config FILE (any subcommand): key=value lines, keys are flag names with '_' for '-'.\n"
      "Flags override the config file, which overrides defaults.\n"
      "Exit codes: 0 ok, 2 usage/config error, 1 runtime error.");

  auto* init = app.add_subcommand("init", "Write a seeded model checkpoint");
  add_model_options(init, o);
  add_seed_option(init, o);
  init->add_option("--out", o.out, "Checkpoint path")->required();

  auto* embed = app.add_subcommand("embed", "Print sentence embeddings, one CSV line each");
  add_model_options(embed, o);
  add_seed_option(embed, o);
  add_pooling_options(embed, o);
  embed->add_option("--text", o.texts, "Sentence (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  embed->add_option("--input", o.input, "File with one sentence per line");
  embed->add_option("--method", o.method, "rwkv | baseline")->capture_default_str();
  embed->add_option("--layer", o.layer, "RWKV layer, 1-based (default: last)");
  embed->add_option("--word-vectors", o.word_vectors, "Word vectors for --method baseline");
  embed->add_option("--oov", o.oov, "zero | skip")->capture_default_str();
  embed->add_option("--out", o.out, "Output path (default: stdout)");

  auto* eval = app.add_subcommand("eval", "Score one method on a pair file");
  add_model_options(eval, o);
  add_seed_option(eval, o);
  add_pooling_options(eval, o);
  add_eval_options(eval, o);
  eval->add_option("--method", o.method, "rwkv | baseline")->capture_default_str();
  eval->add_option("--layer", o.layer, "RWKV layer, 1-based (default: last)");

  auto* sweep = app.add_subcommand("sweep", "Score RWKV layers plus the word-vector baseline");
  add_model_options(sweep, o);
  add_seed_option(sweep, o);
  add_pooling_options(sweep, o);
  add_eval_options(sweep, o);
  sweep->add_option("--layers", o.layers, "Comma-separated 1-based layers")
      ->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Recurrent WKV vs attention scaling benchmark");
  add_model_options(bench, o);
  add_seed_option(bench, o);
  bench->add_option("--lengths", o.lengths, "Comma-separated sequence lengths")
      ->capture_default_str();
  bench->add_option("--out", o.out, "Output path (default: stdout)");

  auto* diagnose = app.add_subcommand("diagnose", "Emit a JSON diagnostics profile");
  add_model_options(diagnose, o);
  add_seed_option(diagnose, o);
  diagnose->add_option("--data", o.data, "Pair TSV whose sentences are profiled")->required();
  diagnose->add_option("--bins", o.bins, "Entropy histogram bins")->capture_default_str();
  diagnose->add_flag("--scaling", o.scaling, "Also run the scaling benchmark");
  diagnose->add_option("--lengths", o.lengths, "Lengths for --scaling")->capture_default_str();
  diagnose->add_option("--query-seeds", o.query_seeds,
                       "Comma-separated seeds for an adaptive-pooling query sweep");
  diagnose->add_option("--layer", o.layer, "Layer for the query sweep (default: last)");
  diagnose->add_option("--out", o.out, "JSON path (default: stdout)");
  diagnose->add_option("--out-dir", o.out_dir, "Directory for per-curve CSV files");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }
    if (*init) return cmd_init(o, out);
    if (*embed) return cmd_embed(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*bench) return cmd_bench(o, out);
    if (*diagnose) return cmd_diagnose(o, out);
    return kExitUsage;
  } catch (const Error& e) {
    err << "rwkvlab: " << to_string(e.kind()) << ": " << e.what();
    if (e.line()) err << " (line " << *e.line() << ")";
    err << "\n";
    return e.kind() == ErrorKind::ConfigError ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "rwkvlab: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace rwkvlab
