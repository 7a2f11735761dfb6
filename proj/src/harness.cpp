// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/harness.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <numeric>

#include "rwkvlab/alloc_tracker.hpp"
#include "rwkvlab/error.hpp"
#include "rwkvlab/hash.hpp"
#include "rwkvlab/kernels.hpp"
#include "rwkvlab/stats.hpp"

namespace rwkvlab {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

int resolve_threads(int threads) { return threads > 0 ? threads : kernels::max_threads(); }

// Measures the tracked high-water mark above the bytes live at construction.
class PeakWindow {
 public:
  explicit PeakWindow(bool on) : on_(on && AllocTracker::enabled()) {
    if (on_) {
      AllocTracker::reset_peak();
      base_ = AllocTracker::stats().current_bytes;
    }
  }
  std::uint64_t peak_above_base() const {
    if (!on_) return 0;
    const auto peak = AllocTracker::stats().peak_bytes;
    return peak > base_ ? peak - base_ : 0;
  }

 private:
  bool on_;
  std::size_t base_ = 0;
};

void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ReportRow make_row(std::string method, const std::string& split,
                   std::span<const SentencePairRecord> records, const PairScores& scores,
                   std::uint64_t peak) {
  const auto labels = kept_labels(records, scores);
  ReportRow row;
  row.method = std::move(method);
  row.split = split;
  row.spearman = evaluate_split(scores.similarities, labels);
  row.mean_pair_seconds =
      scores.seconds.empty()
          ? 0.0
          : std::accumulate(scores.seconds.begin(), scores.seconds.end(), 0.0) /
                static_cast<double>(scores.seconds.size());
  row.peak_bytes = peak;
  return row;
}

}  // namespace

HashingTokenizer::HashingTokenizer(std::size_t vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size == 0) fail(ErrorKind::ConfigError, "tokenizer vocab_size must be >= 1");
}

std::vector<TokenId> HashingTokenizer::operator()(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const auto& tok : tokenize_whitespace(text)) {
    ids.push_back(static_cast<TokenId>(fnv1a64(tok) % vocab_size_));
  }
  return ids;
}

WordAverageEmbedder::WordAverageEmbedder(std::string name, WordVectorTable table,
                                         OovPolicy policy)
    : name_(std::move(name)), table_(std::move(table)), policy_(policy) {
  if (table_.empty()) fail(ErrorKind::ConfigError, "word-vector table is empty");
}

Vec64 WordAverageEmbedder::embed(std::string_view text) const {
  return embed_sentence_avg(table_, text, policy_).vector;
}

RwkvLayerEmbedder::RwkvLayerEmbedder(const RwkvParams& params, std::size_t layer,
                                     PoolStrategy strategy)
    : params_(&params),
      layer_(layer),
      strategy_(std::move(strategy)),
      tokenizer_(params.config.vocab_size) {
  if (layer == 0 || layer > params.config.n_layers) {
    fail(ErrorKind::ConfigError, "layer " + std::to_string(layer) + " outside 1.." +
                                     std::to_string(params.config.n_layers));
  }
}

std::string RwkvLayerEmbedder::name() const { return rwkv_layer_method_name(layer_); }

Vec64 RwkvLayerEmbedder::embed(std::string_view text) const {
  const LayerTrace trace = encode(*params_, tokenizer_(text));
  return pool(trace.layer(layer_), strategy_).vector;
}

std::string rwkv_layer_method_name(std::size_t layer) {
  return "rwkv_layer_" + std::to_string(layer);
}

PairScores score_pairs(const SentenceEmbedder& embedder,
                       std::span<const SentencePairRecord> records,
                       const ScoreOptions& options) {
  if (records.empty()) fail(ErrorKind::EmptyInput, "score_pairs: no records");
  for (std::size_t i = 0; i < options.warmup; ++i) (void)embedder.embed(records[0].sentence1);

  const std::size_t n = records.size();
  std::vector<double> sims(n, 0.0), secs(n, 0.0);
  std::vector<std::string> skip_reason(n);
  std::vector<std::exception_ptr> errors(n);

#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(options.threads))
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      const auto t0 = Clock::now();
      const Vec64 a = embedder.embed(records[i].sentence1);
      const Vec64 b = embedder.embed(records[i].sentence2);
      sims[i] = cosine_similarity(a.span(), b.span());
      secs[i] = seconds_between(t0, Clock::now());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ZeroVector) {
        skip_reason[i] = e.what();
      } else {
        errors[i] = std::current_exception();
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(errors);

  PairScores out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!skip_reason[i].empty()) {
      out.skipped.push_back({i, skip_reason[i]});
      continue;
    }
    out.kept.push_back(i);
    out.similarities.push_back(sims[i]);
    out.seconds.push_back(secs[i]);
  }
  return out;
}

double evaluate_split(std::span<const double> similarities, std::span<const int> labels) {
  if (similarities.size() != labels.size()) {
    fail(ErrorKind::ShapeError, "evaluate_split: similarity and label counts differ");
  }
  if (labels.size() < 2) fail(ErrorKind::ShapeError, "evaluate_split: need at least 2 pairs");
  bool mixed = false;
  for (int l : labels) mixed = mixed || l != labels[0];
  if (!mixed) fail(ErrorKind::DegenerateInput, "evaluate_split: all labels are equal");
  const std::vector<double> as_double(labels.begin(), labels.end());
  return spearman(similarities, as_double);
}

std::vector<int> kept_labels(std::span<const SentencePairRecord> records, const PairScores& s) {
  std::vector<int> labels;
  labels.reserve(s.kept.size());
  for (std::size_t i : s.kept) labels.push_back(records[i].label);
  return labels;
}

std::string model_config_digest(const ModelConfig& config, const PoolStrategy& strategy) {
  std::string canon = "d_model=" + std::to_string(config.d_model) +
                      ";n_layers=" + std::to_string(config.n_layers) +
                      ";vocab_size=" + std::to_string(config.vocab_size) +
                      ";seed=" + std::to_string(config.seed) +
                      ";layer_norm=" + (config.layer_norm ? "1" : "0") +
                      ";pooling=" + std::string(to_string(strategy.kind));
  if (strategy.query) {
    char buf[32];
    for (double q : *strategy.query) {
      std::snprintf(buf, sizeof(buf), ",%.17g", q);
      canon += buf;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return hex;
}

EvalReport layer_sweep(const RwkvParams& params, std::span<const SentencePairRecord> records,
                       std::span<const std::size_t> layers, const PoolStrategy& strategy,
                       std::span<const SentenceEmbedder* const> baselines,
                       const SweepOptions& options) {
  if (layers.empty()) fail(ErrorKind::ConfigError, "layer_sweep: no layers requested");
  for (std::size_t l : layers) {
    if (l == 0 || l > params.config.n_layers) {
      fail(ErrorKind::ConfigError, "layer " + std::to_string(l) + " outside 1.." +
                                       std::to_string(params.config.n_layers));
    }
  }
  if (records.empty()) fail(ErrorKind::EmptyInput, "layer_sweep: no records");

  EvalReport report;
  report.metadata.seed = options.seed;
  report.metadata.config_digest = options.config_digest.empty()
                                      ? model_config_digest(params.config, strategy)
                                      : options.config_digest;
  report.metadata.timestamp = utc_timestamp();
  report.metadata.pairs = records.size();

  const HashingTokenizer tokenizer(params.config.vocab_size);
  const std::size_t n = records.size();
  const std::size_t m = layers.size();
  std::vector<double> sims(n * m, 0.0), secs(n * m, 0.0);
  std::vector<std::string> skip_reason(n * m);
  std::vector<std::exception_ptr> errors(n);

  for (std::size_t i = 0; i < options.warmup; ++i) (void)encode(params, tokenizer(records[0].sentence1));

  std::uint64_t rwkv_peak = 0;
  {
    const PeakWindow window(options.track_memory);
#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(options.threads))
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      try {
        const auto t0 = Clock::now();
        const LayerTrace a = encode(params, tokenizer(records[i].sentence1));
        const LayerTrace b = encode(params, tokenizer(records[i].sentence2));
        const double encode_secs = seconds_between(t0, Clock::now());
        for (std::size_t j = 0; j < m; ++j) {
          const auto t1 = Clock::now();
          const Vec64 pa = pool(a.layer(layers[j]), strategy).vector;
          const Vec64 pb = pool(b.layer(layers[j]), strategy).vector;
          try {
            sims[j * n + i] = cosine_similarity(pa.span(), pb.span());
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroVector) throw;
            skip_reason[j * n + i] = e.what();
          }
          secs[j * n + i] = encode_secs + seconds_between(t1, Clock::now());
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    rethrow_first(errors);
    rwkv_peak = window.peak_above_base();
  }

  for (std::size_t j = 0; j < m; ++j) {
    PairScores scores;
    for (std::size_t i = 0; i < n; ++i) {
      if (!skip_reason[j * n + i].empty()) {
        scores.skipped.push_back({i, skip_reason[j * n + i]});
        continue;
      }
      scores.kept.push_back(i);
      scores.similarities.push_back(sims[j * n + i]);
      scores.seconds.push_back(secs[j * n + i]);
    }
    const std::string method = rwkv_layer_method_name(layers[j]);
    report.metadata.skipped_pairs[method] = scores.skipped.size();
    report.rows.push_back(make_row(method, options.split, records, scores, rwkv_peak));
  }

  for (const SentenceEmbedder* baseline : baselines) {
    EvalReport single = evaluate_method(*baseline, records, options);
    report.rows.push_back(single.rows.front());
    for (const auto& [k, v] : single.metadata.skipped_pairs) report.metadata.skipped_pairs[k] = v;
  }
  return report;
}

EvalReport evaluate_method(const SentenceEmbedder& embedder,
                           std::span<const SentencePairRecord> records,
                           const SweepOptions& options) {
  EvalReport report;
  report.metadata.seed = options.seed;
  report.metadata.config_digest = options.config_digest;
  report.metadata.timestamp = utc_timestamp();
  report.metadata.pairs = records.size();

  const PeakWindow window(options.track_memory);
  const PairScores scores =
      score_pairs(embedder, records, ScoreOptions{options.threads, options.warmup});
  const std::uint64_t peak = window.peak_above_base();
  const std::string method = embedder.name();
  report.metadata.skipped_pairs[method] = scores.skipped.size();
  report.rows.push_back(make_row(method, options.split, records, scores, peak));
  return report;
}

}  // namespace rwkvlab
