// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Pair scoring, split evaluation and the layer sweep.
//
// Pairs are scored in parallel (OpenMP, one pair per work item); results are
// written by pair index, so output order and values do not depend on the
// worker count. Each pair is timed with its own steady clock.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwkvlab/baseline.hpp"
#include "rwkvlab/encoder.hpp"
#include "rwkvlab/model.hpp"
#include "rwkvlab/pairs.hpp"
#include "rwkvlab/pooling.hpp"
#include "rwkvlab/report.hpp"

namespace rwkvlab {

// Deterministic stand-in tokenizer: FNV-1a of each lowercased whitespace
// token, modulo vocab_size. Carries no linguistic meaning.
class HashingTokenizer {
 public:
  explicit HashingTokenizer(std::size_t vocab_size);
  std::vector<TokenId> operator()(std::string_view text) const;
  std::size_t vocab_size() const noexcept { return vocab_size_; }

 private:
  std::size_t vocab_size_;
};

class SentenceEmbedder {
 public:
  virtual ~SentenceEmbedder() = default;
  virtual std::string name() const = 0;
  virtual Vec64 embed(std::string_view text) const = 0;
};

class WordAverageEmbedder final : public SentenceEmbedder {
 public:
  WordAverageEmbedder(std::string name, WordVectorTable table,
                      OovPolicy policy = OovPolicy::zero_vector);
  std::string name() const override { return name_; }
  Vec64 embed(std::string_view text) const override;

 private:
  std::string name_;
  WordVectorTable table_;
  OovPolicy policy_;
};

// Encodes the sentence and pools the chosen layer (1-based).
class RwkvLayerEmbedder final : public SentenceEmbedder {
 public:
  RwkvLayerEmbedder(const RwkvParams& params, std::size_t layer, PoolStrategy strategy);
  std::string name() const override;
  Vec64 embed(std::string_view text) const override;

 private:
  const RwkvParams* params_;
  std::size_t layer_;
  PoolStrategy strategy_;
  HashingTokenizer tokenizer_;
};

std::string rwkv_layer_method_name(std::size_t layer);

struct SkippedPair {
  std::size_t index;
  std::string reason;
};

struct PairScores {
  std::vector<double> similarities;  // kept pairs only, in input order
  std::vector<double> seconds;       // per kept pair
  std::vector<std::size_t> kept;     // indices into the record list
  std::vector<SkippedPair> skipped;  // zero-vector (degenerate) sentences
};

struct ScoreOptions {
  int threads = 1;
  std::size_t warmup = 0;  // untimed embeddings of the first record first
};

// Cosine similarity per pair. Throws EmptyInput for no records. A ZeroVector
// on either side skips the pair and records it instead of failing.
PairScores score_pairs(const SentenceEmbedder& embedder,
                       std::span<const SentencePairRecord> records,
                       const ScoreOptions& options = {});

// Spearman of similarities against 0/1 labels. DegenerateInput when every
// label is the same.
double evaluate_split(std::span<const double> similarities, std::span<const int> labels);

// Labels of the kept pairs, aligned with PairScores::similarities.
std::vector<int> kept_labels(std::span<const SentencePairRecord> records, const PairScores& s);

inline const std::vector<std::size_t> kDefaultLayers = {1, 3, 5, 7, 9, 11};

struct SweepOptions {
  std::string split = "validation";
  int threads = 1;
  std::size_t warmup = 0;
  std::uint64_t seed = 42;
  std::string config_digest;   // filled from the model config when empty
  bool track_memory = true;
};

// One encode per sentence; every requested layer is pooled from the same
// trace. Produces one row per layer ("rwkv_layer_<l>") then one row per
// baseline, in the order given. Per-pair seconds for a layer row are the
// encode time of both sentences plus that layer's pooling and cosine.
// Throws ConfigError for a layer index outside 1..n_layers.
EvalReport layer_sweep(const RwkvParams& params, std::span<const SentencePairRecord> records,
                       std::span<const std::size_t> layers, const PoolStrategy& strategy,
                       std::span<const SentenceEmbedder* const> baselines,
                       const SweepOptions& options = {});

// Single-method report with the same row layout.
EvalReport evaluate_method(const SentenceEmbedder& embedder,
                           std::span<const SentencePairRecord> records,
                           const SweepOptions& options = {});

std::string model_config_digest(const ModelConfig& config, const PoolStrategy& strategy);

}  // namespace rwkvlab
