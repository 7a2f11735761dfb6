// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rwkvlab/blocks.hpp"
#include "rwkvlab/model.hpp"
#include "rwkvlab/tensor.hpp"

namespace rwkvlab {

// Hidden states of one sentence: `embedded` is the stack input H^0 and
// hidden[l - 1] is the post-residual output H^l of layer l.
struct LayerTrace {
  Mat64 embedded;
  std::vector<Mat64> hidden;
  std::size_t token_count = 0;

  std::size_t layer_count() const noexcept { return hidden.size(); }
  // 1-based; throws ConfigError when l is 0 or beyond the stack.
  const Mat64& layer(std::size_t l) const;
};

// Token embeddings for `tokens` (n x d), normalized when the config asks.
// Throws EmptyInput / VocabError.
Mat64 embed_tokens(const RwkvParams& params, std::span<const TokenId> tokens);

// Whole-sequence encoding, layer by layer.
LayerTrace encode(const RwkvParams& params, std::span<const TokenId> tokens);

// Token-at-a-time encoding with per-layer carried state. Successive feed()
// calls continue the same sequence.
class StreamingEncoder {
 public:
  explicit StreamingEncoder(const RwkvParams& params);

  // Returns the trace rows for just the tokens in this call.
  LayerTrace feed(std::span<const TokenId> tokens);
  void reset();
  std::size_t tokens_seen() const noexcept { return seen_; }

 private:
  const RwkvParams* params_;
  std::vector<LayerState> states_;
  std::size_t seen_ = 0;
};

}  // namespace rwkvlab
