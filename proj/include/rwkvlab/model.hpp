// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Configuration and learnable tensors of the toy RWKV stack.
//
// All projection matrices are stored d_out x d_in and applied as y = W x.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rwkvlab/tensor.hpp"

namespace rwkvlab {

using TokenId = std::uint32_t;

struct ModelConfig {
  std::size_t d_model = 32;
  std::size_t n_layers = 12;
  std::size_t vocab_size = 4096;
  std::uint64_t seed = 42;
  // Embedding-level and pre-block layer normalization. Off by default so the
  // blocks compute the bare formulas.
  bool layer_norm = false;

  // Throws ConfigError on a zero dimension.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TimeMixParams {
  Mat64 w_r, w_k, w_v, w_o;
  Vec64 lambda;  // per-channel decay rate, >= 0
  Vec64 u;       // per-channel current-token bonus
  Vec64 mu_r, mu_k, mu_v;  // token-shift interpolation, in [0, 1]

  std::size_t width() const noexcept { return lambda.size(); }
};

struct ChannelMixParams {
  Mat64 w_r, w_k, w_v;
  Vec64 mu;
};

struct LayerParams {
  Vec64 ln1_gain, ln1_bias;
  TimeMixParams time_mix;
  Vec64 ln2_gain, ln2_bias;
  ChannelMixParams channel_mix;
};

struct RwkvParams {
  ModelConfig config;
  Mat64 token_embedding;  // vocab_size x d_model
  Vec64 ln0_gain, ln0_bias;
  std::vector<LayerParams> layers;
};

// Deterministic in config.seed: projections ~ U(-1/sqrt(d), 1/sqrt(d)),
// embeddings ~ U(-1, 1), lambda linearly spaced over [0.1, 3.0] across
// channels, u = 0, every mu = 0.5, norm gains 1 and biases 0.
RwkvParams init_model(const ModelConfig& config);

// Same shapes as init_model, but every projection matrix is zero, so each
// layer reduces to its residual path.
RwkvParams zero_weight_model(const ModelConfig& config);

// Checks shapes against config and the lambda / mu ranges.
void validate_params(const RwkvParams& params);

// Visits every tensor in checkpoint order with a stable dotted name.
template <class Visitor>
void for_each_tensor(RwkvParams& p, Visitor&& visit);
template <class Visitor>
void for_each_tensor(const RwkvParams& p, Visitor&& visit);

}  // namespace rwkvlab

#include "rwkvlab/detail/model_tensors.hpp"
