// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/encoder.hpp"

#include <string>

#include "rwkvlab/error.hpp"

namespace rwkvlab {

const Mat64& LayerTrace::layer(std::size_t l) const {
  if (l == 0 || l > hidden.size()) {
    fail(ErrorKind::ConfigError, "layer index " + std::to_string(l) + " outside 1.." +
                                     std::to_string(hidden.size()));
  }
  return hidden[l - 1];
}

Mat64 embed_tokens(const RwkvParams& params, std::span<const TokenId> tokens) {
  if (tokens.empty()) fail(ErrorKind::EmptyInput, "encode: no tokens");
  const std::size_t vocab = params.config.vocab_size;
  Mat64 h(tokens.size(), params.config.d_model);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (tokens[t] >= vocab) {
      fail(ErrorKind::VocabError, "token id " + std::to_string(tokens[t]) +
                                      " >= vocab_size " + std::to_string(vocab));
    }
    h.set_row(t, params.token_embedding.row(tokens[t]));
  }
  if (params.config.layer_norm) h = layer_norm(h, params.ln0_gain.span(), params.ln0_bias.span());
  return h;
}

LayerTrace encode(const RwkvParams& params, std::span<const TokenId> tokens) {
  LayerTrace trace;
  trace.embedded = embed_tokens(params, tokens);
  trace.token_count = tokens.size();
  trace.hidden.reserve(params.layers.size());
  const Mat64* input = &trace.embedded;
  for (const auto& layer : params.layers) {
    trace.hidden.push_back(layer_forward(layer, *input, params.config.layer_norm));
    input = &trace.hidden.back();
  }
  return trace;
}

StreamingEncoder::StreamingEncoder(const RwkvParams& params) : params_(&params) { reset(); }

void StreamingEncoder::reset() {
  states_.assign(params_->layers.size(), LayerState::zeros(params_->config.d_model));
  seen_ = 0;
}

LayerTrace StreamingEncoder::feed(std::span<const TokenId> tokens) {
  const std::size_t d = params_->config.d_model;
  const std::size_t n = tokens.size();
  LayerTrace trace;
  trace.embedded = embed_tokens(*params_, tokens);
  trace.token_count = n;
  trace.hidden.assign(params_->layers.size(), Mat64(n, d));

  for (std::size_t t = 0; t < n; ++t) {
    Mat64 h(1, d, trace.embedded.row(t));
    for (std::size_t l = 0; l < params_->layers.size(); ++l) {
      h = layer_forward(params_->layers[l], h, params_->config.layer_norm, &states_[l]);
      trace.hidden[l].set_row(t, h.row(0));
    }
  }
  seen_ += n;
  return trace;
}

}  // namespace rwkvlab
