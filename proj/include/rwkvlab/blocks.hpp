// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Time-mixing and channel-mixing blocks, layer norm, and one full residual
// layer, each with an analytic adjoint. Sequences are n x d matrices, one
// token per row. Block outputs exclude the residual; layer_forward adds it.
//
// Token shift (x_0 = 0 unless a state carries the previous token):
//   shift(x, mu)_t = mu * x_t + (1 - mu) * x_{t-1}
// Time mixing:
//   r = sigmoid(W_r shift(x, mu_r)), k = W_k shift(x, mu_k), v = W_v shift(x, mu_v)
//   y = W_o wkv(r, k, v)
// Channel mixing:
//   xs = shift(x, mu); kappa = relu(W_k xs)^2
//   y  = sigmoid(W_r xs) * (W_v kappa)

#pragma once

#include <span>

#include "rwkvlab/model.hpp"
#include "rwkvlab/tensor.hpp"
#include "rwkvlab/wkv.hpp"

namespace rwkvlab {

inline constexpr double kLayerNormEps = 1e-5;

struct TimeMixState {
  Vec64 prev_x;
  WkvState wkv;
  static TimeMixState zeros(std::size_t d) { return {Vec64(d), WkvState::zeros(d)}; }
};

struct ChannelMixState {
  Vec64 prev_x;
  static ChannelMixState zeros(std::size_t d) { return {Vec64(d)}; }
};

struct LayerState {
  TimeMixState time_mix;
  ChannelMixState channel_mix;
  static LayerState zeros(std::size_t d) {
    return {TimeMixState::zeros(d), ChannelMixState::zeros(d)};
  }
};

Mat64 token_shift(const Mat64& x, std::span<const double> mu, std::span<const double> prev);

Mat64 layer_norm(const Mat64& x, std::span<const double> gain, std::span<const double> bias);

// With a state, the first token shifts against state->prev_x and the WKV
// continues from state->wkv; both are advanced past the last token.
Mat64 time_mix_forward(const TimeMixParams& tm, const Mat64& x, TimeMixState* state = nullptr);
Mat64 channel_mix_forward(const ChannelMixParams& cm, const Mat64& x,
                          ChannelMixState* state = nullptr);

// H_out = H + TM(N1(H)); H_out' = H_out + CM(N2(H_out)), where N* is layer
// norm when `normalize` is set and the identity otherwise.
Mat64 layer_forward(const LayerParams& layer, const Mat64& h, bool normalize,
                    LayerState* state = nullptr);

// Adjoints from a zero initial state: given x and dL/dy, return dL/dx.
Mat64 token_shift_backward(const Mat64& grad, std::span<const double> mu);
Mat64 layer_norm_backward(const Mat64& x, std::span<const double> gain, const Mat64& grad);
Mat64 time_mix_backward(const TimeMixParams& tm, const Mat64& x, const Mat64& grad);
Mat64 channel_mix_backward(const ChannelMixParams& cm, const Mat64& x, const Mat64& grad);
Mat64 layer_backward(const LayerParams& layer, const Mat64& h, bool normalize,
                     const Mat64& grad);

}  // namespace rwkvlab
