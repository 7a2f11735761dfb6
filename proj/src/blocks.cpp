// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rwkvlab/error.hpp"
#include "rwkvlab/kernels.hpp"

namespace rwkvlab {
namespace {

void check_width(const Mat64& x, std::size_t d, const char* what) {
  if (x.rows() == 0) fail(ErrorKind::ShapeError, std::string(what) + ": empty sequence");
  if (x.cols() != d) fail(ErrorKind::ShapeError, std::string(what) + ": width mismatch");
}

void add_into(Mat64& acc, const Mat64& x) {
  auto a = acc.span();
  const auto b = x.span();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void sigmoid_inplace(Mat64& x) {
  for (double& v : x.span()) v = sigmoid(v);
}

// grad * s * (1 - s), the sigmoid adjoint written in terms of the output.
Mat64 sigmoid_adjoint(const Mat64& s, const Mat64& grad) {
  Mat64 out(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double si = s.data()[i];
    out.data()[i] = grad.data()[i] * si * (1.0 - si);
  }
  return out;
}

Vec64 last_row(const Mat64& x) { return x.row_vec(x.rows() - 1); }

struct TimeMixTape {
  Mat64 xr, xk, xv;
  Mat64 r, k, v;
};

TimeMixTape time_mix_inputs(const TimeMixParams& tm, const Mat64& x,
                            std::span<const double> prev) {
  TimeMixTape tape;
  tape.xr = token_shift(x, tm.mu_r.span(), prev);
  tape.xk = token_shift(x, tm.mu_k.span(), prev);
  tape.xv = token_shift(x, tm.mu_v.span(), prev);
  tape.r = kernels::project_rows(tape.xr, tm.w_r);
  sigmoid_inplace(tape.r);
  tape.k = kernels::project_rows(tape.xk, tm.w_k);
  tape.v = kernels::project_rows(tape.xv, tm.w_v);
  return tape;
}

struct ChannelMixTape {
  Mat64 xs;
  Mat64 pre_k;  // W_k xs
  Mat64 kappa;  // relu(pre_k)^2
  Mat64 value;  // W_v kappa
  Mat64 gate;   // sigmoid(W_r xs)
};

ChannelMixTape channel_mix_tape(const ChannelMixParams& cm, const Mat64& x,
                                std::span<const double> prev) {
  ChannelMixTape tape;
  tape.xs = token_shift(x, cm.mu.span(), prev);
  tape.pre_k = kernels::project_rows(tape.xs, cm.w_k);
  tape.kappa = Mat64(x.rows(), x.cols());
  for (std::size_t i = 0; i < tape.pre_k.size(); ++i) {
    const double a = std::max(tape.pre_k.data()[i], 0.0);
    tape.kappa.data()[i] = a * a;
  }
  tape.value = kernels::project_rows(tape.kappa, cm.w_v);
  tape.gate = kernels::project_rows(tape.xs, cm.w_r);
  sigmoid_inplace(tape.gate);
  return tape;
}

}  // namespace

Mat64 token_shift(const Mat64& x, std::span<const double> mu, std::span<const double> prev) {
  const std::size_t d = x.cols();
  if (mu.size() != d) fail(ErrorKind::ShapeError, "token_shift: mu width mismatch");
  if (!prev.empty() && prev.size() != d) {
    fail(ErrorKind::ShapeError, "token_shift: previous-token width mismatch");
  }
  Mat64 out(x.rows(), d);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto cur = x.row(t);
    auto o = out.row(t);
    if (t == 0) {
      for (std::size_t c = 0; c < d; ++c) {
        const double before = prev.empty() ? 0.0 : prev[c];
        o[c] = mu[c] * cur[c] + (1.0 - mu[c]) * before;
      }
    } else {
      const auto before = x.row(t - 1);
      for (std::size_t c = 0; c < d; ++c) o[c] = mu[c] * cur[c] + (1.0 - mu[c]) * before[c];
    }
  }
  return out;
}

Mat64 token_shift_backward(const Mat64& grad, std::span<const double> mu) {
  const std::size_t n = grad.rows();
  const std::size_t d = grad.cols();
  Mat64 out(n, d);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      double g = mu[c] * grad(t, c);
      if (t + 1 < n) g += (1.0 - mu[c]) * grad(t + 1, c);
      out(t, c) = g;
    }
  }
  return out;
}

Mat64 layer_norm(const Mat64& x, std::span<const double> gain, std::span<const double> bias) {
  const std::size_t d = x.cols();
  if (gain.size() != d || bias.size() != d) fail(ErrorKind::ShapeError, "layer_norm: width");
  Mat64 out(x.rows(), d);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto row = x.row(t);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    auto o = out.row(t);
    for (std::size_t c = 0; c < d; ++c) o[c] = gain[c] * ((row[c] - mean) * inv) + bias[c];
  }
  return out;
}

Mat64 layer_norm_backward(const Mat64& x, std::span<const double> gain, const Mat64& grad) {
  const std::size_t d = x.cols();
  const double dd = static_cast<double>(d);
  Mat64 out(x.rows(), d);
  std::vector<double> xhat(d), gx(d);
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto row = x.row(t);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= dd;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= dd;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    double mean_g = 0.0, mean_gx = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      xhat[c] = (row[c] - mean) * inv;
      gx[c] = grad(t, c) * gain[c];
      mean_g += gx[c];
      mean_gx += gx[c] * xhat[c];
    }
    mean_g /= dd;
    mean_gx /= dd;
    for (std::size_t c = 0; c < d; ++c) out(t, c) = inv * (gx[c] - mean_g - xhat[c] * mean_gx);
  }
  return out;
}

Mat64 time_mix_forward(const TimeMixParams& tm, const Mat64& x, TimeMixState* state) {
  check_width(x, tm.width(), "time_mix_forward");
  const std::span<const double> prev =
      state ? state->prev_x.span() : std::span<const double>{};
  TimeMixTape tape = time_mix_inputs(tm, x, prev);
  WkvResult wkv = wkv_recurrent(tm, tape.r, tape.k, tape.v, state ? &state->wkv : nullptr);
  if (state) {
    state->prev_x = last_row(x);
    state->wkv = std::move(wkv.state);
  }
  return kernels::project_rows(wkv.out, tm.w_o);
}

Mat64 channel_mix_forward(const ChannelMixParams& cm, const Mat64& x, ChannelMixState* state) {
  check_width(x, cm.mu.size(), "channel_mix_forward");
  const std::span<const double> prev =
      state ? state->prev_x.span() : std::span<const double>{};
  ChannelMixTape tape = channel_mix_tape(cm, x, prev);
  if (state) state->prev_x = last_row(x);
  Mat64 y = std::move(tape.value);
  for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] *= tape.gate.data()[i];
  return y;
}

Mat64 layer_forward(const LayerParams& layer, const Mat64& h, bool normalize, LayerState* state) {
  TimeMixState* tm_state = state ? &state->time_mix : nullptr;
  ChannelMixState* cm_state = state ? &state->channel_mix : nullptr;

  Mat64 mixed;
  if (normalize) {
    const Mat64 normed = layer_norm(h, layer.ln1_gain.span(), layer.ln1_bias.span());
    mixed = time_mix_forward(layer.time_mix, normed, tm_state);
  } else {
    mixed = time_mix_forward(layer.time_mix, h, tm_state);
  }
  add_into(mixed, h);

  Mat64 out;
  if (normalize) {
    const Mat64 normed = layer_norm(mixed, layer.ln2_gain.span(), layer.ln2_bias.span());
    out = channel_mix_forward(layer.channel_mix, normed, cm_state);
  } else {
    out = channel_mix_forward(layer.channel_mix, mixed, cm_state);
  }
  add_into(out, mixed);
  return out;
}

Mat64 time_mix_backward(const TimeMixParams& tm, const Mat64& x, const Mat64& grad) {
  check_width(x, tm.width(), "time_mix_backward");
  if (grad.rows() != x.rows() || grad.cols() != x.cols()) {
    fail(ErrorKind::ShapeError, "time_mix_backward: gradient shape mismatch");
  }
  const TimeMixTape tape = time_mix_inputs(tm, x, {});
  const Mat64 grad_wkv = kernels::project_rows(grad, tm.w_o.transposed());
  const WkvGrads g = wkv_backward(tm, tape.r, tape.k, tape.v, grad_wkv);

  const Mat64 grad_pre_r = sigmoid_adjoint(tape.r, g.r);
  Mat64 dx = token_shift_backward(kernels::project_rows(grad_pre_r, tm.w_r.transposed()),
                                  tm.mu_r.span());
  add_into(dx, token_shift_backward(kernels::project_rows(g.k, tm.w_k.transposed()),
                                    tm.mu_k.span()));
  add_into(dx, token_shift_backward(kernels::project_rows(g.v, tm.w_v.transposed()),
                                    tm.mu_v.span()));
  return dx;
}

Mat64 channel_mix_backward(const ChannelMixParams& cm, const Mat64& x, const Mat64& grad) {
  check_width(x, cm.mu.size(), "channel_mix_backward");
  if (grad.rows() != x.rows() || grad.cols() != x.cols()) {
    fail(ErrorKind::ShapeError, "channel_mix_backward: gradient shape mismatch");
  }
  const ChannelMixTape tape = channel_mix_tape(cm, x, {});
  const std::size_t count = x.size();

  Mat64 grad_gate(x.rows(), x.cols());
  Mat64 grad_value(x.rows(), x.cols());
  for (std::size_t i = 0; i < count; ++i) {
    grad_gate.data()[i] = grad.data()[i] * tape.value.data()[i];
    grad_value.data()[i] = grad.data()[i] * tape.gate.data()[i];
  }
  Mat64 grad_pre_k = kernels::project_rows(grad_value, cm.w_v.transposed());
  for (std::size_t i = 0; i < count; ++i) {
    grad_pre_k.data()[i] *= 2.0 * std::max(tape.pre_k.data()[i], 0.0);
  }
  const Mat64 grad_pre_r = sigmoid_adjoint(tape.gate, grad_gate);

  Mat64 grad_xs = kernels::project_rows(grad_pre_k, cm.w_k.transposed());
  add_into(grad_xs, kernels::project_rows(grad_pre_r, cm.w_r.transposed()));
  return token_shift_backward(grad_xs, cm.mu.span());
}

Mat64 layer_backward(const LayerParams& layer, const Mat64& h, bool normalize,
                     const Mat64& grad) {
  const auto ln1 = [&](const Mat64& x) {
    return layer_norm(x, layer.ln1_gain.span(), layer.ln1_bias.span());
  };
  const auto ln2 = [&](const Mat64& x) {
    return layer_norm(x, layer.ln2_gain.span(), layer.ln2_bias.span());
  };

  const Mat64 in1 = normalize ? ln1(h) : h;
  Mat64 mixed = time_mix_forward(layer.time_mix, in1);
  add_into(mixed, h);
  const Mat64 in2 = normalize ? ln2(mixed) : mixed;

  Mat64 grad_mixed = channel_mix_backward(layer.channel_mix, in2, grad);
  if (normalize) grad_mixed = layer_norm_backward(mixed, layer.ln2_gain.span(), grad_mixed);
  add_into(grad_mixed, grad);

  Mat64 grad_h = time_mix_backward(layer.time_mix, in1, grad_mixed);
  if (normalize) grad_h = layer_norm_backward(h, layer.ln1_gain.span(), grad_h);
  add_into(grad_h, grad_mixed);
  return grad_h;
}

}  // namespace rwkvlab
