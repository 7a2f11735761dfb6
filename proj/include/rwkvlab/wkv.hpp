// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// WKV aggregation. Per channel, with token sequences r, k, v (rows = tokens):
//
//            sum_{i<t} exp(-(t-1-i) lambda) k_i v_i + exp(u) k_t v_t
//   o_t  =  ---------------------------------------------------------
//            sum_{i<t} exp(-(t-1-i) lambda) r_i     + exp(u) r_t
//
// The receptance sits in the denominator and k is not exponentiated. With
// r in (0, 1) the denominator is strictly positive.
//
// The recurrent form caches the two sums:
//   num_t = exp(-lambda) num_{t-1} + k_t v_t
//   den_t = exp(-lambda) den_{t-1} + r_t
//   o_t   = (num_{t-1} + exp(u) k_t v_t) / (den_{t-1} + exp(u) r_t)

#pragma once

#include "rwkvlab/model.hpp"
#include "rwkvlab/tensor.hpp"

namespace rwkvlab {

struct WkvState {
  Vec64 num;  // decayed sum of k*v
  Vec64 den;  // decayed sum of r

  static WkvState zeros(std::size_t d) { return {Vec64(d), Vec64(d)}; }
  friend bool operator==(const WkvState&, const WkvState&) = default;
};

struct WkvResult {
  Mat64 out;
  WkvState state;
};

struct WkvGrads {
  Mat64 r, k, v;
  Vec64 lambda, u;
};

// O(n^2 d) evaluation of the displayed sum, term by term.
Mat64 wkv_direct(const TimeMixParams& tm, const Mat64& r, const Mat64& k, const Mat64& v);

// O(n d) evaluation through the cached sums, optionally continuing from a
// carried state. Parallel over channels.
WkvResult wkv_recurrent(const TimeMixParams& tm, const Mat64& r, const Mat64& k, const Mat64& v,
                        const WkvState* carried = nullptr);

// Reverse-mode gradients of sum_t <grad_out_t, o_t> for a pass that started
// from a zero state.
WkvGrads wkv_backward(const TimeMixParams& tm, const Mat64& r, const Mat64& k, const Mat64& v,
                      const Mat64& grad_out);

}  // namespace rwkvlab
