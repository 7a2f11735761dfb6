// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Sentence vectors from a token-state matrix H (n x d).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rwkvlab/tensor.hpp"

namespace rwkvlab {

enum class PoolKind { average, max, last_token, adaptive };

std::string_view to_string(PoolKind kind);
// Accepts "average", "max", "last" / "last_token", "adaptive"; else ConfigError.
PoolKind parse_pool_kind(std::string_view name);

struct PoolStrategy {
  PoolKind kind = PoolKind::average;
  std::optional<Vec64> query;  // required for adaptive

  static PoolStrategy average() { return {PoolKind::average, std::nullopt}; }
  static PoolStrategy adaptive(Vec64 q) { return {PoolKind::adaptive, std::move(q)}; }
};

struct PoolResult {
  Vec64 vector;
  std::optional<Vec64> weights;  // adaptive only: softmax(q^T h_i)
};

// average: column mean; max: column max; last_token: row n; adaptive:
// sum_i alpha_i h_i with alpha = softmax(q^T h_i), raw (unscaled) scores.
// Adaptive is computed as (sum_i e_i h_i) / (sum_i e_i) with e_i the shifted
// exponentials, so q = 0 reproduces average pooling bit for bit.
PoolResult pool(const Mat64& h, const PoolStrategy& strategy);

// Seeded query vector ~ N(0, 1/d) per entry, for adaptive pooling sweeps.
Vec64 random_query(std::size_t d, std::uint64_t seed);

struct SnrSpec {
  std::size_t tokens = 1;        // n
  double signal_norm_sq = 0.0;   // ||h*||^2
  double noise_var = 1.0;        // sigma^2
};

// n * ||h*||^2 / sigma^2, the effective SNR of average pooling over n tokens.
double snr_estimate(const SnrSpec& spec);

}  // namespace rwkvlab
