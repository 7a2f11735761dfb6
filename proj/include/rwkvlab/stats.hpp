// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Rank statistics, similarity, entropy and curve fitting.

#pragma once

#include <cstddef>
#include <span>

#include "rwkvlab/tensor.hpp"

namespace rwkvlab {

// 1-based fractional ranks; tied values share the mean rank of their block.
Vec64 rank_transform(std::span<const double> values);

double pearson(std::span<const double> xs, std::span<const double> ys);

// Pearson correlation of the fractional ranks. Throws ShapeError on length
// mismatch or n < 2, DegenerateInput when either side is constant.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Throws ZeroVector when either operand has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

enum class EntropyBase { bits, nats };

inline constexpr std::size_t kDefaultEntropyBins = 64;

// Equal-width histogram over [min, max] of the samples; the top edge falls in
// the last cell. A zero-width range has entropy 0.
double shannon_entropy(std::span<const double> samples, std::size_t bins = kDefaultEntropyBins,
                       EntropyBase base = EntropyBase::bits);

inline double shannon_entropy_bits(std::span<const double> samples,
                                   std::size_t bins = kDefaultEntropyBins) {
  return shannon_entropy(samples, bins, EntropyBase::bits);
}

// Least-squares slope of -log(series[l]) against l = 0, 1, ...
// A series c * exp(-alpha * l) gives alpha.
double fit_exp_decay(std::span<const double> series);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> xs, std::span<const double> ys);

Vec64 softmax(std::span<const double> v);

}  // namespace rwkvlab
