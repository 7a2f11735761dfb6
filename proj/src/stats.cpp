// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rwkvlab/error.hpp"

namespace rwkvlab {

Vec64 rank_transform(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::EmptyInput, "rank_transform: empty input");
  require_finite(values, "rank_transform");

  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  Vec64 ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j; their mean is (i + 1 + j) / 2
    const double shared = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorKind::ShapeError, "pearson: length mismatch");
  if (xs.size() < 2) fail(ErrorKind::ShapeError, "pearson: need at least 2 observations");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    fail(ErrorKind::DegenerateInput, "correlation undefined for constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    fail(ErrorKind::ShapeError, "spearman: lengths " + std::to_string(xs.size()) + " and " +
                                    std::to_string(ys.size()));
  }
  if (xs.size() < 2) fail(ErrorKind::ShapeError, "spearman: need at least 2 observations");
  const Vec64 rx = rank_transform(xs);
  const Vec64 ry = rank_transform(ys);
  return pearson(rx.span(), ry.span());
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::ShapeError, "cosine_similarity: length mismatch");
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) fail(ErrorKind::ZeroVector, "cosine_similarity: zero-norm operand");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double shannon_entropy(std::span<const double> samples, std::size_t bins, EntropyBase base) {
  if (samples.empty()) fail(ErrorKind::EmptyInput, "shannon_entropy: no samples");
  if (bins < 2) fail(ErrorKind::DomainError, "shannon_entropy: bins must be >= 2");
  require_finite(samples, "shannon_entropy");

  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) return 0.0;

  std::vector<std::size_t> counts(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double x : samples) {
    auto cell = static_cast<std::size_t>((x - lo) * scale);
    counts[std::min(cell, bins - 1)] += 1;
  }

  const double total = static_cast<double>(samples.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return base == EntropyBase::bits ? h / std::log(2.0) : h;
}

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorKind::ShapeError, "fit_slope: length mismatch");
  if (xs.size() < 2) fail(ErrorKind::ShapeError, "fit_slope: need at least 2 points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) fail(ErrorKind::DegenerateInput, "fit_slope: x values are all equal");
  return sxy / sxx;
}

double fit_exp_decay(std::span<const double> series) {
  if (series.size() < 2) fail(ErrorKind::ShapeError, "fit_exp_decay: need at least 2 points");
  std::vector<double> xs(series.size());
  std::vector<double> ys(series.size());
  for (std::size_t l = 0; l < series.size(); ++l) {
    if (!(series[l] > 0.0) || !std::isfinite(series[l])) {
      fail(ErrorKind::DomainError,
           "fit_exp_decay: entry " + std::to_string(l) + " is not a positive finite number");
    }
    xs[l] = static_cast<double>(l);
    ys[l] = -std::log(series[l]);
  }
  return fit_slope(xs, ys);
}

Vec64 softmax(std::span<const double> v) {
  if (v.empty()) fail(ErrorKind::EmptyInput, "softmax: empty input");
  require_finite(v, "softmax");
  const double top = *std::max_element(v.begin(), v.end());
  Vec64 out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - top);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

}  // namespace rwkvlab
