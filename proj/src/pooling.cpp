// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/pooling.hpp"

#include <algorithm>
#include <cmath>

#include "rwkvlab/error.hpp"
#include "rwkvlab/rng.hpp"

namespace rwkvlab {

std::string_view to_string(PoolKind kind) {
  switch (kind) {
    case PoolKind::average: return "average";
    case PoolKind::max: return "max";
    case PoolKind::last_token: return "last";
    case PoolKind::adaptive: return "adaptive";
  }
  return "average";
}

PoolKind parse_pool_kind(std::string_view name) {
  if (name == "average") return PoolKind::average;
  if (name == "max") return PoolKind::max;
  if (name == "last" || name == "last_token") return PoolKind::last_token;
  if (name == "adaptive") return PoolKind::adaptive;
  fail(ErrorKind::ConfigError, "unknown pooling strategy '" + std::string(name) + "'");
}

PoolResult pool(const Mat64& h, const PoolStrategy& strategy) {
  if (h.rows() == 0 || h.cols() == 0) fail(ErrorKind::EmptyInput, "pool: empty token matrix");
  const std::size_t n = h.rows();
  const std::size_t d = h.cols();
  PoolResult result{Vec64(d), std::nullopt};
  Vec64& out = result.vector;

  switch (strategy.kind) {
    case PoolKind::average: {
      for (std::size_t t = 0; t < n; ++t)
        for (std::size_t c = 0; c < d; ++c) out[c] += h(t, c);
      for (double& x : out) x /= static_cast<double>(n);
      break;
    }
    case PoolKind::max: {
      out = h.row_vec(0);
      for (std::size_t t = 1; t < n; ++t)
        for (std::size_t c = 0; c < d; ++c) out[c] = std::max(out[c], h(t, c));
      break;
    }
    case PoolKind::last_token: {
      out = h.row_vec(n - 1);
      break;
    }
    case PoolKind::adaptive: {
      if (!strategy.query) fail(ErrorKind::ConfigError, "adaptive pooling needs a query vector");
      const Vec64& q = *strategy.query;
      if (q.size() != d) fail(ErrorKind::ShapeError, "adaptive pooling: query width mismatch");
      Vec64 scores(n);
      for (std::size_t t = 0; t < n; ++t) scores[t] = dot(h.row(t), q.span());
      const double top = *std::max_element(scores.begin(), scores.end());
      double total = 0.0;
      for (double& s : scores) {
        s = std::exp(s - top);
        total += s;
      }
      for (std::size_t t = 0; t < n; ++t)
        for (std::size_t c = 0; c < d; ++c) out[c] += scores[t] * h(t, c);
      for (double& x : out) x /= total;
      for (double& s : scores) s /= total;
      result.weights = std::move(scores);
      break;
    }
  }
  return result;
}

Vec64 random_query(std::size_t d, std::uint64_t seed) {
  SeededRng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Vec64 q(d);
  for (double& x : q) x = scale * rng.normal();
  return q;
}

double snr_estimate(const SnrSpec& spec) {
  if (spec.tokens == 0) fail(ErrorKind::DomainError, "snr_estimate: token count must be >= 1");
  if (spec.signal_norm_sq < 0.0) fail(ErrorKind::DomainError, "snr_estimate: negative signal");
  if (!(spec.noise_var > 0.0)) fail(ErrorKind::DomainError, "snr_estimate: noise_var must be > 0");
  return static_cast<double>(spec.tokens) * spec.signal_norm_sq / spec.noise_var;
}

}  // namespace rwkvlab
