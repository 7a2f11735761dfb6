// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/model.hpp"

#include <cmath>
#include <string>
#include <type_traits>

#include "rwkvlab/error.hpp"
#include "rwkvlab/rng.hpp"

namespace rwkvlab {
namespace {

constexpr double kLambdaLo = 0.1;
constexpr double kLambdaHi = 3.0;

Mat64 uniform_matrix(SeededRng& rng, std::size_t rows, std::size_t cols, double bound) {
  Mat64 m(rows, cols);
  for (double& x : m.span()) x = rng.uniform(-bound, bound);
  return m;
}

Vec64 decay_ramp(std::size_t d) {
  Vec64 lambda(d, kLambdaLo);
  if (d > 1) {
    for (std::size_t c = 0; c < d; ++c) {
      lambda[c] = kLambdaLo + (kLambdaHi - kLambdaLo) * static_cast<double>(c) /
                                  static_cast<double>(d - 1);
    }
  }
  return lambda;
}

RwkvParams build(const ModelConfig& config, bool zero_projections) {
  config.validate();
  const std::size_t d = config.d_model;
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  SeededRng rng(config.seed);
  auto proj = [&]() {
    return zero_projections ? Mat64(d, d) : uniform_matrix(rng, d, d, bound);
  };

  RwkvParams p;
  p.config = config;
  p.token_embedding = uniform_matrix(rng, config.vocab_size, d, 1.0);
  p.ln0_gain = Vec64(d, 1.0);
  p.ln0_bias = Vec64(d, 0.0);
  p.layers.resize(config.n_layers);
  for (auto& layer : p.layers) {
    layer.ln1_gain = Vec64(d, 1.0);
    layer.ln1_bias = Vec64(d, 0.0);
    auto& tm = layer.time_mix;
    tm.w_r = proj();
    tm.w_k = proj();
    tm.w_v = proj();
    tm.w_o = proj();
    tm.lambda = decay_ramp(d);
    tm.u = Vec64(d, 0.0);
    tm.mu_r = Vec64(d, 0.5);
    tm.mu_k = Vec64(d, 0.5);
    tm.mu_v = Vec64(d, 0.5);
    layer.ln2_gain = Vec64(d, 1.0);
    layer.ln2_bias = Vec64(d, 0.0);
    auto& cm = layer.channel_mix;
    cm.w_r = proj();
    cm.w_k = proj();
    cm.w_v = proj();
    cm.mu = Vec64(d, 0.5);
  }
  return p;
}

void expect_vec(const Vec64& v, std::size_t d, const std::string& name) {
  if (v.size() != d) fail(ErrorKind::ShapeError, name + ": expected length " + std::to_string(d));
}

void expect_mat(const Mat64& m, std::size_t rows, std::size_t cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(ErrorKind::ShapeError,
         name + ": expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void expect_unit_interval(const Vec64& v, const std::string& name) {
  for (double x : v)
    if (x < 0.0 || x > 1.0) fail(ErrorKind::DomainError, name + ": entries must lie in [0, 1]");
}

}  // namespace

void ModelConfig::validate() const {
  if (d_model == 0) fail(ErrorKind::ConfigError, "d_model must be >= 1");
  if (n_layers == 0) fail(ErrorKind::ConfigError, "n_layers must be >= 1");
  if (vocab_size == 0) fail(ErrorKind::ConfigError, "vocab_size must be >= 1");
}

RwkvParams init_model(const ModelConfig& config) { return build(config, false); }

RwkvParams zero_weight_model(const ModelConfig& config) { return build(config, true); }

void validate_params(const RwkvParams& p) {
  p.config.validate();
  const std::size_t d = p.config.d_model;
  if (p.layers.size() != p.config.n_layers) {
    fail(ErrorKind::ShapeError, "layer count does not match config.n_layers");
  }
  expect_mat(p.token_embedding, p.config.vocab_size, d, "token_embedding");
  for_each_tensor(p, [&](const std::string& name, const auto& t) {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Vec64>) {
      expect_vec(t, d, name);
    } else if (name != "token_embedding") {
      expect_mat(t, d, d, name);
    }
  });
  for (const auto& layer : p.layers) {
    for (double x : layer.time_mix.lambda)
      if (x < 0.0) fail(ErrorKind::DomainError, "time_mix.lambda entries must be >= 0");
    expect_unit_interval(layer.time_mix.mu_r, "time_mix.mu_r");
    expect_unit_interval(layer.time_mix.mu_k, "time_mix.mu_k");
    expect_unit_interval(layer.time_mix.mu_v, "time_mix.mu_v");
    expect_unit_interval(layer.channel_mix.mu, "channel_mix.mu");
  }
}

}  // namespace rwkvlab
