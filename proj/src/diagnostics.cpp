// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <type_traits>

#include "json.hpp"

#include "rwkvlab/blocks.hpp"
#include "rwkvlab/error.hpp"
#include "rwkvlab/harness.hpp"
#include "rwkvlab/kernels.hpp"
#include "rwkvlab/linalg.hpp"
#include "rwkvlab/pooling.hpp"
#include "rwkvlab/rng.hpp"
#include "rwkvlab/stats.hpp"
#include "rwkvlab/wkv.hpp"

namespace rwkvlab {
namespace {

using Clock = std::chrono::steady_clock;

Mat64 scaled(const Mat64& m, double f) {
  Mat64 out = m;
  for (double& x : out.span()) x *= f;
  return out;
}

Mat64 random_matrix(SeededRng& rng, std::size_t rows, std::size_t cols) {
  Mat64 m(rows, cols);
  for (double& x : m.span()) x = rng.normal();
  return m;
}

// Seconds per call: calibrate a repetition count worth >= 2 ms, then the
// median of five such batches.
template <class Fn>
double median_seconds(Fn&& fn) {
  constexpr double kMinBatch = 2e-3;
  std::size_t reps = 1;
  for (;;) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < reps; ++i) fn();
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (s >= kMinBatch || reps >= (1u << 20)) break;
    reps *= 2;
  }
  std::vector<double> samples;
  for (int k = 0; k < 5; ++k) {
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < reps; ++i) fn();
    samples.push_back(std::chrono::duration<double>(Clock::now() - t0).count() /
                      static_cast<double>(reps));
  }
  std::nth_element(samples.begin(), samples.begin() + 2, samples.end());
  return samples[2];
}

double upper_half_exponent(std::span<const std::size_t> lengths, std::span<const double> secs) {
  const std::size_t m = lengths.size();
  const std::size_t start = m / 2;  // last ceil(m/2) points
  std::vector<double> xs, ys;
  for (std::size_t i = start; i < m; ++i) {
    xs.push_back(std::log(static_cast<double>(lengths[i])));
    ys.push_back(std::log(secs[i]));
  }
  return fit_slope(xs, ys);
}

}  // namespace

Vec64 entropy_curve(std::span<const LayerTrace> traces, std::size_t bins) {
  if (traces.empty()) fail(ErrorKind::EmptyInput, "entropy_curve: no traces");
  const std::size_t layers = traces.front().layer_count();
  for (const auto& t : traces) {
    if (t.layer_count() != layers) fail(ErrorKind::ShapeError, "entropy_curve: layer counts differ");
  }
  Vec64 out(layers);
  for (std::size_t l = 1; l <= layers; ++l) {
    std::vector<double> pooled;
    for (const auto& t : traces) {
      const auto s = t.layer(l).span();
      pooled.insert(pooled.end(), s.begin(), s.end());
    }
    out[l - 1] = shannon_entropy_bits(pooled, bins);
  }
  return out;
}

double fit_gradient_alpha(std::span<const double> norms) {
  // Order by distance from the output: entry j is layer input L-1-j.
  std::vector<double> by_depth(norms.rbegin(), norms.rend());
  return fit_exp_decay(by_depth);
}

GradientProfile gradient_decay_profile(const RwkvParams& params, std::span<const TokenId> tokens) {
  if (tokens.size() < 2) fail(ErrorKind::ShapeError, "gradient profile needs at least 2 tokens");
  const LayerTrace trace = encode(params, tokens);
  const std::size_t n_layers = trace.layer_count();
  const bool normalize = params.config.layer_norm;

  GradientProfile out;
  out.norms = Vec64(n_layers);
  Mat64 grad = scaled(trace.hidden.back(), 2.0);
  for (std::size_t l = n_layers; l >= 1; --l) {
    const Mat64& input = l == 1 ? trace.embedded : trace.hidden[l - 2];
    grad = layer_backward(params.layers[l - 1], input, normalize, grad);
    out.norms[l - 1] = frobenius_norm(grad);
  }
  out.alpha = fit_gradient_alpha(out.norms.span());
  return out;
}

Mat64 finite_difference_jacobian(const VectorMap& f, const Vec64& x, double step) {
  if (x.size() > kMaxJacobianDim) {
    fail(ErrorKind::SizeLimit, "Jacobian input width " + std::to_string(x.size()) + " > " +
                                   std::to_string(kMaxJacobianDim));
  }
  if (x.empty()) fail(ErrorKind::EmptyInput, "Jacobian of an empty input");
  Mat64 jac;
  for (std::size_t j = 0; j < x.size(); ++j) {
    Vec64 plus = x, minus = x;
    plus[j] += step;
    minus[j] -= step;
    const Vec64 fp = f(plus);
    const Vec64 fm = f(minus);
    if (j == 0) {
      if (fp.size() > kMaxJacobianDim) fail(ErrorKind::SizeLimit, "Jacobian output too wide");
      jac = Mat64(fp.size(), x.size());
    }
    for (std::size_t i = 0; i < fp.size(); ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * step);
  }
  return jac;
}

double diagonality_ratio(const Mat64& jacobian) {
  if (jacobian.rows() != jacobian.cols() || jacobian.empty()) {
    fail(ErrorKind::ShapeError, "diagonality_ratio needs a non-empty square matrix");
  }
  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < jacobian.rows(); ++i) {
    for (std::size_t j = 0; j < jacobian.cols(); ++j) {
      (i == j ? diag : off) += std::abs(jacobian(i, j));
    }
  }
  if (diag == 0.0) fail(ErrorKind::DegenerateInput, "Jacobian diagonal is all zero");
  return off / diag;
}

double jacobian_diagonality(const VectorMap& f, const Vec64& x, double step) {
  return diagonality_ratio(finite_difference_jacobian(f, x, step));
}

double jacobian_diagonality(const RwkvParams& params, std::size_t layer, const Mat64& context,
                            double step) {
  if (layer == 0 || layer > params.layers.size()) {
    fail(ErrorKind::ConfigError, "layer " + std::to_string(layer) + " out of range");
  }
  if (context.rows() == 0 || context.cols() != params.config.d_model) {
    fail(ErrorKind::ShapeError, "Jacobian context must be n x d_model with n >= 1");
  }
  if (context.cols() > kMaxJacobianDim) {
    fail(ErrorKind::SizeLimit, "Jacobian diagonality needs d_model <= " +
                                   std::to_string(kMaxJacobianDim));
  }
  const std::size_t last = context.rows() - 1;
  const LayerParams& lp = params.layers[layer - 1];
  const bool normalize = params.config.layer_norm;
  const VectorMap f = [&](const Vec64& x) {
    Mat64 h = context;
    h.set_row(last, x.span());
    return layer_forward(lp, h, normalize).row_vec(last);
  };
  return jacobian_diagonality(f, context.row_vec(last), step);
}

double jacobian_diagonality(const RwkvParams& params, std::size_t layer, const Vec64& x,
                            double step) {
  return jacobian_diagonality(params, layer, Mat64(1, x.size(), x.span()), step);
}

Mat64 attention_reference(const Mat64& q, const Mat64& k, const Mat64& v) {
  return kernels::causal_attention(q, k, v);
}

double sv_decay_rate(const Mat64& m) {
  const Vec64 sv = singular_values(m);
  const double top = sv.empty() ? 0.0 : sv[0];
  if (!(top > 0.0)) fail(ErrorKind::DegenerateInput, "sv_decay_rate: rank-0 matrix");
  std::vector<double> kept;
  for (double s : sv) {
    if (s >= kSpectrumCutoff * top) kept.push_back(s / top);
  }
  if (kept.size() < 2) {
    fail(ErrorKind::DegenerateInput, "sv_decay_rate: fewer than 2 singular values above cutoff");
  }
  return fit_exp_decay(kept);
}

ScalingResult scaling_benchmark(const RwkvParams& params, std::span<const std::size_t> lengths,
                                std::uint64_t seed) {
  if (lengths.size() < 4) fail(ErrorKind::SizeLimit, "scaling benchmark needs >= 4 lengths");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] == 0 || (i > 0 && lengths[i] <= lengths[i - 1])) {
      fail(ErrorKind::SizeLimit, "scaling lengths must be positive and strictly increasing");
    }
  }
  if (lengths.back() > kMaxScalingLength) {
    fail(ErrorKind::SizeLimit, "scaling length " + std::to_string(lengths.back()) + " > " +
                                   std::to_string(kMaxScalingLength));
  }
  const std::size_t d = params.config.d_model;
  if (d > 32) fail(ErrorKind::SizeLimit, "scaling benchmark needs d_model <= 32");
  if (params.layers.empty()) fail(ErrorKind::ConfigError, "model has no layers");
  const TimeMixParams& tm = params.layers.front().time_mix;

  const kernels::ScopedThreads pinned(1);
  ScalingResult out;
  out.lengths.assign(lengths.begin(), lengths.end());
  volatile double sink = 0.0;
  for (std::size_t n : lengths) {
    SeededRng rng(seed ^ n);
    Mat64 r(n, d);
    for (double& x : r.span()) x = rng.uniform(0.05, 0.95);
    const Mat64 k = random_matrix(rng, n, d);
    const Mat64 v = random_matrix(rng, n, d);
    const Mat64 q = random_matrix(rng, n, d);

    out.recurrent_seconds.push_back(median_seconds([&] {
      sink = sink + wkv_recurrent(tm, r, k, v).out(n - 1, 0);
    }));
    out.attention_seconds.push_back(median_seconds([&] {
      sink = sink + attention_reference(q, k, v)(n - 1, 0);
    }));
  }
  out.recurrent_exponent = upper_half_exponent(out.lengths, out.recurrent_seconds);
  out.attention_exponent = upper_half_exponent(out.lengths, out.attention_seconds);
  return out;
}

std::vector<QuerySeedScore> query_seed_sweep(const RwkvParams& params,
                                             std::span<const SentencePairRecord> records,
                                             std::size_t layer,
                                             std::span<const std::uint64_t> seeds) {
  std::vector<QuerySeedScore> out;
  const std::size_t layers[] = {layer};
  SweepOptions options;
  options.track_memory = false;
  for (std::uint64_t seed : seeds) {
    const auto strategy = PoolStrategy::adaptive(random_query(params.config.d_model, seed));
    options.seed = seed;
    const EvalReport report = layer_sweep(params, records, layers, strategy, {}, options);
    out.push_back({seed, report.rows.front().spearman});
  }
  return out;
}

DiagnosticsProfile build_profile(const RwkvParams& params, const DiagnosticsOptions& options) {
  if (options.sentences.empty()) fail(ErrorKind::EmptyInput, "diagnostics: no sentences");
  const HashingTokenizer tokenizer(params.config.vocab_size);
  std::vector<std::vector<TokenId>> token_lists;
  for (const auto& s : options.sentences) {
    auto ids = tokenizer(s);
    if (!ids.empty()) token_lists.push_back(std::move(ids));
  }
  if (token_lists.empty()) fail(ErrorKind::EmptyInput, "diagnostics: every sentence is empty");
  std::sort(token_lists.begin(), token_lists.end());

  DiagnosticsProfile profile;
  std::vector<LayerTrace> traces;
  traces.reserve(token_lists.size());
  for (const auto& ids : token_lists) traces.push_back(encode(params, ids));
  profile.entropy = entropy_curve(traces, options.bins);

  const std::size_t n_layers = params.layers.size();
  profile.gradient_norms = Vec64(n_layers);
  std::size_t profiled = 0;
  const LayerTrace* first = nullptr;
  for (std::size_t s = 0; s < token_lists.size(); ++s) {
    if (token_lists[s].size() < 2) continue;
    if (first == nullptr) first = &traces[s];
    const GradientProfile g = gradient_decay_profile(params, token_lists[s]);
    for (std::size_t l = 0; l < n_layers; ++l) profile.gradient_norms[l] += g.norms[l];
    ++profiled;
  }
  if (profiled == 0) fail(ErrorKind::ShapeError, "diagnostics: no sentence has 2+ tokens");
  for (double& x : profile.gradient_norms) x /= static_cast<double>(profiled);
  profile.alpha = fit_gradient_alpha(profile.gradient_norms.span());

  profile.diagonality = Vec64(n_layers);
  for (std::size_t l = 1; l <= n_layers; ++l) {
    const Mat64& input = l == 1 ? first->embedded : first->layer(l - 1);
    profile.diagonality[l - 1] = jacobian_diagonality(params, l, input);
  }

  for_each_tensor(params, [&](const std::string& name, const auto& tensor) {
    if constexpr (std::is_same_v<std::decay_t<decltype(tensor)>, Mat64>) {
      if (name.rfind("layers.", 0) != 0) return;
      try {
        profile.sv_decay[name] = sv_decay_rate(tensor);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateInput) throw;  // e.g. zeroed projections
      }
    }
  });
  {
    const std::size_t d = params.config.d_model;
    SeededRng rng(options.seed);
    profile.sv_decay["gaussian_reference"] =
        sv_decay_rate(scaled(random_matrix(rng, d, d), 1.0 / std::sqrt(static_cast<double>(d))));
  }

  if (!options.scaling_lengths.empty()) {
    ScalingResult run = scaling_benchmark(params, options.scaling_lengths, options.seed);
    profile.scaling["recurrent"] = run.recurrent_exponent;
    profile.scaling["attention"] = run.attention_exponent;
    profile.scaling_run = std::move(run);
  }
  if (!options.sweep_records.empty() && !options.query_seeds.empty()) {
    profile.query_sweep =
        query_seed_sweep(params, options.sweep_records, options.sweep_layer, options.query_seeds);
  }
  return profile;
}

std::string profile_to_json(const DiagnosticsProfile& p) {
  using nlohmann::json;
  json doc = {{"entropy_bits", p.entropy.to_vector()},
              {"gradient_norms", p.gradient_norms.to_vector()},
              {"alpha", p.alpha},
              {"diagonality", p.diagonality.to_vector()},
              {"sv_decay", p.sv_decay},
              {"scaling_exponents", p.scaling}};
  if (p.scaling_run) {
    doc["scaling_timings"] = {{"lengths", p.scaling_run->lengths},
                              {"recurrent_seconds", p.scaling_run->recurrent_seconds},
                              {"attention_seconds", p.scaling_run->attention_seconds}};
  }
  if (!p.query_sweep.empty()) {
    json rows = json::array();
    for (const auto& q : p.query_sweep) rows.push_back({{"seed", q.seed}, {"spearman", q.spearman}});
    doc["query_seed_sweep"] = rows;
  }
  return doc.dump(2) + "\n";
}

void write_profile_csvs(const DiagnosticsProfile& p, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::ConfigError, "cannot create output directory '" + dir + "'");
  const auto open = [&](const char* name) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) fail(ErrorKind::ConfigError, "cannot write '" + path + "'");
    out.precision(17);
    return out;
  };
  const auto per_layer = [&](const char* name, const char* column, const Vec64& values) {
    auto out = open(name);
    out << "layer," << column << "\n";
    for (std::size_t l = 0; l < values.size(); ++l) out << l + 1 << "," << values[l] << "\n";
  };
  per_layer("entropy.csv", "entropy_bits", p.entropy);
  per_layer("gradient_norms.csv", "gradient_norm", p.gradient_norms);
  per_layer("diagonality.csv", "diagonality_ratio", p.diagonality);
  {
    auto out = open("sv_decay.csv");
    out << "matrix,decay_rate\n";
    for (const auto& [name, rate] : p.sv_decay) out << name << "," << rate << "\n";
  }
  if (p.scaling_run) {
    auto out = open("scaling.csv");
    out << "n,recurrent_seconds,attention_seconds\n";
    const auto& s = *p.scaling_run;
    for (std::size_t i = 0; i < s.lengths.size(); ++i) {
      out << s.lengths[i] << "," << s.recurrent_seconds[i] << "," << s.attention_seconds[i] << "\n";
    }
  }
  if (!p.query_sweep.empty()) {
    auto out = open("query_sweep.csv");
    out << "seed,spearman\n";
    for (const auto& q : p.query_sweep) out << q.seed << "," << q.spearman << "\n";
  }
}

}  // namespace rwkvlab
