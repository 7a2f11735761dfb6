// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Diagnostics over a model: entropy per layer, gradient-norm decay with
// depth, Jacobian diagonality, singular-value decay, a causal softmax
// attention reference and the length-scaling benchmark.
//
// The probe loss for gradient profiles is fixed: L = sum of squares of the
// final hidden states, so dL/dH^L = 2 H^L.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwkvlab/encoder.hpp"
#include "rwkvlab/model.hpp"
#include "rwkvlab/pairs.hpp"
#include "rwkvlab/tensor.hpp"

namespace rwkvlab {

// One entropy (bits) per layer; each pools every token x channel activation
// of that layer across all traces. EmptyInput for no traces, ShapeError when
// layer counts differ.
Vec64 entropy_curve(std::span<const LayerTrace> traces, std::size_t bins = 64);

struct GradientProfile {
  Vec64 norms;  // norms[l-1] = ||dL/dH^{l-1}||_F, l = 1..L
  double alpha = 0.0;
};

// Reverse accumulation through the stack. ShapeError for fewer than 2 tokens.
GradientProfile gradient_decay_profile(const RwkvParams& params, std::span<const TokenId> tokens);

// Fits ||dL/dH^{l-1}|| ~ exp(-alpha (L - l)) to norms given in layer order.
double fit_gradient_alpha(std::span<const double> norms);

inline constexpr std::size_t kMaxJacobianDim = 32;
inline constexpr double kJacobianStep = 1e-5;

using VectorMap = std::function<Vec64(const Vec64&)>;

// Central-difference Jacobian, column by column. SizeLimit when the input or
// output width exceeds kMaxJacobianDim.
Mat64 finite_difference_jacobian(const VectorMap& f, const Vec64& x,
                                 double step = kJacobianStep);

// sum |offdiag| / sum |diag| of a square matrix. DegenerateInput when the
// diagonal is all zero.
double diagonality_ratio(const Mat64& jacobian);

double jacobian_diagonality(const VectorMap& f, const Vec64& x, double step = kJacobianStep);

// Layer l (1-based) applied to `context` (n x d, the layer input); the
// Jacobian is taken of the final-token output with respect to the final-token
// input, earlier rows held fixed.
double jacobian_diagonality(const RwkvParams& params, std::size_t layer, const Mat64& context,
                            double step = kJacobianStep);

// Single-token context.
double jacobian_diagonality(const RwkvParams& params, std::size_t layer, const Vec64& x,
                            double step = kJacobianStep);

// softmax(Q K^T / sqrt(d)) V with a causal mask; O(n^2 d).
Mat64 attention_reference(const Mat64& q, const Mat64& k, const Mat64& v);

inline constexpr double kSpectrumCutoff = 1e-12;

// fit_exp_decay over singular values / sigma_max, dropping entries below
// kSpectrumCutoff. DegenerateInput for a rank-0 matrix or when fewer than two
// values survive the cutoff.
double sv_decay_rate(const Mat64& m);

inline constexpr std::size_t kMaxScalingLength = 4096;

struct ScalingResult {
  std::vector<std::size_t> lengths;
  std::vector<double> recurrent_seconds;  // median of 5, per length
  std::vector<double> attention_seconds;
  double recurrent_exponent = 0.0;
  double attention_exponent = 0.0;
};

// Times wkv_recurrent (layer 1 parameters) against attention_reference on
// seeded inputs at d = d_model, pinned to one thread. Exponents are log-log
// slopes over the upper half of the lengths. SizeLimit unless there are at
// least 4 strictly increasing lengths, the largest <= kMaxScalingLength and
// d_model <= 32.
ScalingResult scaling_benchmark(const RwkvParams& params, std::span<const std::size_t> lengths,
                                std::uint64_t seed = 42);

struct QuerySeedScore {
  std::uint64_t seed = 0;
  double spearman = 0.0;
};

// Adaptive pooling of one layer under a seeded random query per seed.
std::vector<QuerySeedScore> query_seed_sweep(const RwkvParams& params,
                                             std::span<const SentencePairRecord> records,
                                             std::size_t layer,
                                             std::span<const std::uint64_t> seeds);

struct DiagnosticsProfile {
  Vec64 entropy;         // per layer, bits
  Vec64 gradient_norms;  // per layer input
  double alpha = 0.0;
  Vec64 diagonality;     // per layer
  std::map<std::string, double> sv_decay;  // matrix name -> rate
  std::map<std::string, double> scaling;   // form -> exponent
  std::vector<QuerySeedScore> query_sweep;
  std::optional<ScalingResult> scaling_run;  // raw timings behind `scaling`
};

struct DiagnosticsOptions {
  std::vector<std::string> sentences;
  std::size_t bins = 64;
  std::uint64_t seed = 42;
  std::vector<std::size_t> scaling_lengths;  // empty: skip the benchmark
  std::vector<SentencePairRecord> sweep_records;  // empty: skip the query sweep
  std::size_t sweep_layer = 1;
  std::vector<std::uint64_t> query_seeds;
};

// Sentences are profiled in a canonical (sorted) order, so the result does not
// depend on their input order. Gradient norms are averaged over sentences with
// at least two tokens; diagonality uses the first such sentence.
DiagnosticsProfile build_profile(const RwkvParams& params, const DiagnosticsOptions& options);

std::string profile_to_json(const DiagnosticsProfile& profile);

// entropy.csv, gradient_norms.csv, diagonality.csv, sv_decay.csv and, when
// present, scaling.csv and query_sweep.csv.
void write_profile_csvs(const DiagnosticsProfile& profile, const std::string& dir);

}  // namespace rwkvlab
