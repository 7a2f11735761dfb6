// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// OpenMP-parallel hot loops. Each kernel has a serial twin in reference.hpp
// that performs the same per-element arithmetic in the same order, so the two
// agree bitwise for any thread count. Parallel regions are skipped below a
// work threshold where fork/join would dominate.

#pragma once

#include <cstddef>
#include <span>

#include "rwkvlab/tensor.hpp"

namespace rwkvlab::kernels {

// Y(t, :) = W x_t for each row x_t of X. X is n x d_in, W is d_out x d_in.
Mat64 project_rows(const Mat64& x, const Mat64& w);

// Per-channel WKV scan over n tokens. `num`/`den` hold the carried state on
// entry and the final state on exit. `decay` = exp(-lambda), `bonus` = exp(u).
void wkv_scan(const Mat64& r, const Mat64& k, const Mat64& v, std::span<const double> decay,
              std::span<const double> bonus, std::span<double> num, std::span<double> den,
              Mat64& out);

// Causal softmax(Q K^T / sqrt(d)) V, one output row per query row.
Mat64 causal_attention(const Mat64& q, const Mat64& k, const Mat64& v);

// Worker count used by parallel regions (1 when built without OpenMP).
int max_threads();

// Pins the OpenMP team size for the lifetime of the guard.
class ScopedThreads {
 public:
  explicit ScopedThreads(int threads);
  ~ScopedThreads();
  ScopedThreads(const ScopedThreads&) = delete;
  ScopedThreads& operator=(const ScopedThreads&) = delete;

 private:
  int previous_;
};

}  // namespace rwkvlab::kernels
