// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "rwkvlab/error.hpp"

namespace rwkvlab::kernels {
namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = std::size_t{1} << 15;

using Index = std::ptrdiff_t;

// 64 doubles: whole cache lines per thread in the channel-parallel scan.
constexpr std::size_t kChannelBlock = 64;

}  // namespace

Mat64 project_rows(const Mat64& x, const Mat64& w) {
  if (x.cols() != w.cols()) fail(ErrorKind::ShapeError, "project_rows: width mismatch");
  const std::size_t n = x.rows();
  const std::size_t d_out = w.rows();
  const std::size_t d_in = w.cols();
  Mat64 y(n, d_out);
  [[maybe_unused]] const bool big = n * d_out * d_in >= kParallelWork;

#pragma omp parallel for schedule(static) if (big)
  for (Index t = 0; t < static_cast<Index>(n); ++t) {
    const auto xt = x.row(t);
    auto yt = y.row(t);
    for (std::size_t i = 0; i < d_out; ++i) {
      const auto wi = w.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < d_in; ++j) s += wi[j] * xt[j];
      yt[i] = s;
    }
  }
  return y;
}

void wkv_scan(const Mat64& r, const Mat64& k, const Mat64& v, std::span<const double> decay,
              std::span<const double> bonus, std::span<double> num, std::span<double> den,
              Mat64& out) {
  const std::size_t n = r.rows();
  const std::size_t d = r.cols();
  [[maybe_unused]] const bool big = n * d >= kParallelWork;

  // Channels are independent; each one is a strictly sequential scan. Each
  // thread takes one contiguous channel range and walks it row by row, so a
  // single thread traverses memory exactly like the serial loop.
#pragma omp parallel if (big)
  {
    std::size_t c0 = 0, c1 = d;
#ifdef _OPENMP
    const auto parts = static_cast<std::size_t>(omp_get_num_threads());
    const auto id = static_cast<std::size_t>(omp_get_thread_num());
    // split on kChannelBlock boundaries so threads never share a cache line
    const std::size_t blocks = (d + kChannelBlock - 1) / kChannelBlock;
    c0 = std::min(d, blocks * id / parts * kChannelBlock);
    c1 = std::min(d, blocks * (id + 1) / parts * kChannelBlock);
#endif
    for (std::size_t t = 0; t < n && c0 < c1; ++t) {
      const double* rt = r.row(t).data();
      const double* kt = k.row(t).data();
      const double* vt = v.row(t).data();
      double* ot = out.row(t).data();
      for (std::size_t c = c0; c < c1; ++c) {
        const double kv = kt[c] * vt[c];
        ot[c] = (num[c] + bonus[c] * kv) / (den[c] + bonus[c] * rt[c]);
        num[c] = decay[c] * num[c] + kv;
        den[c] = decay[c] * den[c] + rt[c];
      }
    }
  }
}

Mat64 causal_attention(const Mat64& q, const Mat64& k, const Mat64& v) {
  if (q.cols() != k.cols() || q.rows() != k.rows() || k.rows() != v.rows()) {
    fail(ErrorKind::ShapeError, "causal_attention: Q, K, V are not conformable");
  }
  const std::size_t n = q.rows();
  const std::size_t dk = q.cols();
  const std::size_t dv = v.cols();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Mat64 out(n, dv);
  [[maybe_unused]] const bool big = n * n * (dk + dv) / 2 >= kParallelWork;

#pragma omp parallel if (big)
  {
    std::vector<double> weights(n);
#pragma omp for schedule(dynamic, 16)
    for (Index ti = 0; ti < static_cast<Index>(n); ++ti) {
      const auto t = static_cast<std::size_t>(ti);
      const auto qt = q.row(t);
      double top = -INFINITY;
      for (std::size_t j = 0; j <= t; ++j) {
        const auto kj = k.row(j);
        double s = 0.0;
        for (std::size_t c = 0; c < dk; ++c) s += qt[c] * kj[c];
        weights[j] = s * scale;
        top = std::max(top, weights[j]);
      }
      double total = 0.0;
      for (std::size_t j = 0; j <= t; ++j) {
        weights[j] = std::exp(weights[j] - top);
        total += weights[j];
      }
      auto ot = out.row(t);
      for (std::size_t j = 0; j <= t; ++j) {
        const auto vj = v.row(j);
        for (std::size_t c = 0; c < dv; ++c) ot[c] += weights[j] * vj[c];
      }
      for (std::size_t c = 0; c < dv; ++c) ot[c] /= total;
    }
  }
  return out;
}

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

ScopedThreads::ScopedThreads(int threads) : previous_(max_threads()) {
#if defined(_OPENMP)
  omp_set_num_threads(std::max(1, threads));
#else
  (void)threads;
#endif
}

ScopedThreads::~ScopedThreads() {
#if defined(_OPENMP)
  omp_set_num_threads(previous_);
#endif
}

}  // namespace rwkvlab::kernels
