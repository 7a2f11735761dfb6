// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rwkvlab/error.hpp"

namespace rwkvlab::reference {

Mat64 project_rows(const Mat64& x, const Mat64& w) {
  if (x.cols() != w.cols()) fail(ErrorKind::ShapeError, "project_rows: width mismatch");
  Mat64 y(x.rows(), w.rows());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < w.cols(); ++j) s += w(i, j) * x(t, j);
      y(t, i) = s;
    }
  }
  return y;
}

void wkv_scan(const Mat64& r, const Mat64& k, const Mat64& v, std::span<const double> decay,
              std::span<const double> bonus, std::span<double> num, std::span<double> den,
              Mat64& out) {
  for (std::size_t t = 0; t < r.rows(); ++t) {
    for (std::size_t c = 0; c < r.cols(); ++c) {
      const double kv = k(t, c) * v(t, c);
      const double rt = r(t, c);
      out(t, c) = (num[c] + bonus[c] * kv) / (den[c] + bonus[c] * rt);
      num[c] = decay[c] * num[c] + kv;
      den[c] = decay[c] * den[c] + rt;
    }
  }
}

Mat64 causal_attention(const Mat64& q, const Mat64& k, const Mat64& v) {
  if (q.cols() != k.cols() || q.rows() != k.rows() || k.rows() != v.rows()) {
    fail(ErrorKind::ShapeError, "causal_attention: Q, K, V are not conformable");
  }
  const std::size_t n = q.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  Mat64 out(n, v.cols());
  std::vector<double> weights(n);
  for (std::size_t t = 0; t < n; ++t) {
    double top = -INFINITY;
    for (std::size_t j = 0; j <= t; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < q.cols(); ++c) s += q(t, c) * k(j, c);
      weights[j] = s * scale;
      top = std::max(top, weights[j]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j <= t; ++j) {
      weights[j] = std::exp(weights[j] - top);
      total += weights[j];
    }
    for (std::size_t j = 0; j <= t; ++j)
      for (std::size_t c = 0; c < v.cols(); ++c) out(t, c) += weights[j] * v(j, c);
    for (std::size_t c = 0; c < v.cols(); ++c) out(t, c) /= total;
  }
  return out;
}

}  // namespace rwkvlab::reference
