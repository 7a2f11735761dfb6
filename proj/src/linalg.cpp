// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rwkvlab/error.hpp"

namespace rwkvlab {
namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_sq(const Mat64& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return s;
}

// Applies the rotation that zeroes a(p,q) to both sides of the full matrix.
void rotate(Mat64& a, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
}

}  // namespace

Vec64 symmetric_eigenvalues(const Mat64& sym) {
  if (sym.rows() != sym.cols()) fail(ErrorKind::ShapeError, "symmetric_eigenvalues: not square");
  const std::size_t n = sym.rows();
  Mat64 a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = sym(i, j);

  const double scale = frobenius_norm(a);
  const double tol = 1e-30 * scale * scale;
  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_sq(a) > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, p, q);
  }

  Vec64 eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

Vec64 singular_values(const Mat64& m) {
  if (m.rows() > kMaxSvdDim || m.cols() > kMaxSvdDim) {
    fail(ErrorKind::SizeLimit, "singular_values: " + std::to_string(m.rows()) + "x" +
                                   std::to_string(m.cols()) + " exceeds " +
                                   std::to_string(kMaxSvdDim));
  }
  const bool tall = m.rows() >= m.cols();
  const Mat64 gram = tall ? matmul(m.transposed(), m) : matmul(m, m.transposed());
  Vec64 sv = symmetric_eigenvalues(gram);
  for (double& x : sv) x = std::sqrt(std::max(x, 0.0));
  return sv;
}

}  // namespace rwkvlab
