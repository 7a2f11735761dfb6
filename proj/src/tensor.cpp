// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/tensor.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "rwkvlab/error.hpp"

namespace rwkvlab {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorKind::DomainError,
           std::string(what) + ": non-finite entry at index " + std::to_string(i));
    }
  }
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

Vec64::Vec64(std::size_t n, double fill) : data_(n, fill) { require_finite(span(), "Vec64"); }

Vec64::Vec64(std::initializer_list<double> values) : data_(values.begin(), values.end()) {
  require_finite(span(), "Vec64");
}

Vec64::Vec64(std::span<const double> values) : data_(values.begin(), values.end()) {
  require_finite(span(), "Vec64");
}

Mat64::Mat64(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  require_finite(span(), "Mat64");
}

Mat64::Mat64(std::size_t rows, std::size_t cols, std::span<const double> values)
    : rows_(rows), cols_(cols) {
  if (values.size() != rows * cols) {
    fail(ErrorKind::ShapeError, "Mat64: expected " + std::to_string(rows * cols) +
                                    " values, got " + std::to_string(values.size()));
  }
  require_finite(values, "Mat64");
  data_.assign(values.begin(), values.end());
}

Mat64 Mat64::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> flat;
  flat.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) fail(ErrorKind::ShapeError, "Mat64::from_rows: ragged rows");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return Mat64(r, c, flat);
}

Mat64 Mat64::identity(std::size_t n) {
  Mat64 m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat64 Mat64::diagonal(std::span<const double> diag) {
  require_finite(diag, "Mat64::diagonal");
  Mat64 m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

void Mat64::set_row(std::size_t r, std::span<const double> values) {
  if (values.size() != cols_) fail(ErrorKind::ShapeError, "Mat64::set_row: width mismatch");
  std::copy(values.begin(), values.end(), row(r).begin());
}

Mat64 Mat64::transposed() const {
  Mat64 t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::ShapeError, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Mat64& m) { return norm2(m.span()); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::ShapeError, "max_abs_diff: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

Vec64 matvec(const Mat64& m, std::span<const double> x) {
  if (m.cols() != x.size()) fail(ErrorKind::ShapeError, "matvec: width mismatch");
  Vec64 y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec64 matvec_transposed(const Mat64& m, std::span<const double> x) {
  if (m.rows() != x.size()) fail(ErrorKind::ShapeError, "matvec_transposed: height mismatch");
  Vec64 y(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < row.size(); ++j) y[j] += row[j] * xi;
  }
  return y;
}

Mat64 matmul(const Mat64& a, const Mat64& b) {
  if (a.cols() != b.rows()) fail(ErrorKind::ShapeError, "matmul: inner dimension mismatch");
  Mat64 c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

}  // namespace rwkvlab
