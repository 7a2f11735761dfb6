// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Dense 64-bit vectors and row-major matrices. Construction from external
// data rejects NaN/Inf; sized construction zero-fills. Storage goes through
// TrackingAllocator so tracked_alloc_stats() sees it.

#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "rwkvlab/alloc_tracker.hpp"

namespace rwkvlab {

using Buffer = std::vector<double, TrackingAllocator<double>>;

class Vec64 {
 public:
  Vec64() = default;
  explicit Vec64(std::size_t n, double fill = 0.0);
  Vec64(std::initializer_list<double> values);
  explicit Vec64(std::span<const double> values);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> span() noexcept { return {data_.data(), data_.size()}; }
  std::span<const double> span() const noexcept { return {data_.data(), data_.size()}; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::vector<double> to_vector() const { return {data_.begin(), data_.end()}; }

  friend bool operator==(const Vec64& a, const Vec64& b) { return a.data_ == b.data_; }

 private:
  Buffer data_;
};

class Mat64 {
 public:
  Mat64() = default;
  Mat64(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Row-major values; length must equal rows * cols.
  Mat64(std::size_t rows, std::size_t cols, std::span<const double> values);
  static Mat64 from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Mat64 identity(std::size_t n);
  static Mat64 diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  Vec64 row_vec(std::size_t r) const { return Vec64(row(r)); }
  void set_row(std::size_t r, std::span<const double> values);

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<const double> span() const noexcept { return {data_.data(), data_.size()}; }
  std::span<double> span() noexcept { return {data_.data(), data_.size()}; }

  Mat64 transposed() const;

  friend bool operator==(const Mat64& a, const Mat64& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Buffer data_;
};

// Throws DomainError naming `what` if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

// Bitwise comparison (distinguishes -0.0 from 0.0 and compares NaN payloads).
bool bitwise_equal(std::span<const double> a, std::span<const double> b);
inline bool bitwise_equal(const Mat64& a, const Mat64& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && bitwise_equal(a.span(), b.span());
}
inline bool bitwise_equal(const Vec64& a, const Vec64& b) {
  return bitwise_equal(a.span(), b.span());
}

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double frobenius_norm(const Mat64& m);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
inline double max_abs_diff(const Mat64& a, const Mat64& b) {
  return max_abs_diff(a.span(), b.span());
}

// y = M x
Vec64 matvec(const Mat64& m, std::span<const double> x);
// y = M^T x
Vec64 matvec_transposed(const Mat64& m, std::span<const double> x);
// C = A B
Mat64 matmul(const Mat64& a, const Mat64& b);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace rwkvlab
