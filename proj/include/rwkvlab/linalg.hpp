// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#pragma once

#include <cstddef>

#include "rwkvlab/tensor.hpp"

namespace rwkvlab {

inline constexpr std::size_t kMaxSvdDim = 256;

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
// non-increasing. Only the upper triangle is read.
Vec64 symmetric_eigenvalues(const Mat64& sym);

// Singular values, non-increasing, min(rows, cols) of them. Computed as the
// square roots of the Jacobi eigenvalues of the smaller Gram matrix (M^T M or
// M M^T). Throws SizeLimit above kMaxSvdDim in either dimension.
Vec64 singular_values(const Mat64& m);

}  // namespace rwkvlab
