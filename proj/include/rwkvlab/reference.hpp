// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Serial reference kernels. Kept for testing the parallel kernels in
// kernels.hpp and as the baseline in the kernel benchmark.

#pragma once

#include <span>

#include "rwkvlab/tensor.hpp"

namespace rwkvlab::reference {

Mat64 project_rows(const Mat64& x, const Mat64& w);

void wkv_scan(const Mat64& r, const Mat64& k, const Mat64& v, std::span<const double> decay,
              std::span<const double> bonus, std::span<double> num, std::span<double> den,
              Mat64& out);

Mat64 causal_attention(const Mat64& q, const Mat64& k, const Mat64& v);

}  // namespace rwkvlab::reference
