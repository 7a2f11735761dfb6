// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rwkvlab/error.hpp"
#include "rwkvlab/pooling.hpp"

using namespace rwkvlab;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an rwkvlab::Error");
  return ErrorKind::Unsupported;
}

}  // namespace

TEST_CASE("average, max and last-token pooling on a small matrix") {
  const Mat64 h = Mat64::from_rows({{1, 4}, {3, -2}, {2, 0}});
  CHECK(pool(h, PoolStrategy::average()).vector == Vec64{2, 2.0 / 3.0});
  CHECK(pool(h, {PoolKind::max, std::nullopt}).vector == Vec64{3, 4});
  CHECK(pool(h, {PoolKind::last_token, std::nullopt}).vector == Vec64{2, 0});
}

TEST_CASE("a single token pools to itself under every strategy") {
  const Mat64 h = Mat64::from_rows({{0.25, -1.5, 3.0}});
  const Vec64 q{1, 2, 3};
  for (const PoolStrategy& s : {PoolStrategy::average(), PoolStrategy{PoolKind::max, {}},
                                PoolStrategy{PoolKind::last_token, {}}, PoolStrategy::adaptive(q)}) {
    CHECK(pool(h, s).vector == h.row_vec(0));
  }
}

TEST_CASE("adaptive pooling with q = 0 equals average pooling bitwise") {
  SeededRng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(12), d = 1 + rng.below(10);
    const Mat64 h = oracle::random_matrix(rng, n, d, -5, 5);
    const PoolResult a = pool(h, PoolStrategy::adaptive(Vec64(d)));
    CHECK(bitwise_equal(a.vector, pool(h, PoolStrategy::average()).vector));
    for (double w : *a.weights) CHECK(w == 1.0 / static_cast<double>(n));
  }
}

TEST_CASE("adaptive weights are a softmax and the output lies in the row hull") {
  SeededRng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(12), d = 1 + rng.below(10);
    const Mat64 h = oracle::random_matrix(rng, n, d, -5, 5);
    const PoolResult a = pool(h, PoolStrategy::adaptive(oracle::random_vec(rng, d, -3, 3)));
    double total = 0;
    for (double w : *a.weights) {
      CHECK(w >= 0.0);
      total += w;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    for (std::size_t c = 0; c < d; ++c) {
      double lo = h(0, c), hi = h(0, c), mix = 0;
      for (std::size_t t = 0; t < n; ++t) {
        lo = std::min(lo, h(t, c));
        hi = std::max(hi, h(t, c));
        mix += (*a.weights)[t] * h(t, c);
      }
      CHECK(a.vector[c] >= lo - 1e-12);
      CHECK(a.vector[c] <= hi + 1e-12);
      CHECK(std::abs(a.vector[c] - mix) < 1e-12);
    }
  }
}

TEST_CASE("pooling errors") {
  CHECK(kind_of([] { pool(Mat64(0, 3), PoolStrategy::average()); }) == ErrorKind::EmptyInput);
  const Mat64 h(2, 3, 1.0);
  CHECK(kind_of([&] { pool(h, {PoolKind::adaptive, std::nullopt}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([&] { pool(h, PoolStrategy::adaptive(Vec64(2))); }) == ErrorKind::ShapeError);
  CHECK(kind_of([] { parse_pool_kind("median"); }) == ErrorKind::ConfigError);
}

TEST_CASE("pool kind names round trip") {
  for (PoolKind k : {PoolKind::average, PoolKind::max, PoolKind::last_token, PoolKind::adaptive}) {
    CHECK(parse_pool_kind(to_string(k)) == k);
  }
  CHECK(parse_pool_kind("last_token") == PoolKind::last_token);
}

TEST_CASE("random_query is seeded and scaled by 1/sqrt(d)") {
  CHECK(random_query(16, 5) == random_query(16, 5));
  CHECK(!(random_query(16, 5) == random_query(16, 6)));
  double ss = 0;
  const Vec64 q = random_query(4096, 1);
  for (double x : q) ss += x * x;
  CHECK(std::abs(ss - 1.0) < 0.1);
}

TEST_CASE("SNR estimate n * |h*|^2 / sigma^2") {
  CHECK(snr_estimate({10, 2.0, 4.0}) == 5.0);
  CHECK(snr_estimate({1, 0.0, 1.0}) == 0.0);
  CHECK(kind_of([] { snr_estimate({0, 1.0, 1.0}); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { snr_estimate({3, 1.0, 0.0}); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { snr_estimate({3, -1.0, 1.0}); }) == ErrorKind::DomainError);
  // doubling n doubles the SNR
  CHECK(snr_estimate({20, 2.0, 4.0}) == 2 * snr_estimate({10, 2.0, 4.0}));
}
