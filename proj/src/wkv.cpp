// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/wkv.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rwkvlab/error.hpp"
#include "rwkvlab/kernels.hpp"

namespace rwkvlab {
namespace {

void check_inputs(const TimeMixParams& tm, const Mat64& r, const Mat64& k, const Mat64& v) {
  if (r.rows() == 0) fail(ErrorKind::ShapeError, "wkv: empty sequence");
  if (k.rows() != r.rows() || v.rows() != r.rows()) {
    fail(ErrorKind::ShapeError, "wkv: r, k, v sequence lengths differ");
  }
  const std::size_t d = tm.width();
  if (r.cols() != d || k.cols() != d || v.cols() != d || tm.u.size() != d) {
    fail(ErrorKind::ShapeError, "wkv: channel width does not match parameters");
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = r.data()[i];
    if (!(x > 0.0 && x < 1.0)) {
      fail(ErrorKind::DomainError, "wkv: receptance " + std::to_string(x) + " outside (0, 1)");
    }
  }
}

}  // namespace

Mat64 wkv_direct(const TimeMixParams& tm, const Mat64& r, const Mat64& k, const Mat64& v) {
  check_inputs(tm, r, k, v);
  const std::size_t n = r.rows();
  const std::size_t d = r.cols();
  Mat64 out(n, d);
  for (std::size_t c = 0; c < d; ++c) {
    const double bonus = std::exp(tm.u[c]);
    for (std::size_t t = 0; t < n; ++t) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < t; ++i) {
        const double w = std::exp(-static_cast<double>(t - 1 - i) * tm.lambda[c]);
        num += w * (k(i, c) * v(i, c));
        den += w * r(i, c);
      }
      num += bonus * (k(t, c) * v(t, c));
      den += bonus * r(t, c);
      out(t, c) = num / den;
    }
  }
  return out;
}

WkvResult wkv_recurrent(const TimeMixParams& tm, const Mat64& r, const Mat64& k, const Mat64& v,
                        const WkvState* carried) {
  check_inputs(tm, r, k, v);
  const std::size_t d = r.cols();
  WkvState state = carried ? *carried : WkvState::zeros(d);
  if (state.num.size() != d || state.den.size() != d) {
    fail(ErrorKind::ShapeError, "wkv: carried state width mismatch");
  }
  Vec64 decay(d), bonus(d);
  for (std::size_t c = 0; c < d; ++c) {
    decay[c] = std::exp(-tm.lambda[c]);
    bonus[c] = std::exp(tm.u[c]);
  }
  Mat64 out(r.rows(), d);
  kernels::wkv_scan(r, k, v, decay.span(), bonus.span(), state.num.span(), state.den.span(), out);
  return {std::move(out), std::move(state)};
}

WkvGrads wkv_backward(const TimeMixParams& tm, const Mat64& r, const Mat64& k, const Mat64& v,
                      const Mat64& grad_out) {
  check_inputs(tm, r, k, v);
  const std::size_t n = r.rows();
  const std::size_t d = r.cols();
  if (grad_out.rows() != n || grad_out.cols() != d) {
    fail(ErrorKind::ShapeError, "wkv_backward: grad_out shape mismatch");
  }

  WkvGrads g{Mat64(n, d), Mat64(n, d), Mat64(n, d), Vec64(d), Vec64(d)};
  // prefix sums before token t, and the denominator / output at t
  std::vector<double> num_before(n), den_before(n), denom(n), out(n);

  for (std::size_t c = 0; c < d; ++c) {
    const double w = std::exp(-tm.lambda[c]);
    const double e = std::exp(tm.u[c]);

    double s = 0.0, z = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double kv = k(t, c) * v(t, c);
      num_before[t] = s;
      den_before[t] = z;
      denom[t] = z + e * r(t, c);
      out[t] = (s + e * kv) / denom[t];
      s = w * s + kv;
      z = w * z + r(t, c);
    }

    double g_num = 0.0, g_den = 0.0;  // d loss / d (num_t, den_t)
    double d_w = 0.0, d_u = 0.0;
    for (std::size_t t = n; t-- > 0;) {
      const double go = grad_out(t, c);
      const double g_n = go / denom[t];
      const double g_m = -go * out[t] / denom[t];
      const double kv = k(t, c) * v(t, c);

      const double d_kv = e * g_n + g_num;
      g.k(t, c) = d_kv * v(t, c);
      g.v(t, c) = d_kv * k(t, c);
      g.r(t, c) = e * g_m + g_den;
      d_u += e * (g_n * kv + g_m * r(t, c));
      d_w += g_num * num_before[t] + g_den * den_before[t];

      g_num = g_n + w * g_num;
      g_den = g_m + w * g_den;
    }
    g.lambda[c] = -w * d_w;
    g.u[c] = d_u;
  }
  return g;
}

}  // namespace rwkvlab
