// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rwkvlab/blocks.hpp"
#include "rwkvlab/checkpoint.hpp"
#include "rwkvlab/encoder.hpp"
#include "rwkvlab/error.hpp"
#include "rwkvlab/model.hpp"
#include "rwkvlab/wkv.hpp"

using namespace rwkvlab;

namespace {

template <class Fn>
Error error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an rwkvlab::Error");
  return Error(ErrorKind::Unsupported, "unreachable");
}

struct WkvCase {
  TimeMixParams tm;
  Mat64 r, k, v;
};

WkvCase random_case(SeededRng& rng, std::size_t n, std::size_t d) {
  WkvCase c{oracle::random_wkv_params(rng, d), oracle::random_matrix(rng, n, d, 0.02, 0.98),
            oracle::random_matrix(rng, n, d), oracle::random_matrix(rng, n, d)};
  return c;
}

ModelConfig small_config(std::size_t d = 6, std::size_t layers = 3, bool ln = false) {
  ModelConfig c;
  c.d_model = d;
  c.n_layers = layers;
  c.vocab_size = 50;
  c.seed = 17;
  c.layer_norm = ln;
  return c;
}

std::vector<TokenId> random_tokens(SeededRng& rng, std::size_t n, std::size_t vocab) {
  std::vector<TokenId> t(n);
  for (auto& x : t) x = static_cast<TokenId>(rng.below(vocab));
  return t;
}

double weighted_sum(const Mat64& a, const Mat64& g) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * g.data()[i];
  return s;
}

// Finite-difference check of an input adjoint: grad should equal
// d/dx sum(G * f(x)).
void check_adjoint(const std::function<Mat64(const Mat64&)>& f, const Mat64& x, const Mat64& g,
                   const Mat64& grad, double tol) {
  const double h = 1e-5;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Mat64 up = x, down = x;
    up.data()[i] += h;
    down.data()[i] -= h;
    const double fd = (weighted_sum(f(up), g) - weighted_sum(f(down), g)) / (2 * h);
    CHECK(std::abs(fd - grad.data()[i]) <= tol * std::max(1.0, std::abs(fd)));
  }
}

}  // namespace

TEST_CASE("wkv_direct matches the extended-precision definition") {
  SeededRng rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = random_case(rng, 1 + rng.below(20), 1 + rng.below(6));
    CHECK(max_abs_diff(wkv_direct(c.tm, c.r, c.k, c.v), oracle::wkv(c.tm, c.r, c.k, c.v)) < 1e-12);
  }
}

TEST_CASE("wkv_recurrent matches wkv_direct") {
  SeededRng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto c = random_case(rng, 1 + rng.below(64), 1 + rng.below(32));
    const Mat64 direct = wkv_direct(c.tm, c.r, c.k, c.v);
    const WkvResult rec = wkv_recurrent(c.tm, c.r, c.k, c.v);
    CHECK(max_abs_diff(direct, rec.out) < 1e-10);
  }
}

TEST_CASE("single token: output is k*v/r") {
  SeededRng rng(12);
  const auto c = random_case(rng, 1, 4);
  const Mat64 out = wkv_recurrent(c.tm, c.r, c.k, c.v).out;
  for (std::size_t ch = 0; ch < 4; ++ch) {
    CHECK(oracle::rel_err(out(0, ch), c.k(0, ch) * c.v(0, ch) / c.r(0, ch)) < 1e-15);
  }
}

TEST_CASE("constant v is a fixed point of the ratio when k equals r") {
  SeededRng rng(13);
  auto c = random_case(rng, 9, 3);
  c.k = c.r;
  for (std::size_t t = 0; t < 9; ++t)
    for (std::size_t ch = 0; ch < 3; ++ch) c.v(t, ch) = 0.75;
  const Mat64 out = wkv_recurrent(c.tm, c.r, c.k, c.v).out;
  for (double x : out.span()) CHECK(std::abs(x - 0.75) < 1e-14);
}

TEST_CASE("carried state: chunked scan equals the whole scan bitwise") {
  SeededRng rng(14);
  const auto c = random_case(rng, 20, 5);
  const WkvResult whole = wkv_recurrent(c.tm, c.r, c.k, c.v);
  const auto rows = [](const Mat64& m, std::size_t a, std::size_t b) {
    return Mat64(b - a, m.cols(), m.span().subspan(a * m.cols(), (b - a) * m.cols()));
  };
  const WkvResult first = wkv_recurrent(c.tm, rows(c.r, 0, 7), rows(c.k, 0, 7), rows(c.v, 0, 7));
  const WkvResult second = wkv_recurrent(c.tm, rows(c.r, 7, 20), rows(c.k, 7, 20),
                                         rows(c.v, 7, 20), &first.state);
  CHECK(bitwise_equal(rows(whole.out, 0, 7), first.out));
  CHECK(bitwise_equal(rows(whole.out, 7, 20), second.out));
  CHECK(bitwise_equal(whole.state.num, second.state.num));
  CHECK(bitwise_equal(whole.state.den, second.state.den));
}

TEST_CASE("wkv input validation") {
  SeededRng rng(15);
  auto c = random_case(rng, 3, 2);
  c.r(1, 1) = 1.0;
  CHECK(error_of([&] { wkv_recurrent(c.tm, c.r, c.k, c.v); }).kind() == ErrorKind::DomainError);
  c.r(1, 1) = 0.0;
  CHECK(error_of([&] { wkv_direct(c.tm, c.r, c.k, c.v); }).kind() == ErrorKind::DomainError);
  c.r(1, 1) = 0.5;
  CHECK(error_of([&] { wkv_recurrent(c.tm, c.r, Mat64(2, 2), c.v); }).kind() ==
        ErrorKind::ShapeError);
  CHECK(error_of([&] { wkv_recurrent(c.tm, Mat64(0, 2), Mat64(0, 2), Mat64(0, 2)); }).kind() ==
        ErrorKind::ShapeError);
}

TEST_CASE("wkv_backward matches extended-precision finite differences") {
  SeededRng rng(16);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 1 + rng.below(8), d = 1 + rng.below(4);
    const auto c = random_case(rng, n, d);
    const Mat64 g = oracle::random_matrix(rng, n, d);
    const WkvGrads grads = wkv_backward(c.tm, c.r, c.k, c.v, g);

    oracle::WkvProblem p;
    p.n = n;
    p.d = d;
    const auto widen = [](std::span<const double> s) {
      return std::vector<long double>(s.begin(), s.end());
    };
    p.r = widen(c.r.span());
    p.k = widen(c.k.span());
    p.v = widen(c.v.span());
    p.g = widen(g.span());
    p.lambda = widen(c.tm.lambda.span());
    p.u = widen(c.tm.u.span());

    const auto check = [&](std::vector<long double> oracle::WkvProblem::*field,
                           std::span<const double> got) {
      for (std::size_t i = 0; i < got.size(); ++i) {
        const double fd = oracle::wkv_loss_derivative(p, field, i);
        if (std::abs(fd) > 1e-8) CHECK(oracle::rel_err(got[i], fd) <= 1e-6);
      }
    };
    check(&oracle::WkvProblem::r, grads.r.span());
    check(&oracle::WkvProblem::k, grads.k.span());
    check(&oracle::WkvProblem::v, grads.v.span());
    check(&oracle::WkvProblem::lambda, grads.lambda.span());
    check(&oracle::WkvProblem::u, grads.u.span());
  }
}

TEST_CASE("token shift") {
  const Mat64 x = Mat64::from_rows({{1, 2}, {3, 4}, {5, 6}});
  const Vec64 zero_prev(2);
  const Vec64 ones(2, 1.0), zeros(2, 0.0), half(2, 0.5);
  CHECK(token_shift(x, ones.span(), zero_prev.span()) == x);
  CHECK(token_shift(x, zeros.span(), zero_prev.span()) ==
        Mat64::from_rows({{0, 0}, {1, 2}, {3, 4}}));
  CHECK(token_shift(x, half.span(), zero_prev.span()) ==
        Mat64::from_rows({{0.5, 1}, {2, 3}, {4, 5}}));
  const Vec64 prev{10, 20};
  CHECK(token_shift(x, zeros.span(), prev.span())(0, 1) == 20);
}

TEST_CASE("layer norm rows have zero mean and unit variance") {
  SeededRng rng(18);
  const Mat64 x = oracle::random_matrix(rng, 5, 8, -3, 3);
  const Vec64 gain(8, 1.0), bias(8, 0.0);
  const Mat64 y = layer_norm(x, gain.span(), bias.span());
  for (std::size_t t = 0; t < 5; ++t) {
    double m = 0, v = 0;
    for (double a : y.row(t)) m += a;
    m /= 8;
    for (double a : y.row(t)) v += (a - m) * (a - m);
    v /= 8;
    CHECK(std::abs(m) < 1e-14);
    CHECK(std::abs(v - 1.0) < 1e-3);  // eps keeps it just under 1
  }
}

TEST_CASE("block adjoints agree with finite differences") {
  SeededRng rng(19);
  for (bool ln : {false, true}) {
    const RwkvParams p = init_model(small_config(5, 2, ln));
    const LayerParams& layer = p.layers[0];
    const Mat64 x = oracle::random_matrix(rng, 4, 5);
    const Mat64 g = oracle::random_matrix(rng, 4, 5);

    check_adjoint([&](const Mat64& h) { return time_mix_forward(layer.time_mix, h); }, x, g,
                  time_mix_backward(layer.time_mix, x, g), 1e-6);
    check_adjoint([&](const Mat64& h) { return channel_mix_forward(layer.channel_mix, h); }, x,
                  g, channel_mix_backward(layer.channel_mix, x, g), 1e-6);
    check_adjoint([&](const Mat64& h) { return layer_forward(layer, h, ln); }, x, g,
                  layer_backward(layer, x, ln, g), 1e-6);
    check_adjoint(
        [&](const Mat64& h) { return layer_norm(h, layer.ln1_gain.span(), layer.ln1_bias.span()); },
        x, g, layer_norm_backward(x, layer.ln1_gain.span(), g), 1e-6);
  }
}

TEST_CASE("init_model is deterministic and seed-sensitive") {
  const RwkvParams a = init_model(small_config());
  const RwkvParams b = init_model(small_config());
  CHECK(save_checkpoint(a) == save_checkpoint(b));
  ModelConfig other = small_config();
  other.seed = 18;
  CHECK(!(init_model(other).token_embedding == a.token_embedding));
  const Vec64& lam = a.layers[0].time_mix.lambda;
  CHECK(lam[0] == doctest::Approx(0.1));
  CHECK(lam[lam.size() - 1] == doctest::Approx(3.0));
}

TEST_CASE("config validation") {
  ModelConfig c = small_config();
  c.d_model = 0;
  CHECK(error_of([&] { init_model(c); }).kind() == ErrorKind::ConfigError);
}

TEST_CASE("zero-weight layers are the identity") {
  const RwkvParams p = zero_weight_model(small_config());
  const std::vector<TokenId> tokens = {1, 4, 9, 4};
  const LayerTrace t = encode(p, tokens);
  CHECK(t.layer_count() == 3);
  for (std::size_t l = 1; l <= 3; ++l) CHECK(bitwise_equal(t.layer(l), t.embedded));
}

TEST_CASE("encode validates tokens and layer indices") {
  const RwkvParams p = init_model(small_config());
  const std::vector<TokenId> none;
  CHECK(error_of([&] { encode(p, none); }).kind() == ErrorKind::EmptyInput);
  const std::vector<TokenId> bad = {1, 50};
  CHECK(error_of([&] { encode(p, bad); }).kind() == ErrorKind::VocabError);
  const std::vector<TokenId> ok = {1, 2};
  const LayerTrace t = encode(p, ok);
  CHECK(error_of([&] { t.layer(0); }).kind() == ErrorKind::ConfigError);
  CHECK(error_of([&] { t.layer(4); }).kind() == ErrorKind::ConfigError);
  CHECK(t.layer(3).rows() == 2);
}

TEST_CASE("streaming encoder matches whole-sequence encoding") {
  SeededRng rng(20);
  for (bool ln : {false, true}) {
    const RwkvParams p = init_model(small_config(8, 3, ln));
    for (int trial = 0; trial < 10; ++trial) {
      const auto tokens = random_tokens(rng, 1 + rng.below(15), 50);
      const LayerTrace whole = encode(p, tokens);
      StreamingEncoder stream(p);
      // feed in two uneven chunks
      const std::size_t cut = tokens.size() / 3;
      const std::span<const TokenId> all(tokens);
      LayerTrace a, b;
      if (cut > 0) a = stream.feed(all.first(cut));
      b = stream.feed(all.subspan(cut));
      CHECK(stream.tokens_seen() == tokens.size());
      for (std::size_t l = 1; l <= 3; ++l) {
        for (std::size_t t = 0; t < tokens.size(); ++t) {
          const auto got = t < cut ? a.layer(l).row(t) : b.layer(l).row(t - cut);
          CHECK(max_abs_diff(got, whole.layer(l).row(t)) < 1e-10);
        }
      }
      stream.reset();
      CHECK(stream.tokens_seen() == 0);
    }
  }
}

TEST_CASE("encoding is causal: appending tokens leaves earlier rows unchanged") {
  const RwkvParams p = init_model(small_config());
  const std::vector<TokenId> shortseq = {3, 8, 1};
  const std::vector<TokenId> longseq = {3, 8, 1, 7, 7};
  const LayerTrace a = encode(p, shortseq), b = encode(p, longseq);
  for (std::size_t t = 0; t < 3; ++t) CHECK(bitwise_equal(a.layer(3).row(t), b.layer(3).row(t)));
}

TEST_CASE("checkpoint round trip is bit-exact") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    ModelConfig c = small_config(4, 2, seed == 2);
    c.seed = seed;
    const RwkvParams p = init_model(c);
    const std::string text = save_checkpoint(p);
    const RwkvParams q = load_checkpoint_string(text);
    CHECK(q.config == p.config);
    CHECK(save_checkpoint(q) == text);
    bool all_equal = true;
    for_each_tensor(p, [&](const std::string& name, const auto& t) {
      for_each_tensor(q, [&](const std::string& other, const auto& u) {
        if (name == other) all_equal = all_equal && bitwise_equal(t.span(), u.span());
      });
    });
    CHECK(all_equal);
  }
}

TEST_CASE("checkpoint errors") {
  const std::string text = save_checkpoint(init_model(small_config(3, 1)));

  std::string wrong_version = text;
  wrong_version.replace(text.find(" 1\n"), 3, " 2\n");
  CHECK(error_of([&] { load_checkpoint_string(wrong_version); }).kind() ==
        ErrorKind::VersionError);

  std::string corrupted = text;
  const auto pos = corrupted.find("tensor layers.1.time_mix.w_k");
  const auto digit = corrupted.find_first_of("123456789", corrupted.find('\n', pos) + 1);
  corrupted[digit] = corrupted[digit] == '9' ? '8' : static_cast<char>(corrupted[digit] + 1);
  const Error e = error_of([&] { load_checkpoint_string(corrupted); });
  CHECK(e.kind() == ErrorKind::ParseError);
  CHECK(e.line().has_value());

  const std::string truncated = text.substr(0, text.size() / 2);
  CHECK(error_of([&] { load_checkpoint_string(truncated); }).kind() == ErrorKind::ParseError);

  CHECK(error_of([&] { load_checkpoint_string("hello\n"); }).kind() == ErrorKind::ParseError);
  CHECK(error_of([] { load_checkpoint_file("/nonexistent/model.ckpt"); }).kind() ==
        ErrorKind::ParseError);

  std::istringstream in(text);
  CHECK(load_checkpoint(in).config == small_config(3, 1));
}
