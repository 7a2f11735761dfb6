// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rwkvlab/alloc_tracker.hpp"
#include "rwkvlab/error.hpp"
#include "rwkvlab/harness.hpp"
#include "rwkvlab/stats.hpp"

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

std::vector<SentencePairRecord> load_text(const std::string& text) {
  std::istringstream in(text);
  return load_pairs(in);
}

std::vector<SentencePairRecord> fixture_pairs() {
  return load_pairs_file(std::string(RWKVLAB_FIXTURE_DIR) + "/pairs.tsv");
}

RwkvParams small_model(std::size_t layers = 3) {
  ModelConfig c;
  c.d_model = 8;
  c.n_layers = layers;
  c.vocab_size = 97;
  c.seed = 5;
  return init_model(c);
}

class ConstantEmbedder final : public SentenceEmbedder {
 public:
  std::string name() const override { return "constant"; }
  Vec64 embed(std::string_view) const override { return Vec64{1, 2, 3}; }
};

WordVectorTable table_from(const std::string& text) {
  std::istringstream in(text);
  return load_word_vectors(in);
}

// Column values of a CSV report with the timing and memory columns masked.
std::string masked_csv(const EvalReport& r) {
  EvalReport copy = r;
  for (auto& row : copy.rows) {
    row.mean_pair_seconds = 0;
    row.peak_bytes = 0;
  }
  return write_report(copy, ReportFormat::csv);
}

}  // namespace

TEST_CASE("load_pairs: well-formed input keeps order") {
  const auto r = load_text("label\tsentence1\tsentence2\n1\ta b\tc d\n0\te\tf\n");
  REQUIRE(r.size() == 2);
  CHECK(r[0].label == 1);
  CHECK(r[0].sentence2 == "c d");
  CHECK(r[1].sentence1 == "e");
}

TEST_CASE("load_pairs: format errors carry line numbers") {
  const auto bad_label = error_of([] { load_text("label\tsentence1\tsentence2\n1\ta\tb\n2\tc\td\n"); });
  CHECK(bad_label.kind() == ErrorKind::FormatError);
  CHECK(bad_label.line() == 3);
  CHECK(error_of([] { load_text("l\ts1\ts2\n"); }).kind() == ErrorKind::FormatError);
  const auto empty = error_of([] { load_text("label\tsentence1\tsentence2\n1\t  \tb\n"); });
  CHECK(empty.line() == 2);
  CHECK(error_of([] { load_text("label\tsentence1\tsentence2\n1\tonly\n"); }).line() == 2);
}

TEST_CASE("the shipped fixture has 40 pairs") {
  std::ifstream in(std::string(RWKVLAB_FIXTURE_DIR) + "/pairs.tsv");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) lines += !line.empty();
  CHECK(fixture_pairs().size() == lines - 1);
  CHECK(lines - 1 == 40);
}

TEST_CASE("report CSV: header, 4-decimal spearman, round trip") {
  EvalReport empty;
  CHECK(write_report(empty, ReportFormat::csv) ==
        "method,split,spearman,mean_pair_seconds,peak_bytes\n");
  EvalReport r;
  r.rows.push_back({"glove_baseline", "validation", 0.4326, 1.2345e-4, 8192});
  const std::string csv = write_report(r, ReportFormat::csv);
  CHECK(csv.find("glove_baseline,validation,0.4326,1.234500e-04,8192\n") != std::string::npos);
  CHECK(parse_report(csv, ReportFormat::csv).rows == r.rows);
}

TEST_CASE("report JSON round trips with metadata") {
  EvalReport r;
  r.rows.push_back({"rwkv_layer_1", "validation", 0.123456789, 3.5e-3, 100});
  r.rows.push_back({"a,b \"quoted\"", "test", -1.0, 0.0, 0});
  r.metadata = {42, "abc", "2026-01-01T00:00:00Z", 7, {{"x", 2}}};
  CHECK(parse_report(write_report(r, ReportFormat::json), ReportFormat::json) == r);
  // quoting survives CSV too
  CHECK(parse_report(write_report(r, ReportFormat::csv), ReportFormat::csv).rows[1].method ==
        "a,b \"quoted\"");
  CHECK(error_of([] { parse_report("nope", ReportFormat::json); }).kind() ==
        ErrorKind::ParseError);
  CHECK(error_of([] { parse_report_format("xml"); }).kind() == ErrorKind::ConfigError);
}

TEST_CASE("score_pairs: constant embedder, empty input") {
  const auto records = load_text("label\tsentence1\tsentence2\n1\ta\tb\n0\tc\td\n");
  const ConstantEmbedder e;
  const PairScores s = score_pairs(e, records);
  CHECK(s.similarities == std::vector<double>{1.0, 1.0});
  CHECK(s.seconds.size() == 2);
  for (double t : s.seconds) CHECK(t >= 0.0);
  const std::vector<SentencePairRecord> none;
  CHECK(error_of([&] { score_pairs(e, none); }).kind() == ErrorKind::EmptyInput);
}

TEST_CASE("score_pairs: shared tokens beat disjoint tokens") {
  const WordAverageEmbedder e("words", table_from("x 1 0 0\ny 0 1 0\nz 0 0 1\n"));
  const auto records = load_text("label\tsentence1\tsentence2\n1\tx y\ty x\n0\tx x\tz z\n");
  const PairScores s = score_pairs(e, records);
  CHECK(std::abs(s.similarities[0] - 1.0) < 1e-15);  // sqrt rounding: 1 - 2^-53 possible
  CHECK(s.similarities[1] == 0.0);
}

TEST_CASE("score_pairs: all-OOV sentences are skipped and reported") {
  const WordAverageEmbedder e("words", table_from("x 1 0\ny 0 1\n"));
  const auto records =
      load_text("label\tsentence1\tsentence2\n1\tx\tx y\n0\tqqq\ty\n1\ty\tx\n");
  const PairScores s = score_pairs(e, records);
  CHECK(s.kept == std::vector<std::size_t>{0, 2});
  REQUIRE(s.skipped.size() == 1);
  CHECK(s.skipped[0].index == 1);
  CHECK(kept_labels(records, s) == std::vector<int>{1, 1});
}

TEST_CASE("evaluate_split") {
  const std::vector<double> sims = {0.9, 0.1};
  CHECK(evaluate_split(sims, std::vector<int>{1, 0}) == 1.0);
  CHECK(evaluate_split(sims, std::vector<int>{0, 1}) == -1.0);
  CHECK(error_of([&] { evaluate_split(sims, std::vector<int>{1, 1}); }).kind() ==
        ErrorKind::DegenerateInput);
  CHECK(error_of([&] { evaluate_split(sims, std::vector<int>{1}); }).kind() ==
        ErrorKind::ShapeError);
}

TEST_CASE("evaluate_split on the fixture matches the rank oracle") {
  const auto records = fixture_pairs();
  const RwkvParams p = small_model();
  const RwkvLayerEmbedder e(p, 2, PoolStrategy::average());
  const PairScores s = score_pairs(e, records);
  const auto labels = kept_labels(records, s);
  const std::vector<double> as_double(labels.begin(), labels.end());
  CHECK(std::abs(evaluate_split(s.similarities, labels) -
                 oracle::spearman(s.similarities, as_double)) < 1e-12);
}

TEST_CASE("layer_sweep: report shape and layer validation") {
  const auto records = fixture_pairs();
  const RwkvParams p = small_model(2);
  const WordAverageEmbedder base(
      "random_vector_baseline",
      random_word_vectors(std::vector<std::string>{records[0].sentence1}, 4, 1));
  const SentenceEmbedder* baselines[] = {&base};
  const std::vector<std::size_t> one = {1};
  const EvalReport r = layer_sweep(p, records, one, PoolStrategy::average(), baselines);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].method == "rwkv_layer_1");
  CHECK(r.rows[1].method == "random_vector_baseline");
  CHECK(r.metadata.pairs == records.size());
  CHECK(r.metadata.seed == 42);
  // the narrow random table leaves many sentences all-OOV: they are skipped, not fatal
  CHECK(r.metadata.skipped_pairs.at("random_vector_baseline") > 0);
  for (const auto& row : r.rows) {
    CHECK(row.spearman >= -1.0);
    CHECK(row.spearman <= 1.0);
    CHECK(row.mean_pair_seconds >= 0.0);
  }
  const std::vector<std::size_t> bad = {3};
  CHECK(error_of([&] { layer_sweep(p, records, bad, PoolStrategy::average(), {}); }).kind() ==
        ErrorKind::ConfigError);
}

TEST_CASE("layer_sweep: default layers on a 12-layer model give 6 rows") {
  ModelConfig c;
  c.d_model = 4;
  c.vocab_size = 64;
  const RwkvParams p = init_model(c);
  const auto records = fixture_pairs();
  const EvalReport r = layer_sweep(p, records, kDefaultLayers, PoolStrategy::average(), {});
  REQUIRE(r.rows.size() == 6);
  CHECK(r.rows[5].method == "rwkv_layer_11");
}

TEST_CASE("trace reuse gives the same similarities as per-layer re-encoding") {
  const auto records = fixture_pairs();
  const RwkvParams p = small_model(3);
  const std::vector<std::size_t> layers = {1, 2, 3};
  for (const PoolStrategy& strategy :
       {PoolStrategy::average(), PoolStrategy::adaptive(random_query(8, 3))}) {
    const EvalReport swept = layer_sweep(p, records, layers, strategy, {});
    for (std::size_t l : layers) {
      const RwkvLayerEmbedder e(p, l, strategy);
      const PairScores s = score_pairs(e, records);
      const double direct = evaluate_split(s.similarities, kept_labels(records, s));
      CHECK(swept.rows[l - 1].spearman == direct);
    }
  }
}

TEST_CASE("sweep output does not depend on the worker count") {
  const auto records = fixture_pairs();
  const RwkvParams p = small_model(3);
  const std::vector<std::size_t> layers = {1, 3};
  SweepOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = layer_sweep(p, records, layers, PoolStrategy::average(), {}, one);
  const auto b = layer_sweep(p, records, layers, PoolStrategy::average(), {}, four);
  CHECK(masked_csv(a) == masked_csv(b));
}

TEST_CASE("monotone rescaling of similarities leaves spearman unchanged") {
  const auto records = fixture_pairs();
  const RwkvParams p = small_model(3);
  const RwkvLayerEmbedder e(p, 3, PoolStrategy::average());
  const PairScores s = score_pairs(e, records);
  const auto labels = kept_labels(records, s);
  std::vector<double> rescaled;
  for (double x : s.similarities) rescaled.push_back(std::exp(x));
  CHECK(evaluate_split(rescaled, labels) == evaluate_split(s.similarities, labels));
}

TEST_CASE("HashingTokenizer is deterministic and bounded") {
  const HashingTokenizer tok(13);
  const auto ids = tok("The cat THE cat");
  REQUIRE(ids.size() == 4);
  CHECK(ids[0] == ids[2]);
  for (auto id : ids) CHECK(id < 13);
  CHECK(error_of([] { HashingTokenizer(0); }).kind() == ErrorKind::ConfigError);
}

TEST_CASE("config digest depends on model and pooling") {
  ModelConfig a, b;
  b.seed = 7;
  CHECK(model_config_digest(a, PoolStrategy::average()) ==
        model_config_digest(a, PoolStrategy::average()));
  CHECK(model_config_digest(a, PoolStrategy::average()) !=
        model_config_digest(b, PoolStrategy::average()));
  CHECK(model_config_digest(a, PoolStrategy::average()) !=
        model_config_digest(a, PoolStrategy::adaptive(random_query(32, 1))));
}

TEST_CASE("memory census: encode n=8, d=16, L=2") {
  ModelConfig c;
  c.d_model = 16;
  c.n_layers = 2;
  c.vocab_size = 100;
  const RwkvParams p = init_model(c);
  const std::vector<TokenId> tokens = {1, 2, 3, 4, 5, 6, 7, 8};

  // Buffers live at the high-water mark (second layer, output projection of
  // the time-mix block), with M = n*d doubles and V = d doubles:
  //   embedded + first hidden state          2M
  //   token-shifted inputs x_r, x_k, x_v     3M
  //   r, k, v                                3M
  //   WKV output and its carried num/den     M + 2V
  //   W_o projection result                  M
  const std::size_t M = 8 * 16 * sizeof(double), V = 16 * sizeof(double);
  const double census = static_cast<double>(10 * M + 2 * V);

  AllocTracker::set_enabled(true);
  AllocTracker::reset_peak();
  const std::size_t base = tracked_alloc_stats().current_bytes;
  {
    const LayerTrace t = encode(p, tokens);
    CHECK(t.layer_count() == 2);
  }
  const double peak = static_cast<double>(tracked_alloc_stats().peak_bytes - base);
  CHECK(peak >= 0.9 * census);
  CHECK(peak <= 1.1 * census);
}

TEST_CASE("layer_sweep reports tracked peak bytes") {
  const auto records = fixture_pairs();
  const RwkvParams p = small_model(2);
  const std::vector<std::size_t> layers = {1};
  const EvalReport on = layer_sweep(p, records, layers, PoolStrategy::average(), {});
  CHECK(on.rows[0].peak_bytes > 0);
  SweepOptions off;
  off.track_memory = false;
  const EvalReport none = layer_sweep(p, records, layers, PoolStrategy::average(), {}, off);
  CHECK(none.rows[0].peak_bytes == 0);
}
