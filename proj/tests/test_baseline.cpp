// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "rwkvlab/baseline.hpp"
#include "rwkvlab/error.hpp"

using namespace rwkvlab;

namespace {

WordVectorTable load(const std::string& text) {
  std::istringstream in(text);
  return load_word_vectors(in);
}

Error error_of(const std::string& text) {
  try {
    load(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an rwkvlab::Error");
  return Error(ErrorKind::Unsupported, "unreachable");
}

}  // namespace

TEST_CASE("load word vectors") {
  const auto t = load("the 0.1 0.2\ncat 0.3 0.4\n");
  CHECK(t.dim() == 2);
  CHECK(t.size() == 2);
  CHECK(*t.find("cat") == Vec64{0.3, 0.4});
  CHECK(t.find("dog") == nullptr);
}

TEST_CASE("word vectors: later duplicates win and words are lowercased") {
  const auto t = load("Cat 1 2\n\ncat 3 4\n");
  CHECK(t.size() == 1);
  CHECK(*t.find("cat") == Vec64{3, 4});
}

TEST_CASE("word vector format errors carry the line number") {
  const Error a = error_of("the 0.1 0.2\ncat 0.1\n");
  CHECK(a.kind() == ErrorKind::FormatError);
  CHECK(a.line() == 2);
  const Error b = error_of("the 0.1 zebra\n");
  CHECK(b.kind() == ErrorKind::FormatError);
  CHECK(b.line() == 1);
}

TEST_CASE("the shipped 50-d fixture has 100 words") {
  const std::string path = std::string(RWKVLAB_FIXTURE_DIR) + "/word_vectors_50d.txt";
  const auto t = load_word_vectors_file(path);
  // independent count: lines and fields per line
  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) {
    std::istringstream fields(line);
    std::size_t n = 0;
    for (std::string f; fields >> f;) ++n;
    CHECK(n == 51);
    ++lines;
  }
  CHECK(t.dim() == 50);
  CHECK(t.size() == lines);
  CHECK(lines == 100);
}

TEST_CASE("whitespace tokenization") {
  using V = std::vector<std::string>;
  CHECK(tokenize_whitespace("Hello  world") == V{"hello", "world"});
  CHECK(tokenize_whitespace("").empty());
  CHECK(tokenize_whitespace("A b\tc\nd") == V{"a", "b", "c", "d"});
}

TEST_CASE("sentence averaging semantics") {
  const auto t = load("a 1 0\nb 0 2\n");
  CHECK(embed_sentence_avg(t, "a").vector == Vec64{1, 0});
  CHECK(embed_sentence_avg(t, "a b").vector == Vec64{0.5, 1});
  const auto oov = embed_sentence_avg(t, "zzz yyy");
  CHECK(oov.vector == Vec64{0, 0});
  CHECK(oov.degenerate());
  CHECK(embed_sentence_avg(t, "").degenerate());
  // the skip policy averages over known tokens only
  CHECK(embed_sentence_avg(t, "a zzz", OovPolicy::skip).vector == Vec64{1, 0});
  CHECK(embed_sentence_avg(t, "a zzz").vector == Vec64{0.5, 0});
}

TEST_CASE("an OOV token scales the embedding by k/(k+1)") {
  const auto t = load("a 0.3 -1.7 2.2\nb 1.1 0.4 -0.9\nc -0.6 2.5 0.05\n");
  const std::string sentences[] = {"a", "a b", "a b c", "c c b a"};
  for (const auto& s : sentences) {
    const auto base = embed_sentence_avg(t, s);
    const auto more = embed_sentence_avg(t, s + " qqq");
    const double k = static_cast<double>(base.tokens);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(more.vector[i] == doctest::Approx(base.vector[i] * k / (k + 1)).epsilon(1e-15));
    }
  }
}

TEST_CASE("sentence embeddings are invariant under token permutation") {
  SeededRng rng(31);
  const auto table = random_word_vectors(std::vector<std::string>{"a b c d e f g h"}, 8, 3);
  std::vector<std::string> words = {"a", "b", "c", "d", "e", "f", "g", "h", "zz"};
  const auto join = [](const std::vector<std::string>& w) {
    std::string s;
    for (const auto& x : w) s += x + " ";
    return s;
  };
  const Vec64 ref = embed_sentence_avg(table, join(words)).vector;
  for (int trial = 0; trial < 30; ++trial) {
    for (std::size_t i = words.size() - 1; i > 0; --i) std::swap(words[i], words[rng.below(i + 1)]);
    CHECK(bitwise_equal(embed_sentence_avg(table, join(words)).vector, ref));
  }
}

TEST_CASE("random word vectors depend only on the word and seed") {
  const std::vector<std::string> a = {"x y"}, b = {"y q r x"};
  const auto ta = random_word_vectors(a, 5, 9), tb = random_word_vectors(b, 5, 9);
  CHECK(*ta.find("x") == *tb.find("x"));
  CHECK(!(*ta.find("x") == *random_word_vectors(a, 5, 10).find("x")));
}
