// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/baseline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>

#include "rwkvlab/error.hpp"
#include "rwkvlab/hash.hpp"
#include "rwkvlab/rng.hpp"

namespace rwkvlab {
namespace {

bool is_space(char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) parts.push_back(text.substr(start, i - start));
  }
  return parts;
}

}  // namespace

void WordVectorTable::insert(std::string_view word, Vec64 vector) {
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) fail(ErrorKind::ShapeError, "word vector width mismatch");
  entries_.insert_or_assign(lowercase(word), std::move(vector));
}

const Vec64* WordVectorTable::find(std::string_view word) const {
  const auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

WordVectorTable load_word_vectors(std::istream& in) {
  WordVectorTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    const auto parts = split_whitespace(line);
    if (parts.empty()) continue;
    const std::size_t width = parts.size() - 1;
    if (width == 0) throw Error(ErrorKind::FormatError, "word without a vector", line_no);
    if (table.dim() != 0 && width != table.dim()) {
      throw Error(ErrorKind::FormatError,
                  "expected " + std::to_string(table.dim()) + " values, found " +
                      std::to_string(width),
                  line_no);
    }
    values.assign(width, 0.0);
    for (std::size_t i = 0; i < width; ++i) {
      const auto tok = parts[i + 1];
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), values[i]);
      if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() ||
          !std::isfinite(values[i])) {
        throw Error(ErrorKind::FormatError, "bad number '" + std::string(tok) + "'", line_no);
      }
    }
    table.insert(parts[0], Vec64(std::span<const double>(values)));
  }
  return table;
}

WordVectorTable load_word_vectors_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::FormatError, "cannot open word-vector file '" + path + "'");
  return load_word_vectors(in);
}

std::vector<std::string> tokenize_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  for (const auto part : split_whitespace(text)) tokens.push_back(lowercase(part));
  return tokens;
}

SentenceEmbedding embed_sentence_avg(const WordVectorTable& table, std::string_view text,
                                     OovPolicy policy) {
  std::vector<std::string> tokens = tokenize_whitespace(text);
  std::sort(tokens.begin(), tokens.end());

  SentenceEmbedding emb{Vec64(table.dim()), tokens.size(), 0};
  for (const auto& tok : tokens) {
    const Vec64* v = table.find(tok);
    if (!v) continue;  // zero vector: contributes nothing to the sum
    ++emb.known;
    for (std::size_t c = 0; c < table.dim(); ++c) emb.vector[c] += (*v)[c];
  }
  const std::size_t divisor = policy == OovPolicy::zero_vector ? emb.tokens : emb.known;
  if (divisor > 0) {
    for (double& x : emb.vector) x /= static_cast<double>(divisor);
  }
  return emb;
}

WordVectorTable random_word_vectors(std::span<const std::string> texts, std::size_t dim,
                                    std::uint64_t seed) {
  std::set<std::string> vocab;
  for (const auto& text : texts)
    for (auto& tok : tokenize_whitespace(text)) vocab.insert(std::move(tok));

  WordVectorTable table(dim);
  for (const auto& word : vocab) {
    SeededRng rng(seed ^ fnv1a64(word));
    Vec64 v(dim);
    for (double& x : v) x = rng.normal();
    table.insert(word, std::move(v));
  }
  return table;
}

}  // namespace rwkvlab
