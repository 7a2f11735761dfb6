// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Word-vector averaging baseline over the "word v1 v2 ... vd" text format.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rwkvlab/tensor.hpp"

namespace rwkvlab {

class WordVectorTable {
 public:
  WordVectorTable() = default;
  explicit WordVectorTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Lowercases the word; later inserts overwrite earlier ones.
  void insert(std::string_view word, Vec64 vector);
  // nullptr when absent. `word` must already be lowercase.
  const Vec64* find(std::string_view word) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Vec64> entries_;
};

// Throws FormatError(line) on a width change or an unparsable number.
WordVectorTable load_word_vectors(std::istream& in);
WordVectorTable load_word_vectors_file(const std::string& path);

// Splits on runs of whitespace and lowercases (ASCII).
std::vector<std::string> tokenize_whitespace(std::string_view text);

enum class OovPolicy {
  zero_vector,  // OOV tokens count in the divisor with a zero vector
  skip,         // mean over in-vocabulary tokens only
};

struct SentenceEmbedding {
  Vec64 vector;
  std::size_t tokens = 0;
  std::size_t known = 0;
  // No tokens, or no in-vocabulary tokens: the vector is all zeros.
  bool degenerate() const noexcept { return known == 0; }
};

// Vectors are summed in sorted token order, so the result does not depend on
// word order at all (not even in the last bit).
SentenceEmbedding embed_sentence_avg(const WordVectorTable& table, std::string_view text,
                                     OovPolicy policy = OovPolicy::zero_vector);

// Seeded stand-in table: one N(0, 1) vector per distinct lowercase word in
// `texts`. Used when no word-vector file is supplied.
WordVectorTable random_word_vectors(std::span<const std::string> texts, std::size_t dim,
                                    std::uint64_t seed);

}  // namespace rwkvlab
