// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Labeled sentence pairs, tab-separated:
//
//   label<TAB>sentence1<TAB>sentence2      (header, line 1)
//   1<TAB>The cat sat .<TAB>A cat sat .     (one record per line)
//
// Labels are 0 or 1. Blank lines are ignored; a trailing '\r' is stripped.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rwkvlab {

struct SentencePairRecord {
  std::string sentence1;
  std::string sentence2;
  int label = 0;
};

// Throws FormatError (with line) for a bad header, a label outside {0, 1},
// a wrong field count or an empty sentence.
std::vector<SentencePairRecord> load_pairs(std::istream& in);
std::vector<SentencePairRecord> load_pairs_file(const std::string& path);

}  // namespace rwkvlab
