// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/pairs.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <string_view>

#include "rwkvlab/error.hpp"

namespace rwkvlab {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::vector<SentencePairRecord> load_pairs(std::istream& in) {
  std::vector<SentencePairRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (!header_seen) {
      if (view != "label\tsentence1\tsentence2") {
        throw Error(ErrorKind::FormatError,
                    "header must be 'label<TAB>sentence1<TAB>sentence2'", line_no);
      }
      header_seen = true;
      continue;
    }
    if (trim(view).empty()) continue;

    const auto fields = split_tabs(view);
    if (fields.size() != 3) {
      throw Error(ErrorKind::FormatError,
                  "expected 3 tab-separated fields, found " + std::to_string(fields.size()),
                  line_no);
    }
    const auto label = trim(fields[0]);
    if (label != "0" && label != "1") {
      throw Error(ErrorKind::FormatError, "label '" + std::string(label) + "' is not 0 or 1",
                  line_no);
    }
    const auto s1 = trim(fields[1]);
    const auto s2 = trim(fields[2]);
    if (s1.empty() || s2.empty()) throw Error(ErrorKind::FormatError, "empty sentence", line_no);
    records.push_back({std::string(s1), std::string(s2), label == "1" ? 1 : 0});
  }
  if (!header_seen) throw Error(ErrorKind::FormatError, "missing header", 1);
  return records;
}

std::vector<SentencePairRecord> load_pairs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::FormatError, "cannot open pair file '" + path + "'");
  return load_pairs(in);
}

}  // namespace rwkvlab
