// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/checkpoint.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <type_traits>
#include <vector>

#include "rwkvlab/error.hpp"
#include "rwkvlab/hash.hpp"

namespace rwkvlab {
namespace {

constexpr std::string_view kMagic = "rwkvlab-checkpoint";

void append_double(std::string& out, double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, res.ptr);
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string render(const RwkvParams& p) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kCheckpointVersion) + "\n";
  out += "config d_model " + std::to_string(p.config.d_model) + "\n";
  out += "config n_layers " + std::to_string(p.config.n_layers) + "\n";
  out += "config vocab_size " + std::to_string(p.config.vocab_size) + "\n";
  out += "config seed " + std::to_string(p.config.seed) + "\n";
  out += std::string("config layer_norm ") + (p.config.layer_norm ? "1" : "0") + "\n";

  for_each_tensor(p, [&](const std::string& name, const auto& t) {
    std::size_t rows = 1, cols = t.size();
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Mat64>) {
      rows = t.rows();
      cols = t.cols();
    }
    out += "tensor " + name + " " + std::to_string(rows) + " " + std::to_string(cols) + "\n";
    const auto values = t.span();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (c) out += ' ';
        append_double(out, values[r * cols + c]);
      }
      out += '\n';
    }
  });
  out += "checksum " + hex64(fnv1a64(out)) + "\n";
  out += "end\n";
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t line_no() const noexcept { return line_; }

  std::string_view next() {
    if (pos_ >= text_.size()) fail_here("unexpected end of checkpoint");
    const std::size_t nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) fail_here("unterminated final line");
    const std::string_view line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_;
    return line;
  }

  [[noreturn]] void fail_here(const std::string& what) const {
    throw Error(ErrorKind::ParseError, what, line_ + 1);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) parts.push_back(line.substr(start, i - start));
  }
  return parts;
}

template <class T>
T parse_number(std::string_view tok, const LineReader& reader) {
  T value{};
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    reader.fail_here("malformed number '" + std::string(tok) + "'");
  }
  return value;
}

std::uint64_t config_value(LineReader& reader, std::string_view key) {
  const auto parts = split_spaces(reader.next());
  if (parts.size() != 3 || parts[0] != "config" || parts[1] != key) {
    reader.fail_here("expected 'config " + std::string(key) + " <value>'");
  }
  return parse_number<std::uint64_t>(parts[2], reader);
}

void read_tensor(LineReader& reader, const std::string& name, std::size_t rows,
                 std::size_t cols, std::span<double> dest) {
  const auto header = split_spaces(reader.next());
  if (header.size() != 4 || header[0] != "tensor" || header[1] != name) {
    reader.fail_here("expected tensor '" + name + "'");
  }
  if (parse_number<std::size_t>(header[2], reader) != rows ||
      parse_number<std::size_t>(header[3], reader) != cols) {
    reader.fail_here("tensor '" + name + "' has the wrong shape");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const auto values = split_spaces(reader.next());
    if (values.size() != cols) reader.fail_here("tensor '" + name + "' row has wrong width");
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = parse_number<double>(values[c], reader);
      if (!std::isfinite(x)) reader.fail_here("non-finite value in '" + name + "'");
      dest[r * cols + c] = x;
    }
  }
}

}  // namespace

void save_checkpoint(const RwkvParams& params, std::ostream& out) {
  out << save_checkpoint(params);
}

std::string save_checkpoint(const RwkvParams& params) {
  validate_params(params);
  return render(params);
}

RwkvParams load_checkpoint_string(std::string_view text) {
  LineReader reader(text);
  const auto magic = split_spaces(reader.next());
  if (magic.size() != 2 || magic[0] != kMagic) reader.fail_here("not an rwkvlab checkpoint");
  const int version = parse_number<int>(magic[1], reader);
  if (version != kCheckpointVersion) {
    fail(ErrorKind::VersionError, "checkpoint version " + std::to_string(version) +
                                      " (this build reads version " +
                                      std::to_string(kCheckpointVersion) + ")");
  }

  ModelConfig config;
  config.d_model = config_value(reader, "d_model");
  config.n_layers = config_value(reader, "n_layers");
  config.vocab_size = config_value(reader, "vocab_size");
  config.seed = config_value(reader, "seed");
  const std::uint64_t norm = config_value(reader, "layer_norm");
  if (norm > 1) reader.fail_here("layer_norm must be 0 or 1");
  config.layer_norm = norm == 1;
  try {
    config.validate();
  } catch (const Error& e) {
    reader.fail_here(e.what());
  }

  // zero_weight_model gives every tensor its shape; the stream fills values.
  RwkvParams params = zero_weight_model(config);
  for_each_tensor(params, [&](const std::string& name, auto& t) {
    std::size_t rows = 1, cols = t.size();
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Mat64>) {
      rows = t.rows();
      cols = t.cols();
    }
    read_tensor(reader, name, rows, cols, t.span());
  });

  const std::size_t payload_end = reader.offset();
  const auto checksum = split_spaces(reader.next());
  if (checksum.size() != 2 || checksum[0] != "checksum") reader.fail_here("expected checksum");
  if (checksum[1] != hex64(fnv1a64(text.substr(0, payload_end)))) {
    reader.fail_here("checksum mismatch (corrupted checkpoint)");
  }
  if (reader.next() != "end") reader.fail_here("expected 'end'");

  try {
    validate_params(params);
  } catch (const Error& e) {
    reader.fail_here(e.what());
  }
  return params;
}

RwkvParams load_checkpoint(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_checkpoint_string(text);
}

void save_checkpoint_file(const RwkvParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::ParseError, "cannot open '" + path + "' for writing");
  out << save_checkpoint(params);
  if (!out) fail(ErrorKind::ParseError, "failed writing '" + path + "'");
}

RwkvParams load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

}  // namespace rwkvlab
