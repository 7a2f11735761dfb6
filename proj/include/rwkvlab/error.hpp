// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Error kinds shared by every module. All failures surface as rwkvlab::Error
// carrying one ErrorKind so callers and tests can branch on the category.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rwkvlab {

enum class ErrorKind {
  EmptyInput,
  ShapeError,
  DegenerateInput,
  ZeroVector,
  DomainError,
  SizeLimit,
  VocabError,
  VersionError,
  ParseError,
  FormatError,
  ConfigError,
  Unsupported,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  // FormatError and friends that point at a 1-based input line.
  Error(ErrorKind kind, const std::string& message, std::size_t line);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace rwkvlab
