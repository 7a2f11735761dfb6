// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/error.hpp"

namespace rwkvlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::VocabError: return "VocabError";
    case ErrorKind::VersionError: return "VersionError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

Error::Error(ErrorKind kind, const std::string& message, std::size_t line)
    : std::runtime_error(std::string(to_string(kind)) + " (line " + std::to_string(line) +
                         "): " + message),
      kind_(kind),
      line_(line) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace rwkvlab
