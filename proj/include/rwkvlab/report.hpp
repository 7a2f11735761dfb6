// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Evaluation reports. CSV carries the rows only:
//
//   method,split,spearman,mean_pair_seconds,peak_bytes
//   glove_baseline,validation,0.4326,1.234500e-04,8192
//
// spearman is printed with 4 decimals, seconds in %.6e, bytes as an integer.
// JSON mirrors the rows at full precision and adds the metadata block.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rwkvlab {

struct ReportRow {
  std::string method;
  std::string split;
  double spearman = 0.0;
  double mean_pair_seconds = 0.0;
  std::uint64_t peak_bytes = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ReportMetadata {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string timestamp;  // ISO-8601 UTC
  std::size_t pairs = 0;
  std::map<std::string, std::size_t> skipped_pairs;  // per method

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct EvalReport {
  std::vector<ReportRow> rows;
  ReportMetadata metadata;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(std::string_view name);  // ConfigError if unknown

inline constexpr std::string_view kReportCsvHeader =
    "method,split,spearman,mean_pair_seconds,peak_bytes";

std::string write_report(const EvalReport& report, ReportFormat format);

// Inverse of write_report. CSV yields rows only (metadata left default).
// Throws ParseError on malformed input.
EvalReport parse_report(std::string_view text, ReportFormat format);

std::string utc_timestamp();

}  // namespace rwkvlab
