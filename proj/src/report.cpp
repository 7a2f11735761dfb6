// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.

#include "rwkvlab/report.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>

#include "json.hpp"

#include "rwkvlab/error.hpp"

namespace rwkvlab {
namespace {

using nlohmann::json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw Error(ErrorKind::ParseError, "unterminated quote", line_no);
  fields.push_back(std::move(cur));
  return fields;
}

template <class T>
T parse_field(const std::string& s, std::size_t line_no) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::ParseError, "bad numeric field '" + s + "'", line_no);
  }
  return value;
}

std::string write_csv(const EvalReport& report) {
  std::string out(kReportCsvHeader);
  out += '\n';
  char buf[128];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), ",%.4f,%.6e,%llu\n", row.spearman, row.mean_pair_seconds,
                  static_cast<unsigned long long>(row.peak_bytes));
    out += csv_field(row.method) + "," + csv_field(row.split) + buf;
  }
  return out;
}

EvalReport parse_csv(std::string_view text) {
  EvalReport report;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kReportCsvHeader) throw Error(ErrorKind::ParseError, "bad CSV header", 1);
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv_line(line, line_no);
    if (f.size() != 5) throw Error(ErrorKind::ParseError, "expected 5 fields", line_no);
    report.rows.push_back({f[0], f[1], parse_field<double>(f[2], line_no),
                           parse_field<double>(f[3], line_no),
                           parse_field<std::uint64_t>(f[4], line_no)});
  }
  if (line_no == 0) throw Error(ErrorKind::ParseError, "empty CSV", 1);
  return report;
}

std::string write_json(const EvalReport& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"method", row.method},
                    {"split", row.split},
                    {"spearman", row.spearman},
                    {"mean_pair_seconds", row.mean_pair_seconds},
                    {"peak_bytes", row.peak_bytes}});
  }
  const auto& m = report.metadata;
  json doc = {{"metadata",
               {{"seed", m.seed},
                {"config_digest", m.config_digest},
                {"timestamp", m.timestamp},
                {"pairs", m.pairs},
                {"skipped_pairs", m.skipped_pairs}}},
              {"rows", rows}};
  return doc.dump(2) + "\n";
}

EvalReport parse_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    EvalReport report;
    const auto& m = doc.at("metadata");
    report.metadata.seed = m.at("seed").get<std::uint64_t>();
    report.metadata.config_digest = m.at("config_digest").get<std::string>();
    report.metadata.timestamp = m.at("timestamp").get<std::string>();
    report.metadata.pairs = m.at("pairs").get<std::size_t>();
    report.metadata.skipped_pairs =
        m.at("skipped_pairs").get<std::map<std::string, std::size_t>>();
    for (const auto& r : doc.at("rows")) {
      report.rows.push_back({r.at("method").get<std::string>(), r.at("split").get<std::string>(),
                             r.at("spearman").get<double>(),
                             r.at("mean_pair_seconds").get<double>(),
                             r.at("peak_bytes").get<std::uint64_t>()});
    }
    return report;
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, std::string("report JSON: ") + e.what());
  }
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  fail(ErrorKind::ConfigError, "unknown report format '" + std::string(name) + "'");
}

std::string write_report(const EvalReport& report, ReportFormat format) {
  return format == ReportFormat::csv ? write_csv(report) : write_json(report);
}

EvalReport parse_report(std::string_view text, ReportFormat format) {
  return format == ReportFormat::csv ? parse_csv(text) : parse_json(text);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace rwkvlab
