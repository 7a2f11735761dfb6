// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// The `rwkvlab` command line: init, embed, eval, sweep, bench, diagnose.
//
// Exit codes: 0 success, 2 usage or configuration error, 1 runtime error
// (including a missing input file, which is named in the message).
//
// `--config FILE` reads key=value lines (keys are flag names with dashes
// written as underscores, '#' starts a comment). Precedence: flags, then the
// config file, then built-in defaults.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rwkvlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Config-file lines converted to "--key=value" arguments. Throws
// Error(ConfigError) on a malformed line.
std::vector<std::string> config_file_args(const std::string& text);

// "1,3,5" -> {1,3,5}. Throws Error(ConfigError) on a malformed list.
std::vector<std::size_t> parse_index_list(const std::string& text);

}  // namespace rwkvlab
