// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// Text checkpoint format (grammar in docs/checkpoint-format.md):
//
//   rwkvlab-checkpoint 1
//   config d_model <uint>
//   config n_layers <uint>
//   config vocab_size <uint>
//   config seed <uint64>
//   config layer_norm <0|1>
//   tensor <name> <rows> <cols>      (vectors are 1 x d)
//   <cols space-separated doubles>   (repeated <rows> times)
//   ...                              (every tensor, fixed order)
//   checksum <16 lowercase hex digits, FNV-1a 64 of all preceding bytes>
//   end
//
// Doubles use the shortest round-trip decimal form, so save -> load is
// bit-exact.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "rwkvlab/model.hpp"

namespace rwkvlab {

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const RwkvParams& params, std::ostream& out);
std::string save_checkpoint(const RwkvParams& params);

// Throws VersionError for an unknown version tag, ParseError for truncated,
// malformed or checksum-mismatched input.
RwkvParams load_checkpoint(std::istream& in);
RwkvParams load_checkpoint_string(std::string_view text);

// Reads/writes a file; a missing file is a ParseError naming the path.
void save_checkpoint_file(const RwkvParams& params, const std::string& path);
RwkvParams load_checkpoint_file(const std::string& path);

}  // namespace rwkvlab
