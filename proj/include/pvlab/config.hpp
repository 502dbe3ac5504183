// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "pvlab/experiments.hpp"

namespace pvlab {

// Line-oriented key = value configuration (see docs/FORMATS.md).
// Unknown keys fail with the nearest valid key named; all diagnostics
// carry the line number.
struct ParsedConfig {
  ExperimentConfig experiment;
  std::string mode = "scaling";  // scaling | iterate | maxima | zone
  std::string out_dir = "runs/out";
  std::map<std::string, std::string> entries;  // normalized key/value lines
  std::string canonical;  // normalized serialization (a parse fixed point)
  std::string hash_hex;   // fnv-1a 64 of the canonical text
};

ParsedConfig parse_config_text(const std::string& text);

// canonical serialization; parse(emit(c)) reproduces c exactly
std::string emit_config(const ParsedConfig& cfg);

}  // namespace pvlab
