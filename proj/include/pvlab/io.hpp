// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "pvlab/experiments.hpp"

namespace pvlab {

// frozen replicate CSV schema (see docs/FORMATS.md)
std::vector<std::string> csv_columns(int d);

std::string format_g17(double v);

// one row per replicate (per iteration for iterated runs), deterministic
// bytes for a fixed seed root
std::string replicate_csv(const ExperimentResult& res,
                          const std::string& config_hash);
ExperimentResult parse_replicate_csv(const std::string& text);

std::string fit_to_json(const ScalingFit& fit);
std::string estimate_to_json(const HalfSpaceEstimate& est);

struct RunManifest {
  std::string config_hash;
  std::string seed_root_path;
  std::string seed_root_state_hex;
  std::string version;
  std::string started;
  std::string finished;
  double taint_fraction = 0.0;
  bool tainted = false;
  std::vector<std::string> outputs;
};
std::string manifest_to_json(const RunManifest& m);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

std::string hex64(std::uint64_t v);
std::string iso_timestamp();

// per-lambda aggregates (mean, standard error, variance) of every
// statistic column, as JSON
std::string summary_json(const ExperimentResult& res,
                         const std::string& config_hash);

}  // namespace pvlab
