// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace pvlab {

// configuration problems: bad keys, bad parameter ranges (exit code 1)
struct config_error : std::runtime_error {
  explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

// bad data encountered at runtime: duplicates, negative densities (exit 2)
struct data_error : std::runtime_error {
  explicit data_error(const std::string& m) : std::runtime_error(m) {}
};

// a numeric tolerance could not be met
struct precision_error : std::runtime_error {
  explicit precision_error(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace pvlab
