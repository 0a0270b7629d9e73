// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace qbm {

// Non-fatal numerical conditions (boundary leakage, aliasing, coarse phase
// grids). Collected process-wide; callers drain them after a run.
struct Warning {
  std::string code;
  std::string message;
  double value = 0.0;
};

void warn(std::string code, std::string message, double value);
std::vector<Warning> drain_warnings();

}  // namespace qbm
