// SPDX-License-Identifier: Apache-2.0
#include "qbm/warnings.hpp"

#include <mutex>

namespace qbm {
namespace {
std::mutex mu;
std::vector<Warning>& sink() {
  static std::vector<Warning> w;
  return w;
}
}  // namespace

void warn(std::string code, std::string message, double value) {
  std::lock_guard<std::mutex> lock(mu);
  sink().push_back({std::move(code), std::move(message), value});
}

std::vector<Warning> drain_warnings() {
  std::lock_guard<std::mutex> lock(mu);
  std::vector<Warning> out;
  out.swap(sink());
  return out;
}

}  // namespace qbm
