// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

// Precondition / domain violation. `field()` names the offending input when
// there is one (e.g. "gamma", "t", "component[1]").
class DomainError : public std::invalid_argument {
 public:
  DomainError(std::string field, const std::string& what)
      : std::invalid_argument(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Raised when a Gaussian integral has no convergent real part.
class DivergentIntegral : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace qbm
