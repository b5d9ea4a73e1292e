// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sciexp {

enum class ErrorKind {
  invalid_argument,
  not_found,
  index,
  shape,
  signature,
  diverged,
  propagator_fault,
  symmetry,
  accuracy,
  normalization,
  parameter,
  range,
  budget,
  already_finalized,
  script,
  sandbox,
  transport,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure surfaced by the library. Tool handlers turn these into
/// agent-visible text; the kind is kept for tests and logs.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sciexp
