// SPDX-License-Identifier: Apache-2.0
#include "sciexp/error.hpp"

namespace sciexp {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::index: return "index";
    case ErrorKind::shape: return "shape";
    case ErrorKind::signature: return "signature";
    case ErrorKind::diverged: return "diverged";
    case ErrorKind::propagator_fault: return "propagator_fault";
    case ErrorKind::symmetry: return "symmetry";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::range: return "range";
    case ErrorKind::budget: return "budget";
    case ErrorKind::already_finalized: return "already_finalized";
    case ErrorKind::script: return "script";
    case ErrorKind::sandbox: return "sandbox";
    case ErrorKind::transport: return "transport";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace sciexp
