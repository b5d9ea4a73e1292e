// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "sciexp/env/environment.hpp"

namespace sciexp::session {

struct Closeness {
  std::string statement;
  double ratio = 0.0;
};

inline constexpr double almost_equal_ratio = 1e-6;
inline constexpr double approx_equal_ratio = 1e-2;

/// Mean-square error over the larger mean-square variation of the two arrays.
Closeness approx_equal(const NdArray& a1, const NdArray& a2);

/// execute_code without a sandbox: memory as variables, ode_solve on request.
script::Value execute_locally(const std::string& code, const env::Bindings& memory, bool with_ode_solve);

/// The ode_solve helper of the analysis tools, callable from agent code.
script::Value ode_solve_builtin();

/// Generic analysis tools; the execute_code doc mentions ode_solve only when offered.
std::vector<env::ToolSpec> generic_tools(bool with_ode_solve);

}  // namespace sciexp::session
