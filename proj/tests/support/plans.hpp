// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/session/agent.hpp"
#include "support/truth.hpp"

namespace sciexp::testing {

using Turn = std::vector<session::ToolCall>;

inline std::string list_lit(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

/// Observed initial conditions as observe_evolution arguments.
inline nlohmann::json mech_observe_args(const catalog::SystemSpec& s, double shift) {
  using catalog::MechLayout;
  const std::size_t n = s.n_observed;
  std::vector<double> q(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = 0.6 * std::sin(1.3 * double(i) + 0.4 + shift);
    v[i] = 0.2 * std::cos(double(i) + shift);
  }
  nlohmann::json a = nlohmann::json::object();
  switch (s.layout) {
    case MechLayout::particle_lists: {
      std::vector<double> x, y, vx, vy;
      for (std::size_t i = 0; i < n / 2; ++i) {
        x.push_back(2.5 * std::sin(2.1 * double(i) + shift));
        y.push_back(2.5 * std::cos(1.7 * double(i) + 0.3 + shift));
        vx.push_back(v[2 * i]);
        vy.push_back(v[2 * i + 1]);
      }
      return {{"x_list", list_lit(x)}, {"y_list", list_lit(y)}, {"vx_list", list_lit(vx)}, {"vy_list", list_lit(vy)}};
    }
    case MechLayout::gravity:
    case MechLayout::hidden_2d:
      for (std::size_t p = 0; p < n / 2; ++p) {
        const double ang = 2.1 * double(p) + shift;
        a["x" + std::to_string(p + 1)] = 0.9 * std::cos(ang);
        a["y" + std::to_string(p + 1)] = 0.9 * std::sin(ang);
        a["vx" + std::to_string(p + 1)] = -0.5 * std::sin(ang);
        a["vy" + std::to_string(p + 1)] = 0.5 * std::cos(ang);
      }
      return a;
    default:
      for (std::size_t i = 0; i < n; ++i) {
        a["q" + std::to_string(i)] = q[i];
        a["q" + std::to_string(i) + "_dot"] = v[i];
      }
      return a;
  }
}

inline session::ToolCall call(std::string name, nlohmann::json args, const std::string& label = {}) {
  if (!label.empty()) args["result_label"] = label;
  return {"", std::move(name), std::move(args)};
}

inline nlohmann::json bloch_rows(std::size_t n) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 0.3 + 0.4 * double(i), ph = 0.7 * double(i);
    rows.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
  }
  return rows;
}

/// A benign exploration touching every tool of the task, one deliberate error,
/// then (optionally) the truth submission.
inline std::vector<Turn> exploration_plan(const catalog::SystemSpec& s, bool submit) {
  using catalog::Family;
  std::vector<Turn> turns;
  Turn a, b;
  switch (s.family) {
    case Family::mechanical: {
      a.push_back(call("observe_evolution", mech_observe_args(s, 0.0), "obs1"));
      nlohmann::json ic = mech_observe_args(s, 0.5);
      if (s.layout != catalog::MechLayout::particle_lists) {
        std::string rows = "[[";
        bool first = true;
        for (auto& [k, v] : ic.items()) {
          rows += (first ? "" : ", ") + std::to_string(v.get<double>());
          first = false;
        }
        a.push_back(call("observe_multiple_evolutions", {{"initial_conditions", rows + "]]"}}, "obs2"));
      }
      b.push_back(call("execute_code", {{"code", "result = {'n': obs1['ts'].shape[0], 'first': obs1['array'][0]}"}},
                       "stats"));
      b.push_back(call("approx_equal", {{"a1", "obs1['array']"}, {"a2", "obs1['array'] * 1.001"}}, "cmp"));
      break;
    }
    case Family::field: {
      const std::string ic = "phi0 = jnp.exp(-x**2/0.98) * (1 + 0j)";
      a.push_back(call("run_field_evolution_experiment", {{"initial_condition_code", ic}}, "exp1"));
      a.push_back(call("set_field_rhs", {{"rhs_label", "free"}, {"code", "def U_potential(phi, x, t, dt):\n    return phi\n"
                                                                   "def U_kinetic(phi_k, k, t, dt):\n    return jnp.exp(-1j*(1 - jnp.cos(k))*dt)*phi_k\n"}},
                       "set1"));
      b.push_back(call("run_field_simulation", {{"rhs_label", "free"}, {"initial_condition_code", ic}}, "sim1"));
      b.push_back(call("approx_equal", {{"a1", "exp1['phis']"}, {"a2", "sim1['phis']"}}, "cmp"));
      break;
    }
    case Family::quantum_gs: {
      const bool params = !s.tunables.empty() || s.size_tunable;
      std::string pcode;
      for (const auto& t : s.tunables) pcode += t + " = 0.3\n";
      if (s.size_tunable) pcode += "N = 4\n";
      a.push_back(call("set_operator_for_ground_state",
                       {{"operator_label", "mx"}, {"operator_code", "H = Sx[0]\nfor j in range(1, N):\n    H = H + Sx[j]\nH = H / N\n"}},
                       "op1"));
      a.push_back(call("set_operator_for_ground_state", {{"operator_label", "czz"}, {"operator_code", "H = Sz[0]@Sz[1]"}}, "op2"));
      if (params)
        a.push_back(call("run_experiment_ground_state_with_parameters", {{"set_params_code", pcode}, {"operators", "mx, czz"}},
                         "gs1"));
      else
        a.push_back(call("run_experiment_ground_state", {{"operators", "mx,czz"}}, "gs1"));
      b.push_back(call("init_spins", {{"N", 3}}, "init"));
      b.push_back(call("set_Hamiltonian", {{"hamiltonian_label", "h1"}, {"hamiltonian_code", "H = Sz[0]@Sz[1] + Sz[1]@Sz[2] - Sx[0] - Sx[1] - Sx[2]"}},
                       "seth"));
      b.push_back(call("set_operator", {{"operator_label", "x0"}, {"operator_code", "H = Sx[0]"}}, "seto"));
      b.push_back(call("get_ground_state_expectations", {{"hamiltonian_label", "h1"}, {"operators", "x0"}}, "gse"));
      break;
    }
    case Family::quantum_dyn: {
      const bool params = !s.tunables.empty();
      const std::size_t n_obs = s.observed_spins.empty() ? s.n_spins : s.observed_spins.size();
      nlohmann::json args{{"bloch_vectors", bloch_rows(n_obs)}, {"T", 2.0}, {"dt", 0.1}};
      if (params) {
        std::string pcode;
        for (const auto& t : s.tunables) pcode += t + " = 0.3\n";
        args["parameter_code"] = pcode;
      }
      a.push_back(call(params ? "run_experiment_with_parameters" : "run_experiment", args, "dyn1"));
      b.push_back(call("init_spins", {{"N", 2}}, "init"));
      b.push_back(call("set_Hamiltonian", {{"hamiltonian_label", "h1"}, {"hamiltonian_code", "H = Sz[0]@Sz[1] - Sx[0] - Sx[1]"}},
                       "seth"));
      b.push_back(call("solve_SEQ", {{"hamiltonian_label", "h1"}, {"bloch_vectors", bloch_rows(2)}, {"T", 2.0}, {"dt", 0.1}},
                       "seq1"));
      b.push_back(call("execute_code", {{"code", "result = {'m': jnp.mean(seq1['Sz_t'])}"}}, "stats"));
      break;
    }
  }
  b.push_back(call("approx_equal", {{"a1", "[1, 2, 3]"}, {"a2", "[1, 2]"}}, "bad"));
  turns.push_back(std::move(a));
  turns.push_back(std::move(b));
  if (submit) {
    auto [tool, args] = truth_submission(s);
    turns.push_back({call(tool, args)});
  }
  return turns;
}

inline nlohmann::json plan_script(const std::vector<Turn>& turns) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < turns.size(); ++i) {
    nlohmann::json calls = nlohmann::json::array();
    for (const auto& c : turns[i]) calls.push_back({{"name", c.name}, {"arguments", c.arguments}});
    out.push_back({{"message", "Step " + std::to_string(i + 1) + "."}, {"tool_calls", calls}});
  }
  return {{"turns", out}, {"rank", "max_self_reported"}};
}

}  // namespace sciexp::testing
