// SPDX-License-Identifier: Apache-2.0
#include "sciexp/field/env.hpp"

#include <cmath>
#include <numbers>

#include "env/docs.hpp"
#include "sciexp/error.hpp"
#include "sciexp/metrics.hpp"

namespace sciexp::field {

namespace {

script::Value history_value(const numerics::FieldHistory& h) {
  return env::make_dict({{"ts", env::real_array({h.n_t()}, h.ts)},
                         {"x", env::real_array({h.n_x()}, h.x)},
                         {"phis", script::Value(NdArray::from_complex({h.n_t(), h.n_x()}, h.phis))}});
}

}  // namespace

std::vector<std::vector<Complex>> scoring_initial_conditions() {
  const auto grid = numerics::LatticeGrid::standard();
  std::vector<std::vector<Complex>> out;
  for (double amp : {0.2, 1.0, 2.0}) {
    for (double p : {0.0, std::numbers::pi / (2.0 * grid.dx)}) {
      std::vector<Complex> phi(grid.size());
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const double x = grid.x[i];
        phi[i] = amp * std::exp(-x * x / (2 * scoring_sigma * scoring_sigma)) * std::exp(Complex(0.0, p * x));
      }
      out.push_back(std::move(phi));
    }
  }
  return out;
}

std::vector<Complex> time_derivative(const numerics::FieldHistory& h) {
  const std::size_t nt = h.n_t(), nx = h.n_x();
  if (nt < 3) throw Error(ErrorKind::shape, "need at least three time points");
  const double dt = h.ts[1] - h.ts[0];
  std::vector<Complex> d(nt * nx);
  for (std::size_t j = 0; j < nx; ++j) {
    auto f = [&](std::size_t i) { return h.phis[i * nx + j]; };
    d[j] = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2 * dt);
    for (std::size_t i = 1; i + 1 < nt; ++i) d[i * nx + j] = (f(i + 1) - f(i - 1)) / (2 * dt);
    d[(nt - 1) * nx + j] = (3.0 * f(nt - 1) - 4.0 * f(nt - 2) + f(nt - 3)) / (2 * dt);
  }
  return d;
}

FieldEnvironment::FieldEnvironment(const catalog::SystemSpec& system, std::uint64_t seed)
    : Environment(system, seed), truth_(make_truth(system)) {}

std::vector<env::ToolSpec> FieldEnvironment::tools() const {
  using env::ToolRole;
  return {
      {"run_field_evolution_experiment", env::docs::run_field_evolution_experiment,
       {{"initial_condition_code", "string", "python code setting phi0"}}, ToolRole::experiment},
      {"set_field_rhs", env::docs::set_field_rhs,
       {{"rhs_label", "string", "label for the propagators"}, {"code", "string", "python code defining U_potential and U_kinetic"}},
       ToolRole::analysis},
      {"run_field_simulation", env::docs::run_field_simulation,
       {{"rhs_label", "string", "label used with set_field_rhs"}, {"initial_condition_code", "string", "python code setting phi0"}},
       ToolRole::analysis},
      {"save_result_find_eom", env::docs::save_result_field, {{"code", "string", "python code defining U_potential and U_kinetic"}},
       ToolRole::submission},
  };
}

env::ToolOutput FieldEnvironment::call(const std::string& tool, const nlohmann::json& args, const env::Bindings&) {
  if (tool == "run_field_evolution_experiment") {
    auto phi0 = initial_condition(env::string_arg(args, "initial_condition_code"));
    return {history_value(experiment(phi0)), std::nullopt};
  }
  if (tool == "set_field_rhs") {
    std::string label = env::string_arg(args, "rhs_label");
    if (label.empty()) throw Error(ErrorKind::signature, "rhs_label must not be empty.");
    PropagatorPair p = script_propagators(env::string_arg(args, "code"));
    const auto grid = numerics::LatticeGrid::standard();
    std::vector<Complex> probe = scoring_initial_conditions()[1];
    std::vector<Complex> k_out = p.kinetic(probe, grid.k, 0.0, max_substep);
    std::vector<Complex> x_out = p.potential(probe, grid.x, 0.0, max_substep);
    for (const auto* v : {&k_out, &x_out}) {
      if (v->size() != probe.size())
        throw Error(ErrorKind::propagator_fault, "The functions must return arrays of the same shape as their input.");
      for (const auto& z : *v) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
          throw Error(ErrorKind::propagator_fault, "The functions returned non-finite values on a test field.");
      }
    }
    hypotheses_[label] = std::move(p);
    return {script::Value("The functions were set successfully under the label '" + label + "'."), std::nullopt};
  }
  if (tool == "run_field_simulation") {
    std::string label = env::string_arg(args, "rhs_label");
    auto it = hypotheses_.find(label);
    if (it == hypotheses_.end())
      throw Error(ErrorKind::not_found, "No field equation was set under the label '" + label + "'.");
    auto phi0 = initial_condition(env::string_arg(args, "initial_condition_code"));
    return {history_value(simulate(it->second, phi0)), std::nullopt};
  }
  if (tool == "save_result_find_eom") {
    require_open();
    finalize(evaluate(env::string_arg(args, "code")));
    return {script::Value(env::saved_message), std::nullopt};
  }
  throw Error(ErrorKind::not_found, "Unknown tool '" + tool + "'.");
}

env::ScoreRecord FieldEnvironment::evaluate(const std::string& code) const {
  env::ScoreRecord rec;
  try {
    PropagatorPair sub = script_propagators(code);
    std::vector<double> truth, pred;
    for (const auto& phi0 : scoring_initial_conditions()) {
      auto dt_true = time_derivative(simulate(truth_, phi0));
      auto dt_sub = time_derivative(simulate(sub, phi0));
      for (std::size_t i = 0; i < dt_true.size(); ++i) {
        truth.push_back(dt_true[i].real());
        truth.push_back(dt_true[i].imag());
        pred.push_back(dt_sub[i].real());
        pred.push_back(dt_sub[i].imag());
      }
    }
    const double raw = metrics::r_squared(truth, pred);
    rec.score = metrics::clamp_score(raw);
    rec.detail = {{"metric", "pooled_dphidt_r_squared"}, {"raw", raw}, {"initial_conditions", 6}};
  } catch (const std::exception& e) {
    rec.score = 0.0;
    rec.notes.push_back(std::string("fault: ") + e.what());
  }
  return rec;
}

}  // namespace sciexp::field
