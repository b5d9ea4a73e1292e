// SPDX-License-Identifier: Apache-2.0
#include "sciexp/quantum/env.hpp"

#include <cmath>
#include <stdexcept>

#include "env/docs.hpp"
#include "sciexp/error.hpp"
#include "sciexp/metrics.hpp"
#include "sciexp/script/interpreter.hpp"
#include "sciexp/script/ops.hpp"

namespace sciexp::quantum {

namespace {

std::string erase_fragment(std::string text, const std::string& from, const std::string& to = {}) {
  const auto pos = text.find(from);
  if (pos == std::string::npos) throw std::logic_error("tool documentation fragment missing");
  return text.replace(pos, from.size(), to);
}

std::string run_experiment_doc() {
  std::string d = env::docs::run_experiment_with_parameters;
  d = erase_fragment(d, "def run_experiment_with_parameters(bloch_vectors:jax.Array, T: float, dt: float, parameter_code: str):",
                     "def run_experiment(bloch_vectors:jax.Array, T: float, dt: float):");
  return erase_fragment(d, "        parameter_code: python code that sets the parameter numerical values\n");
}

std::string run_experiment_ground_state_doc() {
  std::string d = env::docs::run_experiment_ground_state_with_parameters;
  d = erase_fragment(d, "run_experiment_ground_state_with_parameters(set_params_code: str, operators: str)",
                     "run_experiment_ground_state(operators: str)");
  d = erase_fragment(d,
                     ", for the given\n    experimental system, for given physical parameters. If the experimental system\n"
                     "    has variable size N, you must also set N in the code given here!",
                     ", for the given\n    experimental system.");
  return erase_fragment(d, "        set_params_code: python code that sets the numerical values of the system \n        parameters.\n");
}

void check_times(double T, double dt) {
  if (!std::isfinite(T) || !std::isfinite(dt) || dt <= 0.0 || T < 0.0)
    throw Error(ErrorKind::range, "T must be non-negative and dt positive.");
  if (T > max_duration) throw Error(ErrorKind::range, "T must not exceed " + std::to_string(static_cast<int>(max_duration)) + ".");
  if (numerics::output_steps(T, dt) > max_output_steps)
    throw Error(ErrorKind::range, "Too many time steps: int(T/dt)+1 must not exceed " + std::to_string(max_output_steps) + ".");
}

std::size_t spin_count_arg(const nlohmann::json& args) {
  const double v = env::number_arg(args, "N");
  if (v != std::floor(v)) throw Error(ErrorKind::signature, "N must be an integer.");
  return v < 0 ? 0 : static_cast<std::size_t>(v);
}

// traces[c][i * cols + j] for the selected spins, either [steps][spins] or [spins][steps].
script::Value record_value(const numerics::SpinRecord& r, std::span<const std::size_t> spins, bool spins_first) {
  const std::size_t ns = spins.size(), nt = r.steps();
  auto pick = [&](const std::vector<double>& src) {
    std::vector<double> out(ns * nt);
    for (std::size_t t = 0; t < nt; ++t) {
      for (std::size_t k = 0; k < ns; ++k) {
        const double v = src[t * r.n_spins + spins[k]];
        if (spins_first) out[k * nt + t] = v;
        else out[t * ns + k] = v;
      }
    }
    return env::real_array(spins_first ? Shape{ns, nt} : Shape{nt, ns}, out);
  };
  return env::make_dict({{"ts", env::real_array({nt}, r.ts)}, {"Sx_t", pick(r.sx)}, {"Sy_t", pick(r.sy)}, {"Sz_t", pick(r.sz)}});
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\n\r'\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r'\"");
  return s.substr(b, e - b + 1);
}

}  // namespace

numerics::QuantumState controlled_product_state(std::size_t n, std::span<const std::size_t> controlled,
                                                std::span<const std::array<double, 3>> bloch) {
  if (controlled.size() != bloch.size()) throw Error(ErrorKind::shape, "one Bloch vector per controlled spin");
  std::vector<std::array<double, 3>> all(n, std::array<double, 3>{0.0, 0.0, 1.0});
  for (std::size_t k = 0; k < controlled.size(); ++k) all.at(controlled[k]) = bloch[k];
  return numerics::product_state(all);
}

std::vector<std::array<double, 3>> parse_bloch(const script::Value& v, std::size_t n_rows) {
  NdArray a = script::to_array(v);
  if (a.ndim() != 2 || a.shape()[0] != n_rows || a.shape()[1] != 3)
    throw Error(ErrorKind::shape, "bloch_vectors must have shape (" + std::to_string(n_rows) + ", 3), got " +
                                      a.shape_string() + ".");
  const auto vals = a.real_values(1e-12);
  std::vector<std::array<double, 3>> out(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t c = 0; c < 3; ++c) out[i][c] = vals[3 * i + c];
    const double norm = std::sqrt(out[i][0] * out[i][0] + out[i][1] * out[i][1] + out[i][2] * out[i][2]);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > bloch_tolerance)
      throw Error(ErrorKind::normalization, "Bloch vector " + std::to_string(i) + " is not normalized (norm " +
                                                script::repr(script::Value(norm)) + ").");
  }
  return out;
}

QuantumEnvironment::QuantumEnvironment(const catalog::SystemSpec& system, std::uint64_t seed)
    : Environment(system, seed) {
  if (system.family != catalog::Family::quantum_gs && system.family != catalog::Family::quantum_dyn)
    throw Error(ErrorKind::invalid_argument, "not a spin system: " + system.id);
}

std::vector<std::size_t> QuantumEnvironment::accessible_spins(std::size_t n) const {
  std::vector<std::size_t> s;
  if (system_.observed_spins.empty()) {
    for (std::size_t j = 0; j < n; ++j) s.push_back(j);
  } else {
    for (auto j : system_.observed_spins) {
      if (j < n) s.push_back(j);
    }
  }
  return s;
}

std::vector<env::ToolSpec> QuantumEnvironment::tools() const {
  using env::ToolRole;
  const env::ToolParam operators{"operators", "string", "comma-delimited operator labels"};
  std::vector<env::ToolSpec> t;
  if (ground_state_task()) {
    t.push_back({"set_operator_for_ground_state", env::docs::set_operator_for_ground_state,
                 {{"operator_label", "string", "label"}, {"operator_code", "string", "python code defining H"}},
                 ToolRole::experiment});
    if (has_parameters()) {
      t.push_back({"run_experiment_ground_state_with_parameters", env::docs::run_experiment_ground_state_with_parameters,
                   {{"set_params_code", "string", "python code setting the parameters"}, operators}, ToolRole::experiment});
    } else {
      t.push_back({"run_experiment_ground_state", run_experiment_ground_state_doc(), {operators}, ToolRole::experiment});
    }
  } else {
    std::vector<env::ToolParam> p{{"bloch_vectors", "array", "(N_control, 3) unit Bloch vectors"},
                                  {"T", "number", "duration"},
                                  {"dt", "number", "output step"}};
    if (has_parameters()) {
      p.push_back({"parameter_code", "string", "python code setting the parameters"});
      t.push_back({"run_experiment_with_parameters", env::docs::run_experiment_with_parameters, p, ToolRole::experiment});
    } else {
      t.push_back({"run_experiment", run_experiment_doc(), p, ToolRole::experiment});
    }
  }
  t.push_back({"init_spins", env::docs::init_spins, {{"N", "integer", "number of spins"}}, ToolRole::analysis});
  t.push_back({"set_Hamiltonian", env::docs::set_hamiltonian,
               {{"hamiltonian_label", "string", "label"}, {"hamiltonian_code", "string", "python code defining H"}},
               ToolRole::analysis});
  if (ground_state_task()) {
    t.push_back({"set_operator", env::docs::set_operator,
                 {{"operator_label", "string", "label"}, {"operator_code", "string", "python code defining H"}},
                 ToolRole::analysis});
    t.push_back({"get_ground_state_expectations", env::docs::get_ground_state_expectations,
                 {{"hamiltonian_label", "string", "label"}, operators}, ToolRole::analysis});
  } else {
    t.push_back({"solve_SEQ", env::docs::solve_seq,
                 {{"hamiltonian_label", "string", "label"},
                  {"bloch_vectors", "array", "(N, 3) unit Bloch vectors"},
                  {"T", "number", "duration"},
                  {"dt", "number", "output step"}},
                 ToolRole::analysis});
  }
  t.push_back({"announce_Hamiltonian", env::docs::announce_hamiltonian,
               {{"Hamiltonian", "string", "python code defining H"}}, ToolRole::submission});
  return t;
}

std::pair<Bindings, std::size_t> QuantumEnvironment::parse_parameters(const std::string& code) const {
  script::Interpreter in;
  in.exec(code);
  Bindings b;
  for (const auto& name : system_.tunables) {
    if (!in.has(name)) throw Error(ErrorKind::parameter, "The parameter " + name + " has not been set.");
    const script::Value v = in.get(name);
    if (!v.is_number() && !v.is_array()) throw Error(ErrorKind::parameter, "The parameter " + name + " must be a number.");
    b[name] = script::to_double(v.is_array() ? script::wrap_array(script::to_array(v)) : v);
  }
  std::size_t n = system_.n_spins;
  if (system_.size_tunable) {
    if (!in.has("N")) throw Error(ErrorKind::parameter, "The parameter N has not been set.");
    const double v = script::to_double(in.get("N"));
    if (v != std::floor(v) || v < 1 || v > static_cast<double>(numerics::max_spins))
      throw Error(ErrorKind::range, "N must be an integer between 1 and " + std::to_string(numerics::max_spins) + ".");
    n = static_cast<std::size_t>(v);
  }
  return {b, n};
}

numerics::SpinRecord QuantumEnvironment::experiment(std::span<const std::array<double, 3>> bloch, double T, double dt,
                                                    const Bindings& bindings, std::size_t n) const {
  check_times(T, dt);
  const auto h = numerics::make_hermitian_operator(truth_hamiltonian(system_, n, bindings), n);
  const auto spins = accessible_spins(n);
  return numerics::evolve_state(h, controlled_product_state(n, spins, bloch), T, dt);
}

const numerics::GroundState& QuantumEnvironment::truth_ground_state(const Bindings& bindings, std::size_t n) const {
  std::vector<double> key;
  for (const auto& [k, v] : bindings) key.push_back(v);
  auto it = gs_cache_.find({n, key});
  if (it != gs_cache_.end()) return it->second;
  if (gs_cache_.size() >= 16) gs_cache_.clear();
  auto h = numerics::make_hermitian_operator(truth_hamiltonian(system_, n, bindings), n);
  return gs_cache_.emplace(std::make_pair(n, key), numerics::ground_state(h)).first->second;
}

std::vector<double> QuantumEnvironment::ground_state_experiment(const std::vector<std::string>& codes,
                                                                const Bindings& bindings, std::size_t n) const {
  std::vector<numerics::SparseOperator> ops;
  for (const auto& c : codes) ops.push_back(numerics::make_hermitian_operator(materialize_operator(c, n, {}), n).matrix);
  const auto& gs = truth_ground_state(bindings, n);
  std::vector<double> out;
  for (const auto& o : ops) out.push_back(numerics::expectation(o, gs.state));
  return out;
}

std::vector<std::string> QuantumEnvironment::operator_labels(const std::string& list) const {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string::npos) end = list.size();
    std::string label = trim(list.substr(start, end - start));
    if (!label.empty()) out.push_back(label);
    start = end + 1;
  }
  if (out.empty()) throw Error(ErrorKind::signature, "No operator labels were given.");
  return out;
}

env::ToolOutput QuantumEnvironment::call(const std::string& tool, const nlohmann::json& args,
                                         const env::Bindings& memory) {
  auto message = [](std::string s) { return env::ToolOutput{script::Value(std::move(s)), std::nullopt}; };
  auto require_n = [&] {
    if (!n_init_) throw Error(ErrorKind::invalid_argument, "Call init_spins first to set the number of spins.");
    return *n_init_;
  };
  auto dict_of = [](const std::vector<std::string>& labels, const std::vector<double>& values) {
    std::vector<std::pair<std::string, script::Value>> items;
    for (std::size_t i = 0; i < labels.size(); ++i) items.emplace_back(labels[i], script::Value(values[i]));
    return env::make_dict(std::move(items));
  };

  if (tool == "set_operator_for_ground_state" && ground_state_task()) {
    const std::string label = env::string_arg(args, "operator_label");
    const std::string code = env::string_arg(args, "operator_code");
    if (label.empty()) throw Error(ErrorKind::signature, "operator_label must not be empty.");
    numerics::make_hermitian_operator(materialize_operator(code, system_.n_spins, {}), system_.n_spins);
    experiment_operators_[label] = code;
    return message("The operator was set successfully under the label '" + label + "'.");
  }
  if ((tool == "run_experiment_ground_state" || tool == "run_experiment_ground_state_with_parameters") &&
      ground_state_task() && has_parameters() == (tool != "run_experiment_ground_state")) {
    auto [bindings, n] = has_parameters() ? parse_parameters(env::string_arg(args, "set_params_code"))
                                          : std::pair<Bindings, std::size_t>{{}, system_.n_spins};
    const auto labels = operator_labels(env::string_arg(args, "operators"));
    std::vector<std::string> codes;
    for (const auto& l : labels) {
      auto it = experiment_operators_.find(l);
      if (it == experiment_operators_.end())
        throw Error(ErrorKind::not_found, "No operator was set under the label '" + l + "'.");
      codes.push_back(it->second);
    }
    return {dict_of(labels, ground_state_experiment(codes, bindings, n)), std::nullopt};
  }
  if ((tool == "run_experiment" || tool == "run_experiment_with_parameters") && !ground_state_task() &&
      has_parameters() == (tool == "run_experiment_with_parameters")) {
    auto [bindings, n] = has_parameters() ? parse_parameters(env::string_arg(args, "parameter_code"))
                                          : std::pair<Bindings, std::size_t>{{}, system_.n_spins};
    const auto spins = accessible_spins(n);
    const auto bloch = parse_bloch(env::value_arg(args, "bloch_vectors", memory), spins.size());
    const auto rec = experiment(bloch, env::number_arg(args, "T"), env::number_arg(args, "dt"), bindings, n);
    return {record_value(rec, spins, true), std::nullopt};
  }
  if (tool == "init_spins") {
    const std::size_t n = spin_count_arg(args);
    if (n < 1 || n > max_n())
      throw Error(ErrorKind::range, "N must be between 1 and " + std::to_string(max_n()) + ".");
    n_init_ = n;
    hamiltonians_.clear();
    operators_.clear();
    return message("The number of spins was set to " + std::to_string(n) + ".");
  }
  if (tool == "set_Hamiltonian") {
    const std::size_t n = require_n();
    const std::string label = env::string_arg(args, "hamiltonian_label");
    if (label.empty()) throw Error(ErrorKind::signature, "hamiltonian_label must not be empty.");
    hamiltonians_[label] =
        numerics::make_hermitian_operator(materialize_operator(env::string_arg(args, "hamiltonian_code"), n, {}), n);
    return message("The Hamiltonian was set successfully under the label '" + label + "'.");
  }
  auto hypothesis = [&]() -> const numerics::SpinOperator& {
    const std::string label = env::string_arg(args, "hamiltonian_label");
    auto it = hamiltonians_.find(label);
    if (it == hamiltonians_.end()) throw Error(ErrorKind::not_found, "No Hamiltonian was set under the label '" + label + "'.");
    return it->second;
  };
  if (tool == "set_operator" && ground_state_task()) {
    const std::size_t n = require_n();
    const std::string label = env::string_arg(args, "operator_label");
    if (label.empty()) throw Error(ErrorKind::signature, "operator_label must not be empty.");
    operators_[label] =
        numerics::make_hermitian_operator(materialize_operator(env::string_arg(args, "operator_code"), n, {}), n).matrix;
    return message("The operator was set successfully under the label '" + label + "'.");
  }
  if (tool == "get_ground_state_expectations" && ground_state_task()) {
    const auto& h = hypothesis();
    const auto labels = operator_labels(env::string_arg(args, "operators"));
    std::vector<const numerics::SparseOperator*> ops;
    for (const auto& l : labels) {
      auto it = operators_.find(l);
      if (it == operators_.end()) throw Error(ErrorKind::not_found, "No operator was set under the label '" + l + "'.");
      ops.push_back(&it->second);
    }
    const auto gs = numerics::ground_state(h);
    std::vector<double> values;
    for (const auto* o : ops) values.push_back(numerics::expectation(*o, gs.state));
    return {dict_of(labels, values), std::nullopt};
  }
  if (tool == "solve_SEQ" && !ground_state_task()) {
    const auto& h = hypothesis();
    const auto bloch = parse_bloch(env::value_arg(args, "bloch_vectors", memory), h.n_spins);
    const double T = env::number_arg(args, "T"), dt = env::number_arg(args, "dt");
    check_times(T, dt);
    const auto rec = numerics::evolve_state(h, numerics::product_state(bloch), T, dt);
    std::vector<std::size_t> all(h.n_spins);
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    return {record_value(rec, all, false), std::nullopt};
  }
  if (tool == "announce_Hamiltonian") {
    require_open();
    finalize(evaluate(env::string_arg(args, "Hamiltonian")));
    return message("The Hamiltonian has been stored.");
  }
  throw Error(ErrorKind::not_found, "Unknown tool '" + tool + "'.");
}

env::ScoreRecord QuantumEnvironment::evaluate(const std::string& code) const {
  env::ScoreRecord rec;
  const std::size_t n = system_.n_spins;
  const std::size_t draws = system_.tunables.empty() ? 1 : score_draws;
  env::ScoreRng rng(seed_);
  double sum = 0.0;
  try {
    for (std::size_t d = 0; d < draws; ++d) {
      Bindings b;
      for (const auto& name : system_.tunables) b[name] = rng.uniform(draw_lo, draw_hi);
      const auto truth = numerics::make_hermitian_operator(truth_hamiltonian(system_, n, b), n);
      const auto agent = numerics::make_hermitian_operator(materialize_operator(code, n, b), n);
      if (ground_state_task()) {
        sum += metrics::fidelity_per_spin(numerics::ground_state(truth).subspace, numerics::ground_state(agent).subspace, n);
      } else {
        sum += metrics::hamiltonian_overlap(truth.matrix, agent.matrix);
      }
    }
  } catch (const std::exception& e) {
    rec.score = 0.0;
    rec.notes.push_back(std::string("fault: ") + e.what());
    return rec;
  }
  const double raw = sum / static_cast<double>(draws);
  rec.score = metrics::clamp_score(raw);
  rec.detail = {{"metric", ground_state_task() ? "fidelity_per_spin" : "hamiltonian_overlap"},
                {"raw", raw},
                {"draws", draws},
                {"n_spins", n}};
  return rec;
}

}  // namespace sciexp::quantum
