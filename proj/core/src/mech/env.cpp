// SPDX-License-Identifier: Apache-2.0
#include "sciexp/mech/env.hpp"

#include <cmath>
#include <cstdio>

#include "env/docs.hpp"
#include "sciexp/error.hpp"
#include "sciexp/metrics.hpp"
#include "sciexp/script/interpreter.hpp"
#include "sciexp/script/ops.hpp"

namespace sciexp::mech {

using catalog::MechLayout;
using env::ToolParam;
using env::ToolSpec;

namespace {

const char* ordinals[] = {"first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth"};

std::string ordinal(std::size_t i) { return i < std::size(ordinals) ? ordinals[i] : std::to_string(i + 1) + "th"; }

std::string fmt_bound(double v, bool trailing_dot) {
  char buf[32];
  if (v == std::floor(v) && std::abs(v) < 1e9) {
    std::snprintf(buf, sizeof buf, trailing_dot ? "%.0f." : "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%g", v);
  }
  return buf;
}

/// Calls an agent-defined rhs(X, t) and checks the output length.
class ScriptRhs {
 public:
  explicit ScriptRhs(const std::string& code) {
    in_.exec(code);
    if (!in_.has("rhs") || !in_.get("rhs").is_callable())
      throw Error(ErrorKind::script, "The code must define a function rhs(X, t).");
    fn_ = in_.get("rhs");
  }

  void operator()(std::span<const double> X, double t, std::span<double> out) {
    in_.reset_steps();
    script::Value r = in_.call(fn_, {script::Value(NdArray::from_real(X)), script::Value(t)});
    std::vector<double> v = env::real_values(r, "The output of rhs");
    if (v.size() != out.size())
      throw Error(ErrorKind::shape, "rhs returned " + std::to_string(v.size()) + " values, expected " +
                                        std::to_string(out.size()) + ".");
    std::copy(v.begin(), v.end(), out.begin());
  }

 private:
  script::Interpreter in_;
  script::Value fn_;
};

/// R^2 of one component; a constant reference counts as 1 only when matched exactly.
double component_r2(std::span<const double> x, std::span<const double> y) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double tot = 0.0, res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    tot += (x[i] - mean) * (x[i] - mean);
    res += (x[i] - y[i]) * (x[i] - y[i]);
  }
  if (tot == 0.0) return res == 0.0 ? 1.0 : 0.0;
  return metrics::r_squared(x, y);
}

env::ScoreRecord fault(const std::string& what) {
  env::ScoreRecord r;
  r.score = 0.0;
  r.notes.push_back("fault: " + what);
  return r;
}

}  // namespace

MechEnvironment::MechEnvironment(const catalog::SystemSpec& system, std::uint64_t seed)
    : Environment(system, seed), model_(make_model(system)) {}

std::vector<std::string> MechEnvironment::arg_names() const {
  const auto& s = system_;
  std::vector<std::string> names;
  switch (s.layout) {
    case MechLayout::generic:
    case MechLayout::particle2d:
    case MechLayout::hidden_1d:
      for (std::size_t i = 0; i < s.n_observed; ++i) names.push_back("q" + std::to_string(i));
      for (std::size_t i = 0; i < s.n_observed; ++i) names.push_back("q" + std::to_string(i) + "_dot");
      break;
    case MechLayout::gravity:
    case MechLayout::hidden_2d:
      for (std::size_t i = 0; i < s.n_observed / 2; ++i) {
        names.push_back("x" + std::to_string(i + 1));
        names.push_back("y" + std::to_string(i + 1));
      }
      for (std::size_t i = 0; i < s.n_observed / 2; ++i) {
        names.push_back("vx" + std::to_string(i + 1));
        names.push_back("vy" + std::to_string(i + 1));
      }
      break;
    case MechLayout::particle_lists:
      names = {"x_list", "y_list", "vx_list", "vy_list"};
      break;
  }
  return names;
}

std::string MechEnvironment::observe_doc() const {
  const auto& s = system_;
  const auto& r = s.coordinate_range;
  std::string doc;
  if (s.layout == MechLayout::particle_lists) {
    doc = "observe_evolution(x_list: str, y_list: str, vx_list: str, vy_list: str)\n"
          "    Observe a trajectory of the system given initial conditions.\n"
          "    A reasonable coordinate range is e.g. [" + fmt_bound(r.lo, true) + ", " + fmt_bound(r.hi, true) + "].  \n"
          "    Args:\n"
          "        x1_list: list of initial x-positions in the form '[value1, value2, ...]'\n"
          "        y_list: list of initial y-positions in the form '[value1, value2, ...]'\n"
          "        vx_list: list of initial x-velocities in the form '[value1, value2, ...]'\n"
          "        vy_list: list of initial y-velocities in the form '[value1, value2, ...]'\n"
          "    Returns:\n"
          "        'ts':jax.Array of shape [nsteps] with the time steps\n"
          "        'array':jax.Array of shape [nsteps, 4 * N_particles] with the solution, \n"
          "                array[:, 0] holds the first particle x-position\n"
          "                array[:, 1] holds the first particle y-position\n"
          "                ...\n"
          "                array[:, 2 * N_particles] holds the first particle x-velocity\n"
          "                array[:, 2 * N_particles + 1] holds the first particle y-velocity\n"
          "                ...";
    return doc;
  }
  auto names = arg_names();
  const std::size_t n = s.n_observed;
  if (s.layout == MechLayout::gravity || s.layout == MechLayout::hidden_2d) {
    std::string sig = "def observe_evolution(";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) sig += ", ";
      const bool first_particle_coord = i < 2;
      const bool first_velocity = i == n;
      sig += names[i] + (first_particle_coord ? ": float" : first_velocity ? " :float" : ":float");
    }
    doc = sig + "):\n"
          "    Observe a trajectory of the system given initial conditions.\n"
          "    A reasonable coordinate range is e.g. (" + fmt_bound(r.lo, true) + ", " + fmt_bound(r.hi, true) + ").  \n"
          "    Args:\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      const bool vel = i >= n;
      const std::size_t p = (vel ? i - n : i) / 2;
      const char* axis = (i % 2 == 0) ? "x" : "y";
      doc += "        " + names[i] + ": " + ordinal(p) + " particle's initial " + axis + (vel ? "-velocity\n" : "-coordinate\n");
    }
    doc += "    Returns:\n"
           "        'ts':jax.Array of shape [nsteps] with the time steps\n"
           "        'array':jax.Array of shape [nsteps,dimension] with the solution, ";
    for (std::size_t i = 0; i < names.size(); ++i) {
      const bool vel = i >= n;
      const std::size_t p = (vel ? i - n : i) / 2;
      const char* axis = (i % 2 == 0) ? "x" : "y";
      doc += "\n                array[:, " + std::to_string(i) + "] holds the " + ordinal(p) + " particle's " + axis +
             (vel ? "-velocity" : "-coordinate");
    }
    return doc;
  }
  std::string sig = "observe_evolution(";
  for (std::size_t i = 0; i < names.size(); ++i) sig += names[i] + (i < n ? ": float, " : ":float, ");
  sig.pop_back();
  doc = sig + ")\n"
        "    Observe a trajectory of the system given initial conditions.\n"
        "    A reasonable coordinate range is e.g. (" + fmt_bound(r.lo, false) + ", " + fmt_bound(r.hi, false) + "). \n"
        "    Args:\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    doc += "        " + names[i] + ": " + ordinal(i % n) + " generalized " + (i < n ? "coordinate\n" : "velocity\n");
  }
  doc += "    Returns:\n"
         "        'ts':jax.Array of shape [nsteps] with the time steps\n"
         "        'array':jax.Array of shape [nsteps,dimension] with the solution, ";
  for (std::size_t i = 0; i < names.size(); ++i) {
    doc += "\n                array[:, " + std::to_string(i) + "] holds the " + ordinal(i % n) + " generalized " +
           (i < n ? "coordinate" : "velocity");
  }
  return doc;
}

std::string MechEnvironment::batch_doc() const {
  const auto& s = system_;
  std::string example;
  if (s.layout == MechLayout::particle_lists) {
    example = "[[x_list, y_list, vx_list, vy_list], ...]";
  } else {
    example = "[[";
    auto names = arg_names();
    for (std::size_t i = 0; i < names.size(); ++i) example += (i ? ", " : "") + names[i];
    example += "], ...]";
  }
  return "observe_multiple_evolutions(initial_conditions: str)\n"
         "    Observe several trajectories of the system with one call, one for each initial condition.\n"
         "    Args:\n"
         "        initial_conditions: a list of up to 5 initial conditions in the form\n"
         "            '" + example + "', each ordered like the arguments of observe_evolution.\n"
         "    Returns:\n"
         "        'ts':jax.Array of shape [nsteps] with the time steps\n"
         "        'arrays':jax.Array of shape [n_runs,nsteps,dimension] with the solutions, in the order of the\n"
         "                initial conditions; each solution is laid out like the 'array' of observe_evolution";
}

std::vector<ToolSpec> MechEnvironment::tools() const {
  std::vector<ToolSpec> out;
  ToolSpec obs{"observe_evolution", observe_doc(), {}, env::ToolRole::experiment};
  const bool lists = system_.layout == MechLayout::particle_lists;
  for (const auto& n : arg_names()) obs.params.push_back({n, lists ? "string" : "number", ""});
  out.push_back(obs);
  out.push_back({"observe_multiple_evolutions", batch_doc(), {{"initial_conditions", "array", "list of initial conditions"}},
                 env::ToolRole::experiment});
  if (system_.n_hidden()) {
    out.push_back({"save_result_find_eom_hidden_degrees", env::docs::save_result_find_eom_hidden_degrees,
                   {{"rhs", "string", "python code defining rhs(X, t)"},
                    {"hidden_initial_qs", "string", "list of hidden initial coordinates"},
                    {"hidden_initial_q_dots", "string", "list of hidden initial velocities"}},
                   env::ToolRole::submission});
  } else {
    out.push_back({"save_result_find_eom", env::docs::save_result_find_eom,
                   {{"rhs", "string", "python code defining rhs(X, t)"}}, env::ToolRole::submission});
  }
  return out;
}

std::vector<double> MechEnvironment::full_state(const std::vector<double>& ic) const {
  const std::size_t n = system_.n_coords, o = system_.n_observed, h = system_.n_hidden();
  if (ic.size() != 2 * o) throw Error(ErrorKind::signature, "Expected " + std::to_string(2 * o) + " initial values.");
  std::vector<double> x(2 * n);
  const auto& hid = system_.hidden_initial_conditions;
  for (std::size_t i = 0; i < o; ++i) {
    x[i] = ic[i];
    x[n + i] = ic[o + i];
  }
  for (std::size_t i = 0; i < h; ++i) {
    x[o + i] = hid[i];
    x[n + o + i] = hid[h + i];
  }
  return x;
}

numerics::Trajectory MechEnvironment::observe(const std::vector<double>& ic) const {
  for (double v : ic) {
    if (!std::isfinite(v)) throw Error(ErrorKind::signature, "Initial conditions must be finite numbers.");
  }
  std::vector<double> x0 = full_state(ic);
  numerics::Trajectory full = numerics::rk4_solve(x0, model_.rhs, {}, experiment_dt, experiment_T);
  if (!system_.n_hidden()) return full;
  const std::size_t n = system_.n_coords, o = system_.n_observed;
  numerics::Trajectory t;
  t.ts = full.ts;
  t.dim = 2 * o;
  t.states.resize(t.steps() * t.dim);
  for (std::size_t k = 0; k < t.steps(); ++k) {
    for (std::size_t i = 0; i < o; ++i) {
      t.states[k * t.dim + i] = full.at(k, i);
      t.states[k * t.dim + o + i] = full.at(k, n + i);
    }
  }
  return t;
}

std::vector<double> MechEnvironment::flatten_ic(const script::Value& ic) const {
  if (system_.layout != MechLayout::particle_lists) return env::real_values(ic, "Each initial condition");
  std::vector<double> flat = env::real_values(ic, "Each initial condition");
  const std::size_t np = system_.n_coords / 2;
  if (flat.size() != 4 * np)
    throw Error(ErrorKind::signature, "Each initial condition needs four lists of " + std::to_string(np) + " values.");
  std::vector<double> x(4 * np);
  for (std::size_t p = 0; p < np; ++p) {
    x[2 * p] = flat[p];
    x[2 * p + 1] = flat[np + p];
    x[2 * np + 2 * p] = flat[2 * np + p];
    x[2 * np + 2 * p + 1] = flat[3 * np + p];
  }
  return x;
}

std::vector<double> MechEnvironment::parse_observe_args(const nlohmann::json& args) const {
  auto names = arg_names();
  if (system_.layout == MechLayout::particle_lists) {
    std::vector<double> flat;
    for (const auto& n : names) {
      std::string key = n;
      if (n == "x_list" && !args.contains("x_list") && args.contains("x1_list")) key = "x1_list";
      const auto& j = env::arg(args, key);
      script::Value v = j.is_string() ? script::evaluate(j.get<std::string>()) : env::value_arg(args, key, {});
      auto vals = env::real_values(v, n);
      if (vals.size() != system_.n_coords / 2)
        throw Error(ErrorKind::signature, n + " must contain " + std::to_string(system_.n_coords / 2) + " values.");
      flat.insert(flat.end(), vals.begin(), vals.end());
    }
    return flatten_ic(script::Value(NdArray::from_real(flat)));
  }
  for (auto it = args.begin(); it != args.end(); ++it) {
    if (std::find(names.begin(), names.end(), it.key()) == names.end())
      throw Error(ErrorKind::signature, "observe_evolution() got an unexpected argument '" + it.key() + "'.");
  }
  std::vector<double> ic;
  for (const auto& n : names) ic.push_back(env::number_arg(args, n));
  return ic;
}

env::ToolOutput MechEnvironment::call(const std::string& tool, const nlohmann::json& args, const env::Bindings& memory) {
  const std::size_t dim = 2 * system_.n_observed;
  if (tool == "observe_evolution") {
    numerics::Trajectory t = observe(parse_observe_args(args));
    return {env::make_dict({{"ts", env::real_array({t.steps()}, t.ts)},
                            {"array", env::real_array({t.steps(), t.dim}, t.states)}}),
            std::nullopt};
  }
  if (tool == "observe_multiple_evolutions") {
    script::Value v = env::value_arg(args, "initial_conditions", memory);
    if (!v.is_sequence() && !v.is_array())
      throw Error(ErrorKind::signature, "initial_conditions must be a list of initial conditions.");
    std::vector<script::Value> ics = script::iterate(v);
    if (ics.empty()) throw Error(ErrorKind::signature, "initial_conditions must not be empty.");
    if (ics.size() > max_batch) throw Error(ErrorKind::budget, "At most 5 initial conditions can be passed per call.");
    std::vector<double> data, ts;
    for (const auto& ic : ics) {
      std::vector<double> x = flatten_ic(ic);
      if (x.size() != dim)
        throw Error(ErrorKind::signature, "Each initial condition needs " + std::to_string(dim) + " values.");
      numerics::Trajectory t = observe(x);
      ts = t.ts;
      data.insert(data.end(), t.states.begin(), t.states.end());
    }
    return {env::make_dict({{"ts", env::real_array({ts.size()}, ts)},
                            {"arrays", env::real_array({ics.size(), ts.size(), dim}, data)}}),
            std::nullopt};
  }
  if (tool == "save_result_find_eom" || tool == "save_result_find_eom_hidden_degrees") {
    const bool hidden = system_.n_hidden() > 0;
    if ((tool == "save_result_find_eom_hidden_degrees") != hidden) throw Error(ErrorKind::not_found, "Unknown tool '" + tool + "'.");
    require_open();
    RhsSubmission sub;
    sub.code = env::string_arg(args, "rhs");
    if (hidden) {
      try {
        sub.hidden_q0 = env::real_values(env::value_arg(args, "hidden_initial_qs", memory), "hidden_initial_qs");
        sub.hidden_qdot0 = env::real_values(env::value_arg(args, "hidden_initial_q_dots", memory), "hidden_initial_q_dots");
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::signature && std::string(e.what()).rfind("Missing", 0) == 0) throw;
        finalize(fault(std::string("hidden initial conditions: ") + e.what()));
        return {script::Value(env::saved_message), std::nullopt};
      }
    }
    finalize(evaluate(sub));
    return {script::Value(env::saved_message), std::nullopt};
  }
  throw Error(ErrorKind::not_found, "Unknown tool '" + tool + "'.");
}

env::ScoreRecord MechEnvironment::evaluate(const RhsSubmission& sub) const {
  try {
    return system_.n_hidden() ? score_partial(sub) : score_full(sub);
  } catch (const Error& e) {
    return fault(e.what());
  } catch (const std::exception& e) {
    return fault(e.what());
  }
}

env::ScoreRecord MechEnvironment::score_full(const RhsSubmission& sub) const {
  ScriptRhs rhs(sub.code);
  const std::size_t d = model_.dim();
  env::ScoreRng rng(seed_);
  std::vector<std::vector<double>> truth(d), pred(d);
  std::vector<double> x(d), a(d), b(d);
  const auto& r = system_.coordinate_range;
  std::size_t resampled = 0;
  for (std::size_t s = 0; s < score_samples;) {
    for (auto& v : x) v = rng.uniform(r.lo, r.hi);
    const double t = rng.uniform(0.0, experiment_T);
    model_.rhs(x, t, {}, a);
    bool finite = true;
    for (double v : a) finite = finite && std::isfinite(v);
    if (!finite) {
      if (++resampled > score_samples) throw Error(ErrorKind::diverged, "true rhs is not finite on the sampling range");
      continue;
    }
    rhs(x, t, b);
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(b[i])) throw Error(ErrorKind::diverged, "submitted rhs returned a non-finite value");
      truth[i].push_back(a[i]);
      pred[i].push_back(b[i]);
    }
    ++s;
  }
  env::ScoreRecord rec;
  double mean = 0.0;
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t i = 0; i < d; ++i) {
    double r2 = component_r2(truth[i], pred[i]);
    comps.push_back(r2);
    mean += r2;
  }
  mean /= static_cast<double>(d);
  rec.score = metrics::clamp_score(mean);
  rec.detail = {{"metric", "r_squared"}, {"raw", mean}, {"components", comps}, {"samples", score_samples}};
  return rec;
}

env::ScoreRecord MechEnvironment::score_partial(const RhsSubmission& sub) const {
  if (sub.hidden_q0.size() != sub.hidden_qdot0.size())
    throw Error(ErrorKind::shape, "hidden_initial_qs and hidden_initial_q_dots differ in length");
  ScriptRhs rhs(sub.code);
  const std::size_t o = system_.n_observed, n = system_.n_coords, h = sub.hidden_q0.size(), m = o + h;
  numerics::VectorField sub_field = [&rhs](std::span<const double> X, double t, std::span<const double>,
                                           std::span<double> out) { rhs(X, t, out); };
  env::ScoreRng rng(seed_);
  const auto& r = system_.coordinate_range;
  double total = 0.0;
  std::size_t resampled = 0;
  for (std::size_t k = 0; k < score_trajectories;) {
    std::vector<double> ic(2 * o);
    for (auto& v : ic) v = rng.uniform(r.lo, r.hi);
    numerics::Trajectory truth;
    try {
      truth = numerics::rk4_solve(full_state(ic), model_.rhs, {}, partial_score_dt, experiment_T);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::diverged || ++resampled > score_trajectories) throw;
      continue;
    }
    std::vector<double> x0(2 * m);
    for (std::size_t i = 0; i < o; ++i) {
      x0[i] = ic[i];
      x0[m + i] = ic[o + i];
    }
    for (std::size_t i = 0; i < h; ++i) {
      x0[o + i] = sub.hidden_q0[i];
      x0[m + o + i] = sub.hidden_qdot0[i];
    }
    numerics::Trajectory pred = numerics::rk4_solve(x0, sub_field, {}, partial_score_dt, experiment_T);
    double traj = 0.0;
    std::vector<double> a(truth.steps()), b(truth.steps());
    for (std::size_t c = 0; c < 2 * o; ++c) {
      const std::size_t tc = c < o ? c : n + (c - o);
      const std::size_t pc = c < o ? c : m + (c - o);
      for (std::size_t s = 0; s < truth.steps(); ++s) {
        a[s] = truth.at(s, tc);
        b[s] = pred.at(s, pc);
      }
      traj += component_r2(a, b);
    }
    total += traj / static_cast<double>(2 * o);
    ++k;
  }
  const double mean = total / static_cast<double>(score_trajectories);
  env::ScoreRecord rec;
  rec.score = metrics::clamp_score(mean);
  rec.detail = {{"metric", "trajectory_r_squared"}, {"raw", mean}, {"trajectories", score_trajectories},
                {"dt", partial_score_dt}};
  return rec;
}

}  // namespace sciexp::mech
