// SPDX-License-Identifier: Apache-2.0
#include "sciexp/catalog/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sciexp/error.hpp"

namespace sciexp::catalog {

extern const char* const embedded_catalog;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::invalid_argument, "catalog: " + msg); }

constexpr std::pair<MechLayout, std::string_view> layouts[] = {
    {MechLayout::generic, "generic"},       {MechLayout::particle2d, "particle2d"},
    {MechLayout::gravity, "gravity"},       {MechLayout::particle_lists, "particle_lists"},
    {MechLayout::hidden_1d, "hidden_1d"},   {MechLayout::hidden_2d, "hidden_2d"},
};

MechLayout parse_layout(const std::string& s) {
  for (auto [l, name] : layouts) {
    if (name == s) return l;
  }
  bad("unknown layout '" + s + "'");
}

std::string_view layout_name(MechLayout l) {
  for (auto [x, name] : layouts) {
    if (x == l) return name;
  }
  return "generic";
}

const char* number_words[] = {"zero", "one", "two", "three", "four", "five", "six"};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::mechanical: return "mechanical";
    case Family::field: return "field";
    case Family::quantum_gs: return "quantum_gs";
    case Family::quantum_dyn: return "quantum_dyn";
  }
  return "?";
}

std::string_view to_string(TaskKind k) noexcept {
  switch (k) {
    case TaskKind::find_eom: return "find_eom";
    case TaskKind::find_eom_hidden: return "find_eom_hidden";
    case TaskKind::find_field_eom: return "find_field_eom";
    case TaskKind::announce_hamiltonian_gs: return "announce_hamiltonian_gs";
    case TaskKind::announce_hamiltonian_dyn: return "announce_hamiltonian_dyn";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view s) noexcept {
  for (Family f : {Family::mechanical, Family::field, Family::quantum_gs, Family::quantum_dyn}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

double Coefficient::at(const std::map<std::string, double>& bindings) const {
  if (!is_tunable()) return value;
  auto it = bindings.find(tunable);
  if (it == bindings.end()) throw Error(ErrorKind::parameter, "The parameter " + tunable + " has not been set.");
  return scale * it->second;
}

Coefficient Coefficient::parse(const Json& j) {
  Coefficient c;
  if (j.is_number()) {
    c.value = j.get<double>();
    return c;
  }
  if (!j.is_string()) bad("coefficient must be a number or a tunable reference");
  std::string s = j.get<std::string>();
  auto star = s.find('*');
  if (star != std::string::npos) {
    std::string num = s.substr(0, star);
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), c.scale);
    if (ec != std::errc() || p != num.data() + num.size()) bad("bad coefficient '" + s + "'");
    s = s.substr(star + 1);
  }
  if (s.empty()) bad("empty tunable name");
  c.tunable = s;
  return c;
}

double SystemSpec::param(const std::string& name) const {
  if (!params.contains(name) || !params[name].is_number()) bad(id + ": missing numeric parameter '" + name + "'");
  return params[name].get<double>();
}

std::vector<double> SystemSpec::param_list(const std::string& name) const {
  if (!params.contains(name) || !params[name].is_array()) bad(id + ": missing list parameter '" + name + "'");
  return params[name].get<std::vector<double>>();
}

Coefficient SystemSpec::coefficient(const std::string& name) const {
  if (!params.contains(name)) bad(id + ": missing coefficient '" + name + "'");
  return Coefficient::parse(params[name]);
}

std::string SystemSpec::description() const {
  static const std::string ode = "This is a physical system governed by an ordinary differential equation.";
  switch (family) {
    case Family::mechanical:
      switch (layout) {
        case MechLayout::generic: return ode;
        case MechLayout::particle2d:
          return "This is single physical system moving in two spatial dimensions with the coordinates: \n"
                 "q0: the real space x-coordinate of the moving particle,\n"
                 "q1: the real space y-coordinate of the moving particle,\n"
                 "q0_dot: the real space x-velocity of the moving particle,\n"
                 "q1_dot: the real space y-velocity of the moving particle.";
        case MechLayout::gravity:
        case MechLayout::particle_lists:
          return ode + " \nThe system consists of " + std::to_string(n_coords / 2) +
                 " particles moving in two dimensions.";
        case MechLayout::hidden_1d:
          return ode +
                 "\nThis system consists of multiple particles moving in one dimension.\n"
                 "However, you can only observe the position and velocity of the first particle.\n"
                 "The initial positions and velocities of the hidden particles are the same for each observed "
                 "evolution.";
        case MechLayout::hidden_2d:
          return ode +
                 "\nThis system consists of multiple particles in 2D.\n"
                 "Only the first particle (x,y,vx,vy) is observed; the rest are hidden.";
      }
      return ode;
    case Family::field:
      return "This is a mystery system, showing the evolution of a complex-valued field evolving on a 1D "
             "tight-binding lattice of 100 lattice points, with periodic boundary conditions. The x grid runs from "
             "-5 to 5. For observational experiments, time runs up to 20 with 200 time grid points.";
    case Family::quantum_gs:
    case Family::quantum_dyn: {
      std::vector<std::string> lines;
      if (size_tunable) {
        lines.push_back(
            "You do have access to an experimental system of N spins, where you can select the number N (size of "
            "the system).");
      } else {
        lines.push_back("You do have access to an experimental system of " + std::to_string(n_spins) + " spins.");
      }
      if (!observed_spins.empty()) {
        std::vector<std::string> idx;
        for (auto s : observed_spins) idx.push_back(std::to_string(s));
        lines.push_back("You will only be able to observe the spins " + join(idx, ", ") +
                        " of this system, whose spin expectation values will be returned in this order.");
        lines.push_back("You will only be able to control the N_control=" + std::to_string(observed_spins.size()) +
                        " spins that are also observable. All others will be set to some fixed default values "
                        "every time you start an experiment.");
      }
      if (tunables.size() == 1) {
        lines.push_back("The system has one tunable parameter " + tunables[0] + " that you must set.");
      } else if (tunables.size() > 1) {
        std::string names = join(std::vector<std::string>(tunables.begin(), tunables.end() - 1), ", ") + " and " +
                            tunables.back();
        std::string count = tunables.size() < std::size(number_words) ? number_words[tunables.size()]
                                                                      : std::to_string(tunables.size());
        lines.push_back("The system has " + count + " tunable parameters " + names + " that you must set.");
      }
      return join(lines, "\n");
    }
  }
  return "";
}

Json SystemSpec::to_json() const {
  Json j = Json::object();
  j["id"] = id;
  j["family"] = std::string(to_string(family));
  j["title"] = title;
  if (!aliases.empty()) j["aliases"] = aliases;
  j["model"] = model;
  j["params"] = params;
  if (family == Family::mechanical) {
    j["coordinate_range"] = {coordinate_range.lo, coordinate_range.hi};
    j["layout"] = std::string(layout_name(layout));
    j["n_coords"] = n_coords;
    if (n_observed != n_coords) {
      j["n_observed"] = n_observed;
      j["hidden_initial_conditions"] = hidden_initial_conditions;
    }
  }
  if (family == Family::quantum_gs || family == Family::quantum_dyn) {
    j["n_spins"] = n_spins;
    if (!observed_spins.empty()) j["observed_spins"] = observed_spins;
    if (!tunables.empty()) j["tunables"] = tunables;
    if (size_tunable) j["size_tunable"] = true;
  }
  return j;
}

SystemSpec SystemSpec::from_json(const Json& j) {
  SystemSpec s;
  try {
    s.id = j.at("id").get<std::string>();
    auto fam = parse_family(j.at("family").get<std::string>());
    if (!fam) bad(s.id + ": unknown family");
    s.family = *fam;
    s.title = j.at("title").get<std::string>();
    if (j.contains("aliases")) s.aliases = j["aliases"].get<std::vector<std::string>>();
    s.model = j.at("model").get<std::string>();
    s.params = j.value("params", Json::object());
    if (s.family == Family::mechanical) {
      auto r = j.at("coordinate_range").get<std::vector<double>>();
      if (r.size() != 2 || !(r[0] < r[1])) bad(s.id + ": bad coordinate_range");
      s.coordinate_range = {r[0], r[1]};
      s.layout = parse_layout(j.value("layout", std::string("generic")));
      s.n_coords = j.at("n_coords").get<std::size_t>();
      s.n_observed = j.value("n_observed", s.n_coords);
      if (j.contains("hidden_initial_conditions"))
        s.hidden_initial_conditions = j["hidden_initial_conditions"].get<std::vector<double>>();
      if (s.n_observed == 0 || s.n_observed > s.n_coords) bad(s.id + ": bad n_observed");
      if (s.hidden_initial_conditions.size() != 2 * s.n_hidden()) bad(s.id + ": hidden initial conditions mismatch");
    }
    if (s.family == Family::quantum_gs || s.family == Family::quantum_dyn) {
      s.n_spins = j.at("n_spins").get<std::size_t>();
      if (j.contains("observed_spins")) s.observed_spins = j["observed_spins"].get<std::vector<std::size_t>>();
      if (j.contains("tunables")) s.tunables = j["tunables"].get<std::vector<std::string>>();
      s.size_tunable = j.value("size_tunable", false);
      for (auto o : s.observed_spins) {
        if (o >= s.n_spins) bad(s.id + ": observed spin out of range");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    bad(std::string(e.what()));
  }
  return s;
}

TaskKind task_kind_for(const SystemSpec& s) noexcept {
  switch (s.family) {
    case Family::mechanical: return s.n_hidden() ? TaskKind::find_eom_hidden : TaskKind::find_eom;
    case Family::field: return TaskKind::find_field_eom;
    case Family::quantum_gs: return TaskKind::announce_hamiltonian_gs;
    case Family::quantum_dyn: return TaskKind::announce_hamiltonian_dyn;
  }
  return TaskKind::find_eom;
}

const Catalog& Catalog::builtin() {
  static const Catalog c = parse(embedded_catalog);
  return c;
}

Catalog Catalog::parse(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("parse error: ") + e.what());
  }
  if (j.value("format", std::string()) != "sciexp-catalog") bad("not a catalog file");
  if (j.value("version", 0) != 1) bad("unsupported version");
  Catalog c;
  c.header_ = Json::object();
  c.header_["format"] = j["format"];
  c.header_["version"] = j["version"];
  c.prompts_ = j.at("prompts");
  c.task_texts_ = j.at("tasks");
  if (j.contains("budget")) {
    c.budget_.max_steps = j["budget"].value("max_steps", c.budget_.max_steps);
    c.budget_.max_tool_calls = j["budget"].value("max_tool_calls", c.budget_.max_tool_calls);
  }
  if (c.budget_.max_steps == 0 || c.budget_.max_tool_calls == 0) bad("budget must be positive");
  for (const auto& s : j.at("systems")) c.systems_.push_back(SystemSpec::from_json(s));
  std::vector<std::string> ids;
  for (const auto& s : c.systems_) ids.push_back(s.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) bad("duplicate system id");
  return c;
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string Catalog::serialize() const {
  Json j = header_;
  j["prompts"] = prompts_;
  j["tasks"] = task_texts_;
  j["budget"] = {{"max_steps", budget_.max_steps}, {"max_tool_calls", budget_.max_tool_calls}};
  Json systems = Json::array();
  for (const auto& s : systems_) systems.push_back(s.to_json());
  j["systems"] = systems;
  return j.dump(2) + "\n";
}

const SystemSpec* Catalog::find(std::string_view id) const {
  for (const auto& s : systems_) {
    if (s.id == id) return &s;
    for (const auto& a : s.aliases) {
      if (a == id) return &s;
    }
  }
  return nullptr;
}

const SystemSpec& Catalog::system(std::string_view id) const {
  const SystemSpec* s = find(id);
  if (!s) throw Error(ErrorKind::not_found, "unknown task '" + std::string(id) + "'");
  return *s;
}

std::vector<std::string> Catalog::profiles() const {
  std::vector<std::string> out;
  for (auto it = prompts_.begin(); it != prompts_.end(); ++it) out.push_back(it.key());
  return out;
}

TaskSpec Catalog::task(std::string_view id, const std::string& profile) const {
  if (!prompts_.contains(profile)) throw Error(ErrorKind::not_found, "unknown prompt profile '" + profile + "'");
  const SystemSpec& s = system(id);
  TaskSpec t;
  t.id = s.id;
  t.system = &s;
  t.kind = task_kind_for(s);
  t.budget = budget_;
  const auto& p = prompts_[profile];
  t.prompts.profile = profile;
  t.prompts.system_prompt = p.at("system_prompt").get<std::string>();
  t.prompts.intermediate_message = p.at("intermediate_message").get<std::string>();
  t.prompts.task_description = s.description() + "\n" + task_texts_.at(std::string(to_string(t.kind))).get<std::string>();
  return t;
}

std::vector<TaskSpec> Catalog::list_tasks(std::optional<Family> filter, const std::string& profile) const {
  std::vector<TaskSpec> out;
  for (const auto& s : systems_) {
    if (!filter || s.family == *filter) out.push_back(task(s.id, profile));
  }
  std::sort(out.begin(), out.end(), [](const TaskSpec& a, const TaskSpec& b) { return a.id < b.id; });
  return out;
}

}  // namespace sciexp::catalog
