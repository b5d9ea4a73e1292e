// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <map>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/error.hpp"

using namespace sciexp;
using catalog::Catalog;
using catalog::Family;

TEST_CASE("builtin catalog lists every task once") {
  const auto& cat = Catalog::builtin();
  const auto tasks = cat.list_tasks();
  CHECK(tasks.size() == 49);
  std::map<Family, int> per;
  for (const auto& t : tasks) ++per[t.system->family];
  CHECK(per[Family::mechanical] == 19);
  CHECK(per[Family::field] == 12);
  CHECK(per[Family::quantum_gs] == 10);
  CHECK(per[Family::quantum_dyn] == 8);
  CHECK(cat.list_tasks(Family::field).size() == 12);
  for (std::size_t i = 1; i < tasks.size(); ++i) CHECK(tasks[i - 1].id < tasks[i].id);
}

TEST_CASE("catalog serialization round-trips") {
  const auto& cat = Catalog::builtin();
  const std::string text = cat.serialize();
  const auto again = Catalog::parse(text);
  CHECK(again.serialize() == text);
  REQUIRE(again.systems().size() == cat.systems().size());
  for (std::size_t i = 0; i < cat.systems().size(); ++i) CHECK(again.systems()[i] == cat.systems()[i]);
}

TEST_CASE("lookup by id and alias") {
  const auto& cat = Catalog::builtin();
  const auto& s = cat.system("mech/damped_pendulum");
  CHECK(s.model == "pendulum");
  for (const auto& a : s.aliases) CHECK(cat.find(a) == &s);
  CHECK(cat.find("no/such_system") == nullptr);
  CHECK_THROWS_AS(cat.system("no/such_system"), Error);
  CHECK_THROWS_AS(cat.list_tasks(std::nullopt, "no-such-profile"), Error);
}

TEST_CASE("task kinds follow the system") {
  const auto& cat = Catalog::builtin();
  CHECK(cat.task("mech/two_partial_oscillators").kind == catalog::TaskKind::find_eom_hidden);
  CHECK(cat.task("mech/damped_duffing").kind == catalog::TaskKind::find_eom);
  CHECK(cat.task("field/nls").kind == catalog::TaskKind::find_field_eom);
  CHECK(cat.task("quantum_gs/tfi").kind == catalog::TaskKind::announce_hamiltonian_gs);
  CHECK(cat.task("quantum_dyn/heisenberg").kind == catalog::TaskKind::announce_hamiltonian_dyn);
  const auto t = cat.task("quantum_dyn/heisenberg");
  CHECK(t.budget.max_steps > 0);
  CHECK(t.budget.max_tool_calls > 0);
  CHECK(!t.prompts.system_prompt.empty());
  CHECK(!t.prompts.task_description.empty());
}

TEST_CASE("coefficients") {
  const auto& s = Catalog::builtin().system("quantum_gs/heisenberg_2d_tunable_AB");
  const auto j = s.coefficient("J");
  CHECK(j.is_tunable());
  CHECK(j.at({{"A", 0.75}, {"B", 9.0}}) == doctest::Approx(1.5));
  CHECK_THROWS_AS(j.at({{"B", 1.0}}), Error);
  CHECK(catalog::parse_family("field") == Family::field);
  CHECK(!catalog::parse_family("plasma"));
}
