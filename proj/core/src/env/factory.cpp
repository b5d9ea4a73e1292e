// SPDX-License-Identifier: Apache-2.0
#include "sciexp/env/environment.hpp"
#include "sciexp/field/env.hpp"
#include "sciexp/mech/env.hpp"
#include "sciexp/quantum/env.hpp"

namespace sciexp::env {

std::unique_ptr<Environment> make_environment(const catalog::SystemSpec& system, std::uint64_t seed) {
  switch (system.family) {
    case catalog::Family::mechanical: return std::make_unique<mech::MechEnvironment>(system, seed);
    case catalog::Family::field: return std::make_unique<field::FieldEnvironment>(system, seed);
    case catalog::Family::quantum_gs:
    case catalog::Family::quantum_dyn: return std::make_unique<quantum::QuantumEnvironment>(system, seed);
  }
  return nullptr;
}

}  // namespace sciexp::env
