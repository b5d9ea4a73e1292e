// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "sciexp/catalog/catalog.hpp"
#include "sciexp/numerics/spin.hpp"

namespace sciexp::quantum {

using Bindings = std::map<std::string, double>;

/// Ground-truth Hamiltonian of a catalog spin system on `n_spins` sites with
/// the tunables bound. Throws ErrorKind::parameter for a missing binding.
numerics::SparseOperator truth_hamiltonian(const catalog::SystemSpec& s, std::size_t n_spins, const Bindings& bindings);

/// Nearest-neighbour bonds of the open side x side square lattice, site = row * side + col.
std::vector<std::pair<std::size_t, std::size_t>> square_lattice_bonds(std::size_t side);

/// Runs agent code with Sx, Sy, Sz (lists of Pauli operators), N, and the
/// bindings defined, and returns the operator it assigns to `result_name`.
/// Plain numbers are multiples of the identity; dense matrices are accepted.
numerics::SparseOperator materialize_operator(const std::string& code, std::size_t n_spins, const Bindings& bindings,
                                              const std::string& result_name = "H");

}  // namespace sciexp::quantum
