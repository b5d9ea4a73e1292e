// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace sciexp::env::docs {

extern const char* const plot_from_code;
extern const char* const approx_equal;
extern const char* const execute_code;
extern const char* const set_field_rhs;
extern const char* const run_field_simulation;
extern const char* const init_spins;
extern const char* const set_hamiltonian;
extern const char* const solve_seq;
extern const char* const set_operator;
extern const char* const get_ground_state_expectations;
extern const char* const save_result_find_eom;
extern const char* const save_result_find_eom_hidden_degrees;
extern const char* const run_field_evolution_experiment;
extern const char* const save_result_field;
extern const char* const announce_hamiltonian;
extern const char* const set_operator_for_ground_state;
extern const char* const run_experiment_ground_state_with_parameters;
extern const char* const run_experiment_with_parameters;

}  // namespace sciexp::env::docs
