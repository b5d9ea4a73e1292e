// SPDX-License-Identifier: Apache-2.0
#include "env/docs.hpp"

namespace sciexp::env::docs {

const char* const plot_from_code = R"doc(def plot_from_code(code: str):
    Execute python code that produces a plot from one or more previously saved arrays.
    The following variables are available during evaluation:
        all previosuly saved fields with their previously stated result_labels as variable 
        names.
        get_image: function to get the image of the plot.
    You may import the following libraries:
        matplotlib: for plotting.
        matplotlib.pyplot as plt: for plotting.
        jax: for numerical operations.
        jax.numpy: for numerical operations.
        numpy: for numerical operations.
    The end of the code must say "result=get_image()" such that the image of the plot can be returned for visual analysis.
    Args:
        code: python code that produces a plot (without calling plt.show).
    Returns:
        Image
    )doc";

const char* const approx_equal = R"doc(def approx_equal(a1:jax.Array, a2:jax.Array):
    Check whether two arrays can be considered approximately the same. 
    This calculates their mean-square error and compares it to the mean square variation.   
    Args:
        a1: first array
        a2: second array
    Returns:
        statement: a string indicating the closeness of the two arrays
        ratio: (mean-square error) / max(mean square variation)        )doc";

const char* const execute_code = R"doc(def execute_code(code: str) -> dict:
    Evaluate python code.
    This code can be e.g. be used to transform the previously saved fields or to 
    calculate or save new fields.
    You cannot use this code to generate plots or images.
    You cannot see print statements or other output of this code. Instead, you can use 
    the result variable to save the results of the code.
    The following variables are available during evaluation:
        all previosuly saved fields with their previously stated result_labels as 
        variable names (as local variables).
        jax: jax for numerical operations.
        jnp: jax.numpy for numerical operations.
        np: numpy for numerical operations.
        scipy: scipy for numerical operations including optimization and solving 
        differential equations.
        optax: optax for efficient gradient based optimizers like adam, rmsprop, etc.
    Additionally, you have access to an ode solver with the following signature:
        def ode_solve(X0:jax.Array, rhs: callable, params:jax.Array, dt:float, T:float):
            Solve the differential equation dX/dt=rhs(X,t,params), up to time T using the 
            Runge-Kutta method, with time step dt, and initial condition X0.
            The right-hand side of the differential equation is given by the function 
            rhs(X,t,params).
            Args:
                X0 (jnp.array): the initial condition, in the form of an array, 
                for example "jnp.array([0.3,0.2,0.5])"
                rhs (callable): the right-hand side of the differential equation, must be 
                JIT-compilable, in the following form:
                    def rhs(X:jax.Array, t:float, params:jax.Aray) -> jax.Array:
                        <code that calculates rhs and returns the result>
                    The function must return a jax.Array of the same shape as X
                params: the parameters, in the form of an array, 
                for example "jnp.array([0.1,0.8])"
                dt (float): the time step size, for example 0.001
                T (float): the final time, for example 20.0,
                Returns:
                    Xs (jnp.array): the solution, an array of shape (len(ts), *X0.shape)
        You can vmap the ode_solve function to solve multiple initial conditions at once.
    The code must set the variable 'result' to a dictionary in the end which should 
    contain the newly generated data. E.g. result={'<result_key>': <data>, ...}.
    Args:
        code: python code that sets the result variable to a dictionary containing some 
        newly generated data.
    Returns:
        the result dictionary.)doc";

const char* const set_field_rhs = R"doc(def set_field_rhs(rhs_label:str, code: str):
    Define the right-hand side of a complex field equation to be simulated. 
    The field equation will be simulated using the split-step method, applying potential terms in real space and kinetic terms (from spatial derivatives) in Fourier space.
    You pass a python code that must be of the form:

    def U_potential(phi,x,t,dt):
        # jax code that calculates the evolution of the
        # complex field phi for a time step dt at time t
        # and returns the result. This evolution here
        # only accounts for the terms of the field partial differential equation
        # that do not involve spatial derivatives (those
        # will be handled separately). x is a 1D array for
        # the real-space grid points.
        # Example: return jnp.exp(-1j*dt*0.1*jnp.sin(x))*phi

    def U_kinetic(phi_k,k,t,dt):
        # jax code that calculates the evolution of phi_k
        # from the spatial-derivative terms in the field equation,
        # for a time step dt at time t and returns the result.
        # phi_k is the field in Fourier space. k is a 1D array
        # for the Fourier space grid points.
        # Example: return jnp.exp(-1j*(1-jnp.cos(k))*dt)*phi_k
    Use jax.numpy syntax in the form "jnp.exp(...)".  
    Args:
        rhs_label:str the label the function will be stored under.
        code:str the python code defining the evolution functions.
    Returns:
        Message indicating wether the functions were set successfully.)doc";

const char* const run_field_simulation = R"doc(def run_field_simulation(rhs_label: str, initial_condition_code: str):
        Run a single field simulation, for the field evolution equation defined previously under rhs_label (using set_field_rhs), and for the given initial condition.
        Args:
            rhs_label: label used previously in a call to set_field_rhs
            initial_condition_code: a formula in x that uses jax syntax, i.e.
                jnp.sin(...) etc. It must define phi0, which is a complex 
                array of the same shape as x. 
        Returns:
            solution as a dictionary with entries
            - ts: the time points (1D array)
            - x: the x grid (1D array)
            - phis: the complex field solution, 
                a 2D jax.Array of shape [n_ts,n_x])doc";

const char* const init_spins = R"doc(def init_spins(N: int):
    Set the number of spins in the system. This needs to be called before setting the 
    Hamiltonian. It may be changed later if you want to run different simulations, but 
    then you need to set the Hamiltonian again.
    Args:
        N: number of spins
    Returns:
        Success message)doc";

const char* const set_hamiltonian = R"doc(def set_Hamiltonian(hamiltonian_label:str, hamiltonian_code: str):
    Define the Hamiltonian for a quantum system to be simulated.
    You pass a python code that must produce a Hamiltonian H, constructing
    it out of provided spin operators. Here Sx is a list of spin operator x-components,
    Sy likewise for the y-components, and Sz for the z-components.
    These are Pauli matrices. They can be accessed like Sx[2] etc. Remember to use the 
    "@" matrix multiplication operator when taking the product of several spin operators.
    Otherwise you can use jax.numpy syntax in the form "jnp.sin(...)".
    Args:
        hamiltonian_label: the label the Hamiltonian will be stored under.
        hamiltonian_code: the python code defining the Hamiltonian.
    Returns:
        Message indicating wether the Hamiltonian was set successfully set.)doc";

const char* const solve_seq = R"doc(def solve_SEQ(hamiltonian_label: str, bloch_vectors: jax.Array, T: float, dt: float):
    Solve the time-dependent Schrödinger equation for a given fixed Hamiltonian that was defined previously. The initial  state is given as a product state over the spins making up the system. The spins are spin-1/2, described by Pauli matrices Sx, Sy, and Sz.
    Args:
        hamiltonian_label: the label for the previously defined Hamiltonian
        bloch_vectors: an array (jax.Array) of shape [N,3], where N is the number
            of spins in the system, and for each spin a unit Bloch vector is prescribed
            that determines the initial direction of the spin.
        T: the time until which the equation should be solved
        dt: the time step size for the solution. nsteps will be int(T/dt)+1.
    Returns:
        'ts': jax.Array of shape [nsteps] (with the time steps 'nsteps')
        'Sx_t': jax.Array of shape [nsteps, N] with the expectation values of all
        Sx operators
        'Sy_t': jax.Array of shape [nsteps, N] with the expectation values of all 
        Sy operators
        'Sz_t': jax.Array of shape [nsteps, N] with the expectation values of all 
        Sz operators)doc";

const char* const set_operator = R"doc(def set_operator(operator_label:str, operator_code: str):
    Define a Hermitian operator, whose expectation value in the ground state of a system
    can later be evaluated.
    You pass a python code that must produce an operator H, constructing it out of 
    provided spin operators. Here Sx is a list of spin operator x-components, Sy likewise 
    for the y-components, and Sz for the z-components.
    These are Pauli matrices.
    They can be accessed like Sx[2] etc. Remember to use the "@" matrix multiplication 
    operator when taking the product of several spin operators.
    Otherwise you can use jax.numpy syntax in the form "jnp.sin(...)".
    Args:
        operator_label: the label the operator will be stored under.
        operator_code: the python code defining the operator.
    Returns:
        Message indicating wether the operator was set successfully.)doc";

const char* const get_ground_state_expectations = R"doc(def get_ground_state_expectations(hamiltonian_label: str, operators: str):
    Obtain the ground state expectation values of several operators.
    Args:
        hamiltonian_label: the label for the previously defined Hamiltonian
        operators: a string with a comma-delimited list of operator labels (previously defined via set_operator)

    Returns:
        dict containing the expectation values for each of the operators (dict key named according to the operator label))doc";

const char* const save_result_find_eom = R"doc(save_result_find_eom(rhs: str):
    Compare the provided right-hand side of the ordinary differential equation with the 
    true right-hand side governing the differential equation of the system.
    The loss is computed as the mean squared error between the true rhs 
    and predicted rhs at some randomly sampled points.
    This tool should only be used to provide the final result. 
    It can only be called once per experiment.
    Args:
        rhs: Define the right-hand side of an ordinary differential equation. 
            You pass a python code that must be of the form
                def rhs(X:jax.Array, t:float) -> jax.Array:
                    Calulates the right-hand side of the ODE. 
                        Args:
                            X:jax.Array containing the generalized coordinates/coordinate 
                            followed by their velocities/its velocity. 
                            E.g. jnp.array([q, q_dot]).
                            t:float The time variable. 
                            Might be used in case system is time-dependent.
                        Returns:
                            The right-hand side of the ODE,
                            a jax.Array of shape n_coordinates * 2.
                rhs may use jnp syntax in the form "jnp.sin(...)".
    Returns:
        save_message:str A message that the prediction has been saved.)doc";

const char* const save_result_find_eom_hidden_degrees = R"doc(save_result_find_eom_hidden_degrees(rhs: str, hidden_initial_qs:str, hidden_initial_q_dots:str):
    Compare the provided right-hand side of the ordinary differential equation with the 
    true right-hand side governing the differential equation of the system.
    The loss is computed as the mean squared error between the true rhs and predicted rhs 
    at some randomly sampled points.
    This tool should only be used to provide the final result. 
    It can only be called once per experiment.
    Args:
        rhs: Define the right-hand side of an ordinary differential equation. 
            You pass a python code that must be of the form
                def rhs(X:jax.Array, t:float) -> jax.Array:
                    Calulates the right-hand side of the ODE. 
                    Make sure to also include the hidden dimensions in X.
                    X is of shape (n_visible + n_hidden) * 2 where the first half 
                    contains the coordinates and the second half contains the velocities.
                    E.g. for 1 visible and 1 hidden dimension, X is of shape (2*2,) and 
                    of the form jnp.array([q0, q1, q0_dot, q1_dot]),
                    where q0 and q0_dot are the observed quantities.
                    Make sure to adhere to this format. 
                    Args:
                        X:jax.Array containing the generalized coordinates (including the 
                        hidden coordinates) followed by their velocities.
                        E.g. jnp.array([q0, q1, q0_dot, q1_dot]).
                        t:float The time variable. Might be used in case system is 
                        time-dependent.
                    Returns:
                        The right-hand side of the ODE, 
                        a jnp.array of shape n_coordinates * 2.
                rhs may use jnp syntax in the form "jnp.sin(...)". 
                rhs must be jax-jittable!
        hidden_initial_qs: A string representation of a list of initial values for the 
        hidden (not the observed!) generalized coordinates,
        e.g. '[0.1, ...]' with length n_hidden.
        hidden_initial_q_dots: A string representation of a list of initial values for 
        the hidden (not the observed!) generalized velocities,
        e.g. '[0.0, ...]' with length n_hidden.
    Returns:    
        save_message:str A message that the prediction has been saved.)doc";

const char* const run_field_evolution_experiment = R"doc(def run_field_evolution_experiment(initial_condition_code:str):
    Run one experiment of the evolution of the mystery field,
    where you can choose the initial condition.
    Args:
        initial_condition_code: python code with
            jax syntax that set the variable phi0,
            which represents the complex
            field at time 0.
            Use jnp.sin(...) etc, and use the
            array x which represents the position
            coordinate on a 1D grid.
    Returns:
        Solution with entries
        - ts: the time points (1D array)
        - x: the x grid (1D array)
        - phis: the complex field solution, 
            a 2D jax.Array of shape [n_ts,n_x])doc";

const char* const save_result_field = R"doc(def save_result_find_eom(code:str):
    Save the result of your analysis, providing the code that would define the equations of motion of the field. You pass a python code that must be of the form:
    Define the right-hand side of a complex field equation to be simulated. 
    The field equation will be simulated using the split-step method, applying potential terms in real space and kinetic terms (from spatial derivatives) in Fourier space.
    You pass a python code that must be of the form:

    def U_potential(phi,x,t,dt):
        # jax code that calculates the evolution of the
        # complex field phi for a time step dt at time t
        # and returns the result. This evolution here
        # only accounts for the terms of the field partial differential equation
        # that do not involve spatial derivatives (those
        # will be handled separately). x is a 1D array for
        # the real-space grid points.
        # Example: return jnp.exp(-1j*dt*0.1*jnp.sin(x))*phi
    def U_kinetic(phi_k,k,t,dt):
        # jax code that calculates the evolution of phi_k
        # from the spatial-derivative terms in the field equation,
        # for a time step dt at time t and returns the result.
        # phi_k is the field in Fourier space. k is a 1D array
        # for the Fourier space grid points.
        # Example: return jnp.exp(-1j*(1-jnp.cos(k))*dt)*phi_k
    Use jax.numpy syntax in the form "jnp.exp(...)".
    
    Args:
        code: The code.
    Returns:
        'save_message' A message that the prediction has been saved.)doc";

const char* const announce_hamiltonian = R"doc(def announce_Hamiltonian(Hamiltonian: str):
    Announce the correct Hamiltonian, in the form of python code.
    You pass a python code that must produce an operator H, constructing it out of provided spin operators. Here Sx is a list of spin operator x-components, Sy likewise for the y-components, and Sz for the z-components. These are Pauli matrices.
    They can be accessed like Sx[2] etc. Remember to use the "@" matrix multiplication operator when taking the product of several spin operators.
    If the Hamiltonian contains a tunable parameter (or several), use the parameter name(s) specified in the problem description and do not substitute numerical values. However, if the Hamiltonian contains non-tunable numerical parameters, specify them as floating point numbers.
    Returns:
        Message that the Hamiltonian has been stored.)doc";

const char* const set_operator_for_ground_state = R"doc(set_operator_for_ground_state(operator_label: str, operator_code: str)
    Define a Hermitian operator, whose expectation value in the ground state of 
    the experimental system can later be evaluated.
    You pass a python code that must produce an operator H, constructing
    it out of provided spin operators. Here Sx is a list of spin operator x-components,
    Sy likewise for the y-components, and Sz for the z-components.
    These are Pauli matrices.
    They can be accessed like Sx[2] etc. Remember to use
    the "@" matrix multiplication operator when taking
    the product of several spin operators.
    Otherwise you can use jax.numpy syntax in the form "jnp.sin(...)".
    Args:
        operator_label: the label the operator will be stored under.
        operator_code: the python code defining the operator.
    Returns:
        Message indicating wether the operator was set successfully.)doc";

const char* const run_experiment_ground_state_with_parameters = R"doc(run_experiment_ground_state_with_parameters(set_params_code: str, operators: str)
    Measure the ground state expectation values for several operators, for the given
    experimental system, for given physical parameters. If the experimental system
    has variable size N, you must also set N in the code given here!
    Args:
        set_params_code: python code that sets the numerical values of the system 
        parameters.
        operators: a string with a comma-delimited list of operator labels (previously 
        defined via set_operator)
    Returns:
        dict containing the expectation values for each of the operators (dict key named according to the operator label))doc";

const char* const run_experiment_with_parameters = R"doc(def run_experiment_with_parameters(bloch_vectors:jax.Array, T: float, dt: float, parameter_code: str):
    Run an experiment on the spin system. You can provide the normalized Bloch
    vectors to describe the initial product state. The system will evolve
    according to its time-independent Hamiltonian, and the evolution of the
    spin expectation values will be returned. The spins are described
    by Pauli operators Sx, Sy, and Sz. The number N_obs of observable spin
    operators may be smaller than the total number N of spins. The number N_control
    of controllable spin operators may be smaller than the total number N (see
    description of experimental setup).
    Args:
        bloch_vectors: array (jax.Array) of shape (N_control,3) of Bloch vectors.
        T: total time duration of experiment.
        dt: time step between observations. nsteps will be int(T/dt)+1.
        parameter_code: python code that sets the parameter numerical values
    Returns:
        'ts': jax.Array of shape [nsteps] (with the time steps 'nsteps')
        'Sx_t': jax.Array of shape [N_obs,nsteps] with the expectation values of all 
        observed Sx operators
        'Sy_t': jax.Array of shape [N_obs,nsteps] with the expectation values of all 
        observed Sy operators
        'Sz_t': jax.Array of shape [N_obs,nsteps] with the expectation values of all 
        observed Sz operators)doc";

}  // namespace sciexp::env::docs
