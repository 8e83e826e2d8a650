"""adiafact: simulate adiabatic factorization on a small spin system.

The package compiles an integer-factoring instance into a weighted penalty
Hamiltonian (three qubits for the built-in N = 291311 = 523 x 557), evolves
it through a discretized adiabatic passage, maps the schedule onto an NMR
rf pulse program, and quantifies robustness to pulse-amplitude noise via
deterministic Monte-Carlo sweeps (numba-accelerated, with a pure-numpy
fallback selected by ADIAFACT_NO_NUMBA=1).

Modules: pauli (operator algebra), compiler (clauses -> Hamiltonian),
engine (passage + spectrum), nmr (pulse program), noise (Monte Carlo +
Trotter comparison), cli (command-line front end).
"""

from .compiler import (
    CompiledProblem,
    FactoringInstance,
    REFERENCE_N,
    REFERENCE_WEIGHTS,
    brute_force_ground,
    build_bit_equations,
    clauses_291311,
    compile_problem,
    decode_factors,
    reference_problem,
    substitute_complements,
)
from .engine import (
    Schedule,
    Trajectory,
    ground_subspace_fidelity,
    initial_state,
    interpolate,
    run,
    spectrum,
    transverse_field,
)
from .errors import (
    AdiafactError,
    ConfigError,
    ContractViolationError,
    DecodeVerificationError,
    ResourceLimitError,
    UnsatisfiableInstanceError,
)
from .nmr import (
    PhysicalCouplings,
    PulseProgram,
    PseudoPureState,
    physical_hamiltonian,
    pseudo_pure_populations,
    pulse_program,
    verify_step_equivalence,
)
from .noise import (
    MonteCarloReport,
    NoiseModel,
    TrotterTrace,
    monte_carlo,
    perturb_program,
    trotter_monte_carlo,
    trotter_run,
)
from .pauli import PauliAxis, PauliSum, PauliTerm, eigendecompose, propagate, to_matrix

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AdiafactError",
    "ConfigError",
    "ContractViolationError",
    "DecodeVerificationError",
    "ResourceLimitError",
    "UnsatisfiableInstanceError",
    "PauliAxis",
    "PauliTerm",
    "PauliSum",
    "to_matrix",
    "eigendecompose",
    "propagate",
    "FactoringInstance",
    "CompiledProblem",
    "REFERENCE_N",
    "REFERENCE_WEIGHTS",
    "clauses_291311",
    "substitute_complements",
    "build_bit_equations",
    "compile_problem",
    "brute_force_ground",
    "decode_factors",
    "reference_problem",
    "Schedule",
    "Trajectory",
    "transverse_field",
    "interpolate",
    "initial_state",
    "ground_subspace_fidelity",
    "run",
    "spectrum",
    "PhysicalCouplings",
    "PulseProgram",
    "PseudoPureState",
    "pulse_program",
    "physical_hamiltonian",
    "verify_step_equivalence",
    "pseudo_pure_populations",
    "NoiseModel",
    "MonteCarloReport",
    "TrotterTrace",
    "perturb_program",
    "monte_carlo",
    "trotter_run",
    "trotter_monte_carlo",
]
