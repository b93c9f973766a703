"""Statevector simulation of Grover search, amplitude estimation, and
quantum Monte Carlo mean estimation, with a credit-risk case study and a
query-complexity benchmark harness."""

from qamp._backend import backend_name
from qamp.estimation import (
    AEConfig,
    EstimationProblem,
    EstimationResult,
    estimate,
    estimate_count,
    grover_operator,
    invert_amplitude,
    measure_good_probability,
)
from qamp.gates import hadamard, pauli_x, pauli_y, pauli_z, phase, rot_y, rot_z
from qamp.grover import GroverSetup, build_setup, optimal_iterations, run_search
from qamp.prep import StatePreparation, bernoulli_prep, hadamard_all, load_distribution
from qamp.qmc import (
    DiscreteDistribution,
    MCResult,
    Payoff,
    build_payoff_state_prep,
    classical_mc_mean,
    discretize_lognormal_power_option,
    estimate_mean_bounded,
    estimate_mean_dyadic,
)
from qamp.statevector import BasisPermutation, BasisPredicate, Statevector

__version__ = "0.1.0"

__all__ = [
    "AEConfig",
    "BasisPermutation",
    "BasisPredicate",
    "DiscreteDistribution",
    "EstimationProblem",
    "EstimationResult",
    "GroverSetup",
    "MCResult",
    "Payoff",
    "StatePreparation",
    "Statevector",
    "backend_name",
    "bernoulli_prep",
    "build_payoff_state_prep",
    "build_setup",
    "classical_mc_mean",
    "discretize_lognormal_power_option",
    "estimate",
    "estimate_count",
    "estimate_mean_bounded",
    "estimate_mean_dyadic",
    "grover_operator",
    "hadamard",
    "hadamard_all",
    "invert_amplitude",
    "load_distribution",
    "measure_good_probability",
    "optimal_iterations",
    "pauli_x",
    "pauli_y",
    "pauli_z",
    "phase",
    "rot_y",
    "rot_z",
    "run_search",
]
