from .adjoint import (
    AdjointTerms,
    Costate,
    CostWeights,
    PlanningProblem,
    UavState,
    adjoint_terms,
    control_from_costate,
    costate_flow,
    grad_beampattern,
    grad_fspl,
    hamiltonian,
    power_gradient,
    received_power,
    terminal_conditions,
)
from .bvp import POSITION_SCALE, BvpSolution, SolverOptions, solve_bvp
from .cost import evaluate_cost

__all__ = [
    "AdjointTerms",
    "BvpSolution",
    "Costate",
    "CostWeights",
    "PlanningProblem",
    "POSITION_SCALE",
    "SolverOptions",
    "UavState",
    "adjoint_terms",
    "control_from_costate",
    "costate_flow",
    "evaluate_cost",
    "grad_beampattern",
    "grad_fspl",
    "hamiltonian",
    "power_gradient",
    "received_power",
    "solve_bvp",
    "terminal_conditions",
]
