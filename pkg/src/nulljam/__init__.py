"""Coordinated beamforming and trajectory planning for a two-antenna jammer
UAV: exact client nulling, orientation-optimal far-field gain, and a
Pontryagin boundary-value solver for the jamming trajectory."""

from ._kernels import HAVE_COMPILED, backend_name
from .beamforming import (
    BeamControl,
    beampattern,
    doppler_phase,
    far_field_beampattern,
    nulling_phase,
    optimal_beampattern,
    optimal_orientation,
)
from .errors import (
    DegenerateGeometryError,
    InvalidInputError,
    NulljamError,
    ScenarioError,
    SolverError,
)
from .geometry import ArrayGeometry, FarFieldGeometry, PlanarPoint, bearing, wrap_angle
from .optimizer import (
    BvpSolution,
    Costate,
    CostWeights,
    PlanningProblem,
    SolverOptions,
    UavState,
    adjoint_terms,
    control_from_costate,
    costate_flow,
    evaluate_cost,
    grad_beampattern,
    grad_fspl,
    solve_bvp,
    terminal_conditions,
)
from .propagation import (
    NULL_POWER_DBM,
    ActivationSpec,
    RadioParams,
    fspl,
    jamming_power_dbm,
    optimal_power_dbm,
    sigma,
    sigma_prime,
)
from .reporting import (
    SummaryReport,
    emit_beampattern_snapshot,
    first_crossings,
    run_plan,
    run_simulate,
    write_trajectory,
)
from .scenario import ScenarioFile, load_scenario
from .simulate import (
    Mission,
    SimulationResult,
    TargetMotion,
    TrajectoryLog,
    apply_beam_control,
    integrate_dynamics,
    receding_horizon,
    simulate_plan,
)

__version__ = "0.1.0"
