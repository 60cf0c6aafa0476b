"""Dual quaternion toolkit for relative rigid-body motion and observability.

Conventions (everywhere in this package):

* quaternions are scalar-first ``[w, x, y, z]`` arrays,
* dual quaternions stack real then dual part, 8 floats,
* the relative state stacks the dual pose of the target w.r.t. the
  chaser/camera and the relative dual velocity in camera coordinates,
  16 floats in total.
"""

__version__ = "0.1.0"

from .dynamics import (
    DivergenceError,
    DualForce,
    InertialBodyState,
    MassMatrix,
    ReducedState,
    RelativeState,
    apply_mass,
    apply_mass_inverse,
    inertial_dynamics,
    relative_dynamics,
    rk4_step,
    state_embed,
    state_reduce,
    transport_theorem,
)
from .measurement import MarkerConfig, PoseMeasurement, measure, measure_noisy
from .observability import (
    EmpiricalGramian,
    ObservabilityMatrix,
    ObservabilityReport,
    build_observability_matrix,
    empirical_gramian,
    grad_lie0,
    grad_lie1,
    lemma_suite,
    lie0,
    lie1,
    rank_report,
)
from .runner import RunReport, emit, run_observability, run_simulate, run_sweep
from .scenario import Scenario, ScenarioError, parse_scenario

__all__ = [
    "DivergenceError",
    "DualForce",
    "EmpiricalGramian",
    "InertialBodyState",
    "MarkerConfig",
    "MassMatrix",
    "ObservabilityMatrix",
    "ObservabilityReport",
    "PoseMeasurement",
    "ReducedState",
    "RelativeState",
    "RunReport",
    "Scenario",
    "ScenarioError",
    "apply_mass",
    "apply_mass_inverse",
    "build_observability_matrix",
    "emit",
    "empirical_gramian",
    "grad_lie0",
    "grad_lie1",
    "inertial_dynamics",
    "lemma_suite",
    "lie0",
    "lie1",
    "measure",
    "measure_noisy",
    "parse_scenario",
    "rank_report",
    "relative_dynamics",
    "rk4_step",
    "run_observability",
    "run_simulate",
    "run_sweep",
    "state_embed",
    "state_reduce",
    "transport_theorem",
]
