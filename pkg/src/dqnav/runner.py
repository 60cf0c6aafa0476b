"""Batch runs: simulation, observability sweeps, and report emission.

The simulated system is the 24-component joint vector [relative state (16)
| chaser inertial dual velocity (8)]; the chaser block integrates its own
body dynamics (or stays pinned at zero) and feeds the relative rate.  For
single-epoch analysis (observability matrices, finite-difference checks,
the empirical Gramian) the chaser velocity is frozen at its epoch value so
the motion model is an autonomous field of the 16-component state, which
is how the rank analysis treats it.

Reports are written as delimited trajectory text plus a structured JSON
document; the report path also renders figures next to them.  Everything
emitted is deterministic for a fixed (scenario, seed) pair: no timestamps
or absolute paths appear in the outputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    ReducedState,
    body_velocity_rate,
    propagate,
    project_relative,
    reduce_vector,
    relative_rate,
)
from .measurement import measure_noisy
from .observability import (
    EmpiricalGramian,
    ObservabilityReport,
    build_observability_matrix,
    build_observability_matrix_numeric,
    empirical_gramian,
    lie0,
    observability_entries,
    rank_report,
)
from .sampling import marker_poses, relative_states
from .scenario import Scenario

TRAJECTORY_COLUMNS = [
    "t",
    "qw", "qx", "qy", "qz",
    "rx", "ry", "rz",
    "wx", "wy", "wz",
    "vx", "vy", "vz",
    "y_rw", "y_rx", "y_ry", "y_rz",
    "y_dw", "y_dx", "y_dy", "y_dz",
]


@dataclass(frozen=True)
class EpochObservability:
    """Observability analysis at one trajectory epoch."""

    time: float
    report: ObservabilityReport
    fd_residual_l0: float
    fd_residual_l1: float


@dataclass
class RunReport:
    kind: str
    scenario: Scenario
    scenario_hash: str
    times: np.ndarray
    states: np.ndarray
    measurements: np.ndarray
    epochs: list[EpochObservability] = field(default_factory=list)
    gramian: EmpiricalGramian | None = None

    def final_state(self) -> ReducedState:
        return ReducedState.from_array(self.states[-1])


def joint_initial(scn: Scenario) -> np.ndarray:
    from .dynamics import embed_vector

    x0 = embed_vector(scn.initial.as_array())
    return np.concatenate([x0, scn.chaser_motion.initial_velocity()])


def joint_rate(scn: Scenario):
    """Rate of the joint [relative | chaser velocity] vector at time t."""
    propagated = scn.chaser_motion.kind == "propagated"

    def rate(t, y):
        x = y[..., :16]
        w_ci = y[..., 16:24]
        target_wrench = scn.target_wrench.vector_at(t)
        chaser_wrench = scn.chaser_wrench.vector_at(t)
        x_rate = relative_rate(
            x, scn.target_mass, target_wrench, scn.chaser_mass, chaser_wrench, w_ci
        )
        if propagated:
            w_rate = body_velocity_rate(scn.chaser_mass, w_ci, chaser_wrench)
            w_rate = np.broadcast_to(w_rate, w_ci.shape)
        else:
            w_rate = np.zeros_like(w_ci)
        return np.concatenate([x_rate, w_rate], axis=-1)

    return rate


def project_joint(y) -> np.ndarray:
    y = np.asarray(y, dtype=float).copy()
    y[..., :16] = project_relative(y[..., :16])
    y[..., 16] = 0.0
    y[..., 20] = 0.0
    return y


def state_field(scn: Scenario, w_ci, epoch: float = 0.0):
    """Autonomous motion field of the 16-component state at one epoch.

    The chaser velocity and any tabulated wrenches are frozen at the epoch,
    making the field suitable for Jacobians and Gramian propagation.
    """
    w_ci = np.asarray(w_ci, dtype=float)
    target_wrench = scn.target_wrench.vector_at(epoch)
    chaser_wrench = scn.chaser_wrench.vector_at(epoch)

    def rate(t, x):
        return relative_rate(
            x, scn.target_mass, target_wrench, scn.chaser_mass, chaser_wrench, w_ci
        )

    return rate


def simulate_trajectory(scn: Scenario):
    """Propagate the scenario; returns (times, joint history, reduced, meas)."""
    n_steps = int(round(scn.duration / scn.dt))
    y0 = joint_initial(scn)
    times, history = propagate(
        y0, joint_rate(scn), scn.dt, n_steps, project=project_joint, keep_every=1
    )
    x = history[:, :16]
    reduced = reduce_vector(x)
    marker = scn.marker()
    if scn.sigma_rot > 0.0 or scn.sigma_trans > 0.0:
        rng = np.random.default_rng(scn.seed)
        from .dynamics import RelativeState

        meas = np.empty((len(times), 8))
        for i in range(len(times)):
            state = RelativeState.from_vector(x[i])
            meas[i] = measure_noisy(
                state, marker, scn.sigma_rot, scn.sigma_trans, rng, timestamp=times[i]
            ).value
    else:
        meas = lie0(x, marker.pose_in_target)
    return times, history, reduced, meas


def run_simulate(scn: Scenario) -> RunReport:
    times, _, reduced, meas = simulate_trajectory(scn)
    return RunReport(
        kind="simulate",
        scenario=scn,
        scenario_hash=scn.hash(),
        times=times,
        states=reduced,
        measurements=meas,
    )


def run_observability(scn: Scenario, epochs=None, rank_tol: float = 1e-10,
                      with_gramian: bool = True, gramian_delta: float = 1e-5,
                      fd_step: float = 1e-6) -> RunReport:
    """Observability analysis along the scenario trajectory.

    At each requested epoch (snapped to the sample grid): the closed-form
    observability matrix, its SVD rank report, and the worst-case residual
    between the analytic Jacobians and central finite differences.  When
    enabled, the empirical Gramian is accumulated over the full scenario
    horizon from the initial state as an independent cross-check.
    """
    times, history, reduced, meas = simulate_trajectory(scn)
    if epochs is None:
        epochs = [0.0] if scn.duration == 0.0 else list(np.linspace(0.0, scn.duration, 3))
    marker = scn.marker()

    epoch_reports = []
    for t_req in epochs:
        if not 0.0 <= t_req <= scn.duration + 0.5 * scn.dt:
            raise ValueError(f"epoch {t_req} outside the simulated horizon")
        idx = int(np.argmin(np.abs(times - t_req)))
        x = history[idx, :16]
        w_ci = history[idx, 16:24]
        obs = build_observability_matrix(x, marker)
        rate = state_field(scn, w_ci, epoch=times[idx])
        numeric = build_observability_matrix_numeric(x, marker, rate, step=fd_step)
        diff = np.abs(obs.entries - numeric.entries)
        epoch_reports.append(
            EpochObservability(
                time=float(times[idx]),
                report=rank_report(obs, tol=rank_tol),
                fd_residual_l0=float(np.max(diff[0:8])),
                fd_residual_l1=float(np.max(diff[8:16])),
            )
        )

    gram = None
    if with_gramian and scn.duration > 0.0:
        rate = state_field(scn, history[0, 16:24], epoch=0.0)
        gram = empirical_gramian(
            history[0, :16], marker, horizon=scn.duration, dt=scn.dt,
            delta=gramian_delta, rate_fn=rate,
        )

    return RunReport(
        kind="observability",
        scenario=scn,
        scenario_hash=scn.hash(),
        times=times,
        states=reduced,
        measurements=meas,
        epochs=epoch_reports,
        gramian=gram,
    )


@dataclass
class SweepReport:
    """Randomized full-rank sweep over states and marker poses."""

    samples: int
    seed: int
    rank_tol: float
    ranks: np.ndarray
    sigma_min: np.ndarray
    sigma_max: np.ndarray

    @property
    def full_rank_count(self) -> int:
        return int(np.sum(self.ranks == 16))

    @property
    def min_sigma_ratio(self) -> float:
        return float(np.min(self.sigma_min / self.sigma_max))


def run_sweep(samples: int, seed: int = 0, rank_tol: float = 1e-10,
              r_max: float = 10.0, w_max: float = 10.0, v_max: float = 10.0,
              marker_r_max: float = 2.0) -> SweepReport:
    """Build and rank the observability matrix at random unit states."""
    rng = np.random.default_rng(seed)
    states = relative_states(rng, samples, r_max=r_max, w_max=w_max, v_max=v_max)
    markers = marker_poses(rng, samples, r_max=marker_r_max)
    entries = observability_entries(states, markers)
    s = np.linalg.svd(entries, compute_uv=False)
    ranks = np.sum(s > rank_tol * s[..., :1], axis=-1)
    return SweepReport(
        samples=samples,
        seed=seed,
        rank_tol=rank_tol,
        ranks=ranks,
        sigma_min=s[..., -1],
        sigma_max=s[..., 0],
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def trajectory_csv(report: RunReport) -> str:
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for i in range(len(report.times)):
        row = [report.times[i], *report.states[i], *report.measurements[i]]
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def report_dict(report: RunReport) -> dict:
    doc = {
        "schema_version": 1,
        "kind": report.kind,
        "tool_version": __version__,
        "scenario_hash": report.scenario_hash,
        "scenario": report.scenario.to_dict(),
        "trajectory": {
            "samples": int(len(report.times)),
            "dt_s": report.scenario.dt,
            "duration_s": report.scenario.duration,
            "columns": TRAJECTORY_COLUMNS,
        },
        "final_state": {
            "t": float(report.times[-1]),
            "attitude_quaternion": report.states[-1, 0:4].tolist(),
            "position_m": report.states[-1, 4:7].tolist(),
            "angular_velocity_radps": report.states[-1, 7:10].tolist(),
            "velocity_mps": report.states[-1, 10:13].tolist(),
        },
    }
    if report.epochs:
        doc["observability"] = [
            {
                "t": e.time,
                "singular_values": e.report.singular_values.tolist(),
                "numeric_rank": e.report.numeric_rank,
                "rank_tolerance": e.report.rank_tolerance,
                "condition_number": e.report.condition_number,
                "full_rank": e.report.full_rank,
                "fd_residual_l0": e.fd_residual_l0,
                "fd_residual_l1": e.fd_residual_l1,
            }
            for e in report.epochs
        ]
    if report.gramian is not None:
        doc["gramian"] = {
            "horizon_s": report.gramian.horizon,
            "dt_s": report.gramian.dt,
            "delta": report.gramian.delta,
            "eigenvalues": report.gramian.eigenvalues.tolist(),
            "numeric_rank": report.gramian.numeric_rank(),
        }
    return doc


def sweep_dict(sweep: SweepReport) -> dict:
    return {
        "schema_version": 1,
        "kind": "sweep",
        "tool_version": __version__,
        "samples": sweep.samples,
        "seed": sweep.seed,
        "rank_tolerance": sweep.rank_tol,
        "full_rank_count": sweep.full_rank_count,
        "min_sigma_min": float(np.min(sweep.sigma_min)),
        "min_sigma_ratio": sweep.min_sigma_ratio,
        "max_condition_number": float(np.max(sweep.sigma_max / sweep.sigma_min)),
    }


def sweep_csv(sweep: SweepReport) -> str:
    lines = ["sample,numeric_rank,sigma_min,sigma_max"]
    for i in range(sweep.samples):
        lines.append(
            f"{i},{int(sweep.ranks[i])},{_fmt(sweep.sigma_min[i])},{_fmt(sweep.sigma_max[i])}"
        )
    return "\n".join(lines) + "\n"


def emit(report: RunReport, out_dir, fmt: str = "all") -> list[Path]:
    """Write the report files; returns the paths written.

    ``fmt`` selects "csv" (trajectory only), "json" (report only), or
    "all" (both plus rendered figures).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("all", "csv"):
        path = out_dir / "trajectory.csv"
        path.write_text(trajectory_csv(report))
        written.append(path)
    if fmt in ("all", "json"):
        path = out_dir / "report.json"
        path.write_text(json.dumps(report_dict(report), indent=2, sort_keys=True) + "\n")
        written.append(path)
    if fmt == "all":
        from . import plots

        written.extend(plots.render_run_figures(report, out_dir))
    return written


def emit_sweep(sweep: SweepReport, out_dir, fmt: str = "all") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("all", "csv"):
        path = out_dir / "sweep.csv"
        path.write_text(sweep_csv(sweep))
        written.append(path)
    if fmt in ("all", "json"):
        path = out_dir / "report.json"
        path.write_text(json.dumps(sweep_dict(sweep), indent=2, sort_keys=True) + "\n")
        written.append(path)
    if fmt == "all":
        from . import plots

        written.append(plots.render_sweep_figure(sweep, out_dir))
    return written
