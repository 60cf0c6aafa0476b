"""Scenario files: schema, validation, and canonical serialization.

A scenario is a single JSON document describing the initial relative
state, both bodies, the marker, and the integration/noise setup.  Angles
may be written as axis-angle degrees for convenience; everything is
converted to radians and SI at parse time and the canonical echo always
uses quaternions.  Unknown keys are rejected so typos cannot silently
fall back to defaults.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import dualquat as dq
from . import quat as qt
from .dynamics import DualForce, MassMatrix, ReducedState
from .measurement import MarkerConfig

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Parse or validation failure, carrying the offending field path."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


@dataclass(frozen=True)
class WrenchSpec:
    """Body wrench model: zero, constant in body axes, or time-tabulated.

    Tabulated wrenches interpolate linearly and hold the end values
    outside the table range.
    """

    kind: str = "zero"
    force: np.ndarray | None = None
    torque: np.ndarray | None = None
    times: np.ndarray | None = None
    forces: np.ndarray | None = None
    torques: np.ndarray | None = None

    def vector_at(self, t: float) -> np.ndarray:
        if self.kind == "zero":
            return dq.ZERO8
        if self.kind == "constant":
            return DualForce(self.force, self.torque).vector()
        f = np.array([np.interp(t, self.times, self.forces[:, i]) for i in range(3)])
        tau = np.array([np.interp(t, self.times, self.torques[:, i]) for i in range(3)])
        return DualForce(f, tau).vector()

    def is_zero(self) -> bool:
        return self.kind == "zero"

    def to_dict(self) -> dict:
        if self.kind == "zero":
            return {"type": "zero"}
        if self.kind == "constant":
            return {
                "type": "constant",
                "force_n": self.force.tolist(),
                "torque_nm": self.torque.tolist(),
            }
        return {
            "type": "table",
            "times_s": self.times.tolist(),
            "forces_n": self.forces.tolist(),
            "torques_nm": self.torques.tolist(),
        }


@dataclass(frozen=True)
class ChaserMotion:
    """Inertial motion of the chaser: pinned, or propagated from an initial
    dual velocity under the chaser's own wrench."""

    kind: str = "fixed"
    omega0: np.ndarray | None = None
    v0: np.ndarray | None = None

    def initial_velocity(self) -> np.ndarray:
        if self.kind == "fixed":
            return dq.ZERO8
        return dq.pure8(self.omega0, self.v0)

    def to_dict(self) -> dict:
        if self.kind == "fixed":
            return {"type": "fixed"}
        return {
            "type": "propagated",
            "angular_velocity_radps": self.omega0.tolist(),
            "velocity_mps": self.v0.tolist(),
        }


@dataclass(frozen=True)
class Scenario:
    seed: int
    initial: ReducedState
    target_mass: MassMatrix
    target_wrench: WrenchSpec
    chaser_mass: MassMatrix
    chaser_wrench: WrenchSpec
    chaser_motion: ChaserMotion
    marker_id: int
    marker_q: np.ndarray
    marker_r: np.ndarray
    dt: float
    duration: float
    sigma_rot: float
    sigma_trans: float

    def marker(self) -> MarkerConfig:
        return MarkerConfig.from_parts(self.marker_q, self.marker_r, self.marker_id)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "initial_state": {
                "attitude": {"quaternion": self.initial.q.tolist()},
                "position_m": self.initial.r.tolist(),
                "angular_velocity_radps": self.initial.omega.tolist(),
                "velocity_mps": self.initial.v.tolist(),
            },
            "target": {
                "mass_kg": float(self.target_mass.mass),
                "inertia_kgm2": self.target_mass.inertia.tolist(),
                "wrench": self.target_wrench.to_dict(),
            },
            "chaser": {
                "mass_kg": float(self.chaser_mass.mass),
                "inertia_kgm2": self.chaser_mass.inertia.tolist(),
                "wrench": self.chaser_wrench.to_dict(),
                "motion": self.chaser_motion.to_dict(),
            },
            "marker": {
                "id": self.marker_id,
                "attitude": {"quaternion": self.marker_q.tolist()},
                "position_m": self.marker_r.tolist(),
            },
            "integration": {"dt_s": self.dt, "duration_s": self.duration},
            "noise": {
                "sigma_rot_rad": self.sigma_rot,
                "sigma_trans_m": self.sigma_trans,
            },
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)

    @staticmethod
    def default() -> "Scenario":
        return scenario_from_dict({})


def _check_keys(d: dict, path: str, allowed: set[str]):
    for key in d:
        if key not in allowed:
            raise ScenarioError(f"{path}.{key}" if path else key, "unknown key")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, "expected a number")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(path, "expected an integer")
    return value


def _vec3(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 3:
        raise ScenarioError(path, "expected a list of 3 numbers")
    return np.array([_number(v, f"{path}[{i}]") for i, v in enumerate(value)])


def _quaternion(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 4:
        raise ScenarioError(path, "expected a list of 4 numbers [w, x, y, z]")
    q = np.array([_number(v, f"{path}[{i}]") for i, v in enumerate(value)])
    try:
        return qt.unit_quaternion(q)
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from None


def _attitude(value, path: str) -> np.ndarray:
    if not isinstance(value, dict):
        raise ScenarioError(path, "expected an object")
    if "quaternion" in value:
        _check_keys(value, path, {"quaternion"})
        return _quaternion(value["quaternion"], f"{path}.quaternion")
    _check_keys(value, path, {"axis", "angle_deg"})
    if "axis" not in value or "angle_deg" not in value:
        raise ScenarioError(path, "expected 'quaternion' or 'axis' + 'angle_deg'")
    axis = _vec3(value["axis"], f"{path}.axis")
    norm = np.linalg.norm(axis)
    if abs(norm - 1.0) > qt.RENORM_TOL:
        raise ScenarioError(f"{path}.axis", "axis must be unit length")
    angle = np.deg2rad(_number(value["angle_deg"], f"{path}.angle_deg"))
    return qt.from_axis_angle(angle, axis / norm)


def _inertia(value, path: str) -> np.ndarray:
    if isinstance(value, list) and len(value) == 3 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return np.diag([_number(v, f"{path}[{i}]") for i, v in enumerate(value)])
    if not isinstance(value, list) or len(value) != 3:
        raise ScenarioError(path, "expected a 3x3 matrix or a list of 3 diagonal moments")
    return np.array([_vec3(row, f"{path}[{i}]") for i, row in enumerate(value)])


def _mass_matrix(value, path: str) -> MassMatrix:
    mass = _number(value.get("mass_kg", 1.0), f"{path}.mass_kg")
    inertia = (
        _inertia(value["inertia_kgm2"], f"{path}.inertia_kgm2")
        if "inertia_kgm2" in value
        else np.eye(3)
    )
    try:
        return MassMatrix(mass, inertia)
    except ValueError as exc:
        raise ScenarioError(path, str(exc)) from None


def _wrench(value, path: str) -> WrenchSpec:
    if not isinstance(value, dict):
        raise ScenarioError(path, "expected an object")
    kind = value.get("type", "zero")
    if kind == "zero":
        _check_keys(value, path, {"type"})
        return WrenchSpec()
    if kind == "constant":
        _check_keys(value, path, {"type", "force_n", "torque_nm"})
        return WrenchSpec(
            kind="constant",
            force=_vec3(value.get("force_n", [0, 0, 0]), f"{path}.force_n"),
            torque=_vec3(value.get("torque_nm", [0, 0, 0]), f"{path}.torque_nm"),
        )
    if kind == "table":
        _check_keys(value, path, {"type", "times_s", "forces_n", "torques_nm"})
        times = value.get("times_s")
        if not isinstance(times, list) or len(times) < 2:
            raise ScenarioError(f"{path}.times_s", "expected at least 2 sample times")
        t = np.array([_number(v, f"{path}.times_s[{i}]") for i, v in enumerate(times)])
        if np.any(np.diff(t) <= 0.0):
            raise ScenarioError(f"{path}.times_s", "times must be strictly increasing")
        for key in ("forces_n", "torques_nm"):
            if key not in value or not isinstance(value[key], list) or len(value[key]) != len(times):
                raise ScenarioError(f"{path}.{key}", "expected one 3-vector per sample time")
        forces = np.array([_vec3(row, f"{path}.forces_n[{i}]") for i, row in enumerate(value["forces_n"])])
        torques = np.array([_vec3(row, f"{path}.torques_nm[{i}]") for i, row in enumerate(value["torques_nm"])])
        return WrenchSpec(kind="table", times=t, forces=forces, torques=torques)
    raise ScenarioError(f"{path}.type", "expected 'zero', 'constant', or 'table'")


def _chaser_motion(value, path: str) -> ChaserMotion:
    if not isinstance(value, dict):
        raise ScenarioError(path, "expected an object")
    kind = value.get("type", "fixed")
    if kind == "fixed":
        _check_keys(value, path, {"type"})
        return ChaserMotion()
    if kind == "propagated":
        _check_keys(value, path, {"type", "angular_velocity_radps", "velocity_mps"})
        return ChaserMotion(
            kind="propagated",
            omega0=_vec3(value.get("angular_velocity_radps", [0, 0, 0]),
                         f"{path}.angular_velocity_radps"),
            v0=_vec3(value.get("velocity_mps", [0, 0, 0]), f"{path}.velocity_mps"),
        )
    raise ScenarioError(f"{path}.type", "expected 'fixed' or 'propagated'")


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("", "scenario document must be a JSON object")
    _check_keys(doc, "", {
        "schema_version", "seed", "initial_state", "target", "chaser",
        "marker", "integration", "noise",
    })
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError("schema_version", f"unsupported version {version!r}")
    seed = _integer(doc.get("seed", 0), "seed")

    init = doc.get("initial_state", {})
    if not isinstance(init, dict):
        raise ScenarioError("initial_state", "expected an object")
    _check_keys(init, "initial_state", {
        "attitude", "position_m", "angular_velocity_radps", "velocity_mps",
    })
    initial = ReducedState(
        q=_attitude(init.get("attitude", {"quaternion": [1, 0, 0, 0]}), "initial_state.attitude"),
        r=_vec3(init.get("position_m", [0, 0, 0]), "initial_state.position_m"),
        omega=_vec3(init.get("angular_velocity_radps", [0, 0, 0]),
                    "initial_state.angular_velocity_radps"),
        v=_vec3(init.get("velocity_mps", [0, 0, 0]), "initial_state.velocity_mps"),
    )

    target = doc.get("target", {})
    if not isinstance(target, dict):
        raise ScenarioError("target", "expected an object")
    _check_keys(target, "target", {"mass_kg", "inertia_kgm2", "wrench"})
    target_mass = _mass_matrix(target, "target")
    target_wrench = _wrench(target.get("wrench", {"type": "zero"}), "target.wrench")

    chaser = doc.get("chaser", {})
    if not isinstance(chaser, dict):
        raise ScenarioError("chaser", "expected an object")
    _check_keys(chaser, "chaser", {"mass_kg", "inertia_kgm2", "wrench", "motion"})
    chaser_mass = _mass_matrix(chaser, "chaser")
    chaser_wrench = _wrench(chaser.get("wrench", {"type": "zero"}), "chaser.wrench")
    chaser_motion = _chaser_motion(chaser.get("motion", {"type": "fixed"}), "chaser.motion")
    if chaser_motion.kind == "fixed" and not chaser_wrench.is_zero():
        raise ScenarioError(
            "chaser.wrench", "a fixed chaser cannot carry a nonzero wrench; "
            "use motion type 'propagated'")

    marker = doc.get("marker", {})
    if not isinstance(marker, dict):
        raise ScenarioError("marker", "expected an object")
    _check_keys(marker, "marker", {"id", "attitude", "position_m"})
    marker_id = _integer(marker.get("id", 0), "marker.id")
    marker_q = _attitude(marker.get("attitude", {"quaternion": [1, 0, 0, 0]}), "marker.attitude")
    marker_r = _vec3(marker.get("position_m", [0, 0, 0]), "marker.position_m")

    integration = doc.get("integration", {})
    if not isinstance(integration, dict):
        raise ScenarioError("integration", "expected an object")
    _check_keys(integration, "integration", {"dt_s", "duration_s"})
    dt = _number(integration.get("dt_s", 1e-3), "integration.dt_s")
    duration = _number(integration.get("duration_s", 1.0), "integration.duration_s")
    if dt <= 0.0:
        raise ScenarioError("integration.dt_s", "dt must be positive")
    if duration < 0.0:
        raise ScenarioError("integration.duration_s", "duration must be non-negative")

    noise = doc.get("noise", {})
    if not isinstance(noise, dict):
        raise ScenarioError("noise", "expected an object")
    _check_keys(noise, "noise", {"sigma_rot_rad", "sigma_trans_m"})
    sigma_rot = _number(noise.get("sigma_rot_rad", 0.0), "noise.sigma_rot_rad")
    sigma_trans = _number(noise.get("sigma_trans_m", 0.0), "noise.sigma_trans_m")
    if sigma_rot < 0.0 or sigma_trans < 0.0:
        raise ScenarioError("noise", "noise sigmas must be non-negative")

    return Scenario(
        seed=seed,
        initial=initial,
        target_mass=target_mass,
        target_wrench=target_wrench,
        chaser_mass=chaser_mass,
        chaser_wrench=chaser_wrench,
        chaser_motion=chaser_motion,
        marker_id=marker_id,
        marker_q=marker_q,
        marker_r=marker_r,
        dt=dt,
        duration=duration,
        sigma_rot=sigma_rot,
        sigma_trans=sigma_trans,
    )


def parse_scenario_text(text: str, source: str = "<string>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            source, f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    return scenario_from_dict(doc)


def parse_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(str(path), f"cannot read scenario file: {exc}") from None
    return parse_scenario_text(text, source=str(path))
