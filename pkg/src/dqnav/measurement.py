"""Fiducial-marker relative pose measurement.

A detected marker yields the dual pose of the marker frame M with respect
to the camera frame C.  The marker's mounting pose on the target is known,
so the measurement is the product of the relative pose and the mounting
pose.  Synthetic noise perturbs the true pose on the right (marker-frame
referenced), matching how detection error is body-referenced; the analysis
elsewhere in this package is noise-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dualquat as dq
from . import quat as qt
from .dynamics import RelativeState


@dataclass(frozen=True)
class MarkerConfig:
    """Known mounting pose of a marker on the target, plus its id."""

    pose_in_target: np.ndarray
    marker_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pose_in_target", dq.unit_dualquat(self.pose_in_target))

    @staticmethod
    def at_origin(marker_id: int = 0) -> "MarkerConfig":
        return MarkerConfig(dq.IDENTITY8, marker_id)

    @staticmethod
    def from_parts(q, r_in_target, marker_id: int = 0) -> "MarkerConfig":
        return MarkerConfig(dq.dual_pose_from(q, r_in_target, frame="parent"), marker_id)


@dataclass(frozen=True)
class PoseMeasurement:
    """Dual pose of the marker w.r.t. the camera at a given time."""

    value: np.ndarray
    timestamp: float = 0.0

    def __post_init__(self):
        value = np.asarray(self.value, dtype=float)
        if not np.all(dq.is_unit_dualquat(value)):
            raise ValueError("measured pose must be a unit dual quaternion")
        object.__setattr__(self, "value", value)


def measure(state: RelativeState, marker: MarkerConfig, timestamp: float = 0.0) -> PoseMeasurement:
    """Exact marker pose measurement: relative pose times mounting pose."""
    return PoseMeasurement(dq.dqmul(state.pose, marker.pose_in_target), timestamp)


def perturbation_pose(sigma_rot: float, sigma_trans: float, rng: np.random.Generator) -> np.ndarray:
    """Random small pose: rotation angle ~ N(0, sigma_rot) about a uniform
    axis, translation ~ N(0, sigma_trans^2 I3).  Consumes exactly seven
    normal draws so sequences stay reproducible."""
    axis = rng.standard_normal(3)
    norm = np.linalg.norm(axis)
    if norm < 1e-12:
        axis, norm = np.array([0.0, 0.0, 1.0]), 1.0
    angle = sigma_rot * rng.standard_normal()
    offset = sigma_trans * rng.standard_normal(3)
    return dq.dual_pose_from(qt.from_axis_angle(angle, axis / norm), offset, frame="child")


def measure_noisy(state: RelativeState, marker: MarkerConfig, sigma_rot: float,
                  sigma_trans: float, rng, timestamp: float = 0.0) -> PoseMeasurement:
    """Measurement with right-multiplied synthetic noise.

    ``rng`` is a seed or a numpy Generator; a fixed seed reproduces the
    output bit for bit.  With both sigmas zero the exact measurement is
    returned unchanged.
    """
    if sigma_rot < 0.0 or sigma_trans < 0.0:
        raise ValueError("noise sigmas must be non-negative")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    noise = perturbation_pose(sigma_rot, sigma_trans, rng)
    exact = dq.dqmul(state.pose, marker.pose_in_target)
    if np.array_equal(noise, dq.IDENTITY8):
        return PoseMeasurement(exact, timestamp)
    return PoseMeasurement(dq.unit_dualquat(dq.dqmul(exact, noise)), timestamp)
