"""Random generators for states, poses, and body parameters.

Used by the randomized rank sweeps and the test suite.  Everything takes
an explicit numpy Generator so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from . import dualquat as dq
from .dynamics import MassMatrix


def unit_quaternions(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform samples on the unit 3-sphere, shape (n, 4)."""
    q = rng.standard_normal((n, 4))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def uniform_ball(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """Uniform samples in the solid ball of the given radius, shape (n, 3)."""
    direction = rng.standard_normal((n, 3))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    return direction * radius * rng.uniform(0.0, 1.0, (n, 1)) ** (1.0 / 3.0)


def unit_dual_poses(rng: np.random.Generator, n: int, r_max: float = 10.0) -> np.ndarray:
    """Random unit dual poses with translations in a ball, shape (n, 8)."""
    q = unit_quaternions(rng, n)
    r = uniform_ball(rng, n, r_max)
    return dq.dual_pose_from(q, r, frame="parent")


def relative_states(rng: np.random.Generator, n: int, r_max: float = 10.0,
                    w_max: float = 10.0, v_max: float = 10.0) -> np.ndarray:
    """Random 16-component relative states, shape (n, 16).

    Poses are uniform unit dual poses; angular and translational rates are
    uniform in balls of the given radii, coupled through the sampled
    position as the state convention requires.
    """
    q = unit_quaternions(rng, n)
    r = uniform_ball(rng, n, r_max)
    omega = uniform_ball(rng, n, w_max)
    v = uniform_ball(rng, n, v_max)
    pose = dq.dual_pose_from(q, r, frame="parent")
    velocity = dq.dual_velocity_from(omega, v, -r)
    return np.concatenate([pose, velocity], axis=-1)


def marker_poses(rng: np.random.Generator, n: int, r_max: float = 2.0) -> np.ndarray:
    """Random unit marker mounting poses, shape (n, 8)."""
    return unit_dual_poses(rng, n, r_max)


def mass_matrices(rng: np.random.Generator, n: int, mass_range=(1.0, 10.0),
                  moment_range=(1.5, 3.0)) -> MassMatrix:
    """Batch of physically plausible bodies as one batched MassMatrix.

    Principal moments are drawn from a range that always satisfies the
    triangle inequality, then rotated by a random attitude.
    """
    mass = rng.uniform(*mass_range, n)
    moments = rng.uniform(*moment_range, (n, 3))
    q = unit_quaternions(rng, n)
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    rot = np.empty((n, 3, 3))
    rot[:, 0, 0] = 1 - 2 * (y * y + z * z)
    rot[:, 0, 1] = 2 * (x * y - w * z)
    rot[:, 0, 2] = 2 * (x * z + w * y)
    rot[:, 1, 0] = 2 * (x * y + w * z)
    rot[:, 1, 1] = 1 - 2 * (x * x + z * z)
    rot[:, 1, 2] = 2 * (y * z - w * x)
    rot[:, 2, 0] = 2 * (x * z - w * y)
    rot[:, 2, 1] = 2 * (y * z + w * x)
    rot[:, 2, 2] = 1 - 2 * (x * x + y * y)
    inertia = np.einsum("nij,nj,nkj->nik", rot, moments, rot)
    inertia = 0.5 * (inertia + np.swapaxes(inertia, -1, -2))
    return MassMatrix(mass, inertia)
