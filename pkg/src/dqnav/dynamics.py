"""Relative rigid-body motion of a target frame T w.r.t. a chaser frame C.

The 16-component relative state stacks the dual pose of T with respect to
C (8 floats) and the relative dual velocity in C coordinates (8 floats,
both scalar slots structurally zero).  A third frame I (inertial) appears
whenever body dynamics are involved:

* each body obeys its own inertial equations of motion in body
  coordinates (Euler plus Newton, packed into one dual-quaternion rate),
* the relative velocity rate follows from the transport theorem applied
  to the inertial velocities.

The chaser's own inertial dual velocity is an explicit input everywhere:
the relative state alone does not determine it, so scenarios either pin
the chaser (zero, the default) or co-propagate it alongside the relative
state.  Integration is fixed-step RK4 on the raw components with a
unit-pose projection after every step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import dualquat as dq
from . import quat as qt

#: Relative state vector layout.
POSE = slice(0, 8)
VELOCITY = slice(8, 16)
#: Structurally zero scalar slots of the velocity block within the 16-vector.
VELOCITY_SCALARS = (8, 12)


class DivergenceError(RuntimeError):
    """Propagation produced a non-finite state."""

    def __init__(self, step: int, last_time: float):
        super().__init__(
            f"non-finite state after step {step}; last good epoch t={last_time:.6g} s"
        )
        self.step = step
        self.last_time = last_time


@dataclass(frozen=True)
class MassMatrix:
    """Mass and inertia of one body, applied blockwise to dual velocities.

    Acts as blkdiag(1, m*I3, 1, J) on the 8 components of a vector dual
    quaternion: scalar slots pass through, the real vector scales by the
    mass and the dual vector by the inertia tensor J (body coordinates).
    Leading axes on ``mass``/``inertia`` batch several bodies at once.
    """

    mass: np.ndarray
    inertia: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape[-2:] != (3, 3):
            raise ValueError("inertia must be a 3x3 matrix")
        if np.any(mass <= 0.0):
            raise ValueError("mass must be positive")
        scale = max(1.0, float(np.max(np.abs(inertia))))
        if np.max(np.abs(inertia - np.swapaxes(inertia, -1, -2))) > 1e-12 * scale:
            raise ValueError("inertia must be symmetric")
        eigs = np.linalg.eigvalsh(inertia)
        if np.any(eigs <= 0.0):
            raise ValueError("inertia must be positive definite")
        # A rigid body's principal moments satisfy the triangle inequality;
        # violating it is suspicious but not fatal for the math.
        if np.any(eigs[..., 2] > eigs[..., 0] + eigs[..., 1] + 1e-12 * scale):
            warnings.warn(
                "principal moments of inertia violate the triangle inequality",
                stacklevel=2,
            )
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "inertia", inertia)
        object.__setattr__(self, "inertia_inv", np.linalg.inv(inertia))

    @staticmethod
    def identity() -> "MassMatrix":
        return MassMatrix(1.0, np.eye(3))


@dataclass(frozen=True)
class DualForce:
    """Net external force and torque on a body, in body coordinates."""

    force: np.ndarray
    torque: np.ndarray

    def __post_init__(self):
        force = np.asarray(self.force, dtype=float)
        torque = np.asarray(self.torque, dtype=float)
        if force.shape[-1] != 3 or torque.shape[-1] != 3:
            raise ValueError("force and torque must be 3-vectors")
        object.__setattr__(self, "force", force)
        object.__setattr__(self, "torque", torque)

    def vector(self) -> np.ndarray:
        """As the vector dual quaternion [0, f, 0, tau]."""
        return dq.pure8(self.force, self.torque)

    @staticmethod
    def zero() -> "DualForce":
        return DualForce(np.zeros(3), np.zeros(3))


@dataclass(frozen=True)
class ReducedState:
    """Minimal 13-component relative state (q, r, omega, v), C coordinates."""

    q: np.ndarray
    r: np.ndarray
    omega: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", qt.unit_quaternion(self.q))
        for name in ("r", "omega", "v"):
            value = np.asarray(getattr(self, name), dtype=float)
            if value.shape[-1] != 3:
                raise ValueError(f"{name} must be a 3-vector")
            object.__setattr__(self, name, value)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.r, self.omega, self.v], axis=-1)

    @staticmethod
    def from_array(a) -> "ReducedState":
        a = np.asarray(a, dtype=float)
        return ReducedState(a[..., 0:4], a[..., 4:7], a[..., 7:10], a[..., 10:13])

    @staticmethod
    def identity() -> "ReducedState":
        return ReducedState(qt.IDENTITY, np.zeros(3), np.zeros(3), np.zeros(3))


@dataclass(frozen=True)
class RelativeState:
    """Dual pose plus dual velocity, 16 raw components."""

    pose: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        pose = np.asarray(self.pose, dtype=float)
        velocity = np.asarray(self.velocity, dtype=float)
        if not np.all(dq.is_unit_dualquat(pose)):
            raise ValueError("relative pose must be a unit dual quaternion")
        if not np.all(dq.is_pure(velocity)):
            raise ValueError("relative velocity must be a vector dual quaternion")
        object.__setattr__(self, "pose", pose)
        object.__setattr__(self, "velocity", velocity)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.pose, self.velocity], axis=-1)

    @staticmethod
    def from_vector(x) -> "RelativeState":
        x = np.asarray(x, dtype=float)
        return RelativeState(x[..., POSE], x[..., VELOCITY])

    @staticmethod
    def identity() -> "RelativeState":
        return RelativeState(dq.IDENTITY8, dq.ZERO8)


@dataclass(frozen=True)
class InertialBodyState:
    """Pose of a body w.r.t. the inertial frame plus its body dual velocity."""

    pose: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        pose = np.asarray(self.pose, dtype=float)
        velocity = np.asarray(self.velocity, dtype=float)
        if not np.all(dq.is_unit_dualquat(pose)):
            raise ValueError("body pose must be a unit dual quaternion")
        if not np.all(dq.is_pure(velocity)):
            raise ValueError("body velocity must be a vector dual quaternion")
        object.__setattr__(self, "pose", pose)
        object.__setattr__(self, "velocity", velocity)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.pose, self.velocity], axis=-1)


def apply_mass(mass_matrix: MassMatrix, w) -> np.ndarray:
    """blkdiag(1, m I3, 1, J) applied to a vector dual quaternion."""
    w = np.asarray(w, dtype=float)
    mass = np.asarray(mass_matrix.mass, dtype=float)
    lead = np.broadcast_shapes(w.shape[:-1], mass.shape, mass_matrix.inertia.shape[:-2])
    out = np.empty(lead + (8,))
    out[..., 0] = w[..., 0]
    out[..., 4] = w[..., 4]
    out[..., 1:4] = mass[..., None] * w[..., 1:4]
    out[..., 5:8] = np.einsum("...ij,...j->...i", mass_matrix.inertia, w[..., 5:8])
    return out


def apply_mass_inverse(mass_matrix: MassMatrix, w) -> np.ndarray:
    """Inverse of :func:`apply_mass`."""
    w = np.asarray(w, dtype=float)
    mass = np.asarray(mass_matrix.mass, dtype=float)
    lead = np.broadcast_shapes(w.shape[:-1], mass.shape, mass_matrix.inertia.shape[:-2])
    out = np.empty(lead + (8,))
    out[..., 0] = w[..., 0]
    out[..., 4] = w[..., 4]
    out[..., 1:4] = w[..., 1:4] / mass[..., None]
    out[..., 5:8] = np.einsum("...ij,...j->...i", mass_matrix.inertia_inv, w[..., 5:8])
    return out


def body_velocity_rate(mass_matrix: MassMatrix, w, wrench) -> np.ndarray:
    """Dual velocity rate of one body in its own coordinates.

    swap(Minv (f - w x M swap(w))): the real part of the result is Euler's
    equation Jinv (tau - w x J w) and the dual part is f/m - w x v.
    """
    momentum = apply_mass(mass_matrix, dq.dqswap(w))
    residual = np.asarray(wrench, dtype=float) - dq.dqcross(w, momentum)
    return dq.dqswap(apply_mass_inverse(mass_matrix, residual))


def inertial_rate(y, mass_matrix: MassMatrix, wrench) -> np.ndarray:
    """Rate of a 16-component inertial body state [pose | velocity]."""
    y = np.asarray(y, dtype=float)
    pose = y[..., POSE]
    w = y[..., VELOCITY]
    pose_rate = dq.dqkin(pose, w)
    vel_rate = body_velocity_rate(mass_matrix, w, wrench)
    return np.concatenate([pose_rate, vel_rate], axis=-1)


def inertial_dynamics(state: InertialBodyState, mass_matrix: MassMatrix, wrench: DualForce):
    """Pose and velocity rates of one body with respect to the inertial frame."""
    rate = inertial_rate(state.as_vector(), mass_matrix, wrench.vector())
    return rate[..., POSE], rate[..., VELOCITY]


def transport_theorem(pose, w_rel, w_ti_t_rate, w_ti_c) -> np.ndarray:
    """Inertial velocity rate of the target re-expressed in C coordinates.

    ``pose`` is the dual pose of T w.r.t. C, ``w_rel`` the relative dual
    velocity (C coordinates), ``w_ti_t_rate`` the target's inertial
    velocity rate in T coordinates, ``w_ti_c`` the target's inertial
    velocity in C coordinates.  Returns the sandwich-transformed rate plus
    the frame-rotation cross correction.
    """
    return dq.sandwich(pose, w_ti_t_rate) + dq.dqcross(w_rel, w_ti_c)


def relative_rate(x, target_mass: MassMatrix, target_wrench, chaser_mass: MassMatrix,
                  chaser_wrench, chaser_velocity) -> np.ndarray:
    """Rate of the 16-component relative state.

    ``chaser_velocity`` is the chaser's own inertial dual velocity in C
    coordinates (zero for an inertially fixed chaser).  Wrenches are raw
    (..., 8) vector dual quaternions in each body's own coordinates.
    Polynomial in the state, so valid for off-manifold evaluations too.
    """
    x = np.asarray(x, dtype=float)
    pose = x[..., POSE]
    w_rel = x[..., VELOCITY]
    chaser_velocity = np.asarray(chaser_velocity, dtype=float)

    w_ti_c = w_rel + chaser_velocity
    w_ti_t = dq.sandwich(dq.dqconj(pose), w_ti_c)
    target_accel = body_velocity_rate(target_mass, w_ti_t, target_wrench)
    w_ti_c_rate = transport_theorem(pose, w_rel, target_accel, w_ti_c)
    chaser_accel = body_velocity_rate(chaser_mass, chaser_velocity, chaser_wrench)

    vel_rate = w_ti_c_rate - chaser_accel
    pose_rate = dq.dqkin_parent(pose, w_rel)
    return np.concatenate([pose_rate, vel_rate], axis=-1)


def relative_dynamics(state: RelativeState, target, chaser,
                      chaser_velocity=None) -> np.ndarray:
    """Typed wrapper around :func:`relative_rate`.

    ``target`` and ``chaser`` are (MassMatrix, DualForce) pairs; the chaser
    defaults to inertially fixed.
    """
    target_mass, target_wrench = target
    chaser_mass, chaser_wrench = chaser
    if chaser_velocity is None:
        chaser_velocity = dq.ZERO8
    return relative_rate(
        state.as_vector(),
        target_mass,
        target_wrench.vector(),
        chaser_mass,
        chaser_wrench.vector(),
        chaser_velocity,
    )


def project_relative(y) -> np.ndarray:
    """Re-project a propagated relative vector: unit pose, pure velocity."""
    y = np.asarray(y, dtype=float).copy()
    y[..., POSE] = dq.unit_dualquat(y[..., POSE])
    for i in VELOCITY_SCALARS:
        y[..., i] = 0.0
    return y


def rk4_step_vec(y, t: float, rate_fn, dt: float) -> np.ndarray:
    """One classical RK4 step of y' = rate_fn(t, y)."""
    k1 = rate_fn(t, y)
    k2 = rate_fn(t + 0.5 * dt, y + (0.5 * dt) * k1)
    k3 = rate_fn(t + 0.5 * dt, y + (0.5 * dt) * k2)
    k4 = rate_fn(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(state: RelativeState, rate_fn, dt: float, t: float = 0.0) -> RelativeState:
    """Integrate a RelativeState one step and re-project the pose."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    y = state.as_vector()
    if not np.all(np.isfinite(y)):
        raise ValueError("state contains non-finite components")
    y = project_relative(rk4_step_vec(y, t, rate_fn, dt))
    return RelativeState.from_vector(y)


def propagate(y0, rate_fn, dt: float, n_steps: int, project=None, keep_every: int = 0,
              t0: float = 0.0):
    """Fixed-step RK4 propagation of a raw state array.

    ``project`` is applied after every step when given.  With
    ``keep_every`` = k > 0, returns (times, history) sampled every k steps
    (always including the initial and final states); otherwise returns the
    final state only.  Raises DivergenceError on non-finite states.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    y = np.array(y0, dtype=float)
    keep = keep_every > 0
    if keep:
        times = [t0]
        history = [y.copy()]
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps):
            t = t0 + k * dt
            y = rk4_step_vec(y, t, rate_fn, dt)
            if project is not None:
                y = project(y)
            if not np.all(np.isfinite(y)):
                raise DivergenceError(step=k + 1, last_time=t)
            if keep and ((k + 1) % keep_every == 0 or k + 1 == n_steps):
                times.append(t0 + (k + 1) * dt)
                history.append(y.copy())
    if keep:
        return np.array(times), np.array(history)
    return y


def embed_vector(xi13) -> np.ndarray:
    """Map reduced 13-component arrays onto 16-component relative vectors."""
    xi13 = np.asarray(xi13, dtype=float)
    q = xi13[..., 0:4]
    r = xi13[..., 4:7]
    omega = xi13[..., 7:10]
    v = xi13[..., 10:13]
    pose = dq.dual_pose_from(q, r, frame="parent")
    velocity = dq.dual_velocity_from(omega, v, -r)
    return np.concatenate([pose, velocity], axis=-1)


def reduce_vector(x16) -> np.ndarray:
    """Inverse of :func:`embed_vector` on raw arrays."""
    x16 = np.asarray(x16, dtype=float)
    q, r = dq.pose_to_parts(x16[..., POSE], frame="parent")
    omega, v = dq.twist_to_parts(x16[..., VELOCITY], -r)
    return np.concatenate([q, r, omega, v], axis=-1)


def state_embed(xi: ReducedState) -> RelativeState:
    """Embed the reduced state in the 16-component representation."""
    return RelativeState.from_vector(embed_vector(xi.as_array()))


def state_reduce(state: RelativeState) -> ReducedState:
    """Recover the reduced state; exact inverse of :func:`state_embed`."""
    return ReducedState.from_array(reduce_vector(state.as_vector()))


def rotational_energy(mass_matrix: MassMatrix, omega) -> np.ndarray:
    """Rotational kinetic energy 0.5 w . J w."""
    omega = np.asarray(omega, dtype=float)
    j_omega = np.einsum("...ij,...j->...i", mass_matrix.inertia, omega)
    return 0.5 * np.sum(omega * j_omega, axis=-1)
