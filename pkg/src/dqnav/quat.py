"""Quaternion algebra with scalar-first storage.

A quaternion is a plain float ndarray of shape (..., 4) ordered
``[w, x, y, z]``: the scalar component is always entry 0 and the vector
part occupies entries 1:4.  A lot of robotics software stores the scalar
last, so reorder anything imported from outside this package.

Unit quaternions represent rotations with the usual double cover (q and -q
encode the same rotation).  No operation here touches the sign; use
:func:`canonicalize` explicitly when comparing rotations.

All functions broadcast over leading axes and return fresh arrays, so
values are immutable in practice and safe to share between threads.
"""

from __future__ import annotations

import numpy as np

#: Acceptance tolerance on | ||q||^2 - 1 | for treating q as unit.
UNIT_TOL = 1e-9

#: Construction window: inputs within this distance of unit norm are
#: renormalized, anything farther is rejected rather than silently fixed.
RENORM_TOL = 1e-6

#: A vector (pure) quaternion must have |scalar| below this.
PURE_TOL = 1e-12

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])
ZERO = np.zeros(4)

#: Conjugation matrix: ``qconj(a) == CONJ_MAT @ a``.
CONJ_MAT = np.diag([1.0, -1.0, -1.0, -1.0])


def pure(v) -> np.ndarray:
    """Embed 3-vectors (..., 3) as vector quaternions [0, v]."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (4,))
    out[..., 1:] = v
    return out


def vec(q) -> np.ndarray:
    """Vector part of a quaternion array."""
    return np.asarray(q, dtype=float)[..., 1:]


def qmul(a, b) -> np.ndarray:
    """Quaternion product [a0*b0 - av.bv, a0*bv + b0*av + av x bv]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = aw * bw - ax * bx - ay * by - az * bz
    out[..., 1] = aw * bx + bw * ax + ay * bz - az * by
    out[..., 2] = aw * by + bw * ay + az * bx - ax * bz
    out[..., 3] = aw * bz + bw * az + ax * by - ay * bx
    return out


def qconj(a) -> np.ndarray:
    """Conjugate [a0, -av]; distributes as (a b)* = b* a*."""
    a = np.asarray(a, dtype=float)
    out = a.copy()
    out[..., 1:] = -out[..., 1:]
    return out


def qdot(a, b) -> np.ndarray:
    """Dot product as a scalar quaternion [a0*b0 + av.bv, 0, 0, 0]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.sum(a * b, axis=-1, keepdims=True)
    return np.concatenate([s, np.zeros(s.shape[:-1] + (3,))], axis=-1)


def qcross(a, b) -> np.ndarray:
    """Cross product [0, a0*bv + b0*av + av x bv]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = 0.0
    out[..., 1] = aw * bx + bw * ax + ay * bz - az * by
    out[..., 2] = aw * by + bw * ay + az * bx - ax * bz
    out[..., 3] = aw * bz + bw * az + ax * by - ay * bx
    return out


def qnorm2(a):
    """Squared norm, the scalar part of a.a (sum of the four squares)."""
    a = np.asarray(a, dtype=float)
    return np.sum(a * a, axis=-1)


def from_axis_angle(angle, axis) -> np.ndarray:
    """Unit quaternion [cos(angle/2), axis*sin(angle/2)].

    ``axis`` must already be unit length (to 1e-9); callers normalize their
    own inputs so that a wrong axis cannot slip through silently.
    """
    angle = np.asarray(angle, dtype=float)
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis, axis=-1)
    if np.any(np.abs(n - 1.0) > 1e-9):
        raise ValueError("rotation axis must be a unit 3-vector")
    half = 0.5 * angle
    w = np.cos(half)[..., None]
    v = np.sin(half)[..., None] * axis
    return np.concatenate([w, v], axis=-1)


def rotate_vector(q, v) -> np.ndarray:
    """Rotate the vector quaternion v by unit q: returns q v q*.

    For q the orientation of a child frame with respect to its parent,
    this maps child coordinates to parent coordinates.  The inverse
    transform (parent to child) is q* v q; pass ``qconj(q)``.
    """
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(qnorm2(q) - 1.0) > UNIT_TOL):
        raise ValueError("rotate_vector requires a unit quaternion")
    if np.any(np.abs(v[..., 0]) > PURE_TOL):
        raise ValueError("rotate_vector requires a vector quaternion")
    return qmul(qmul(q, v), qconj(q))


def skew(v) -> np.ndarray:
    """Skew matrix of 3-vectors: skew(v) @ w == v x w."""
    v = np.asarray(v, dtype=float)
    z = np.zeros(v.shape[:-1])
    x, y, w = v[..., 0], v[..., 1], v[..., 2]
    return np.stack(
        [
            np.stack([z, -w, y], axis=-1),
            np.stack([w, z, -x], axis=-1),
            np.stack([-y, x, z], axis=-1),
        ],
        axis=-2,
    )


def left_mat(q) -> np.ndarray:
    """Left multiplication matrix: left_mat(a) @ b == qmul(a, b)."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            np.stack([w, -x, -y, -z], axis=-1),
            np.stack([x, w, -z, y], axis=-1),
            np.stack([y, z, w, -x], axis=-1),
            np.stack([z, -y, x, w], axis=-1),
        ],
        axis=-2,
    )


def right_mat(q) -> np.ndarray:
    """Right multiplication matrix: right_mat(b) @ a == qmul(a, b)."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            np.stack([w, -x, -y, -z], axis=-1),
            np.stack([x, w, z, -y], axis=-1),
            np.stack([y, -z, w, x], axis=-1),
            np.stack([z, y, -x, w], axis=-1),
        ],
        axis=-2,
    )


def qkin(q, omega_child) -> np.ndarray:
    """Attitude rate 0.5 * q * w for body rate w in child coordinates."""
    omega_child = np.asarray(omega_child, dtype=float)
    if np.any(np.abs(omega_child[..., 0]) > PURE_TOL):
        raise ValueError("angular velocity must be a vector quaternion")
    return 0.5 * qmul(q, omega_child)


def qkin_parent(q, omega_parent) -> np.ndarray:
    """Attitude rate 0.5 * w * q for the rate expressed in the parent frame."""
    omega_parent = np.asarray(omega_parent, dtype=float)
    if np.any(np.abs(omega_parent[..., 0]) > PURE_TOL):
        raise ValueError("angular velocity must be a vector quaternion")
    return 0.5 * qmul(omega_parent, q)


def is_unit(q, tol: float = UNIT_TOL):
    """True where | ||q||^2 - 1 | <= tol."""
    return np.abs(qnorm2(q) - 1.0) <= tol


def unit_quaternion(q) -> np.ndarray:
    """Validate-and-normalize a quaternion expected to be unit.

    Inputs within RENORM_TOL of unit norm are renormalized exactly;
    anything farther off is rejected, because silently normalizing a
    grossly wrong value hides bugs at the call site.
    """
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != 4:
        raise ValueError("quaternion arrays must have 4 trailing components")
    n = np.linalg.norm(q, axis=-1)
    if np.any(np.abs(n - 1.0) > RENORM_TOL):
        raise ValueError(
            f"quaternion norm {np.max(np.abs(n - 1.0)):.3e} away from unit "
            f"exceeds the renormalization window {RENORM_TOL:g}"
        )
    return q / n[..., None]


def canonicalize(q) -> np.ndarray:
    """Flip sign so the first nonzero component is positive.

    Test-comparison helper only; the algebra preserves the sign of q
    because downstream analysis treats quaternions as points in R^4.
    """
    q = np.asarray(q, dtype=float)
    first_nonzero = np.argmax(q != 0.0, axis=-1)
    lead = np.take_along_axis(q, first_nonzero[..., None], axis=-1)
    sign = np.where(lead < 0.0, -1.0, 1.0)
    return q * sign
