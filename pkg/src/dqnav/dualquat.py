"""Dual quaternion algebra on arrays of shape (..., 8).

A dual quaternion is stored as the real quaternion followed by the dual
quaternion, ``[real(4) | dual(4)]``, each scalar-first.  The dual unit
satisfies eps^2 = 0, so products never mix the two dual parts.

Two composite values matter everywhere downstream:

* dual pose  ``q + eps * 0.5 * r_hat * q``  encodes orientation q plus the
  translation r of the child frame relative to the parent; r_hat is the
  vector quaternion of r in parent coordinates (equivalently
  ``q + eps * 0.5 * q * r_child``).
* dual velocity ``w + eps * (v + w x r)`` couples angular rate w and
  translational rate v; the cross term uses the position of the expression
  frame relative to the moving body.  Because of that coupling, every
  conversion to or from a plain (w, v) twist takes the position argument
  explicitly.

All functions broadcast over leading axes and return fresh arrays.
"""

from __future__ import annotations

import numpy as np

from .quat import (
    PURE_TOL,
    RENORM_TOL,
    UNIT_TOL,
    left_mat,
    pure,
    qconj,
    qcross,
    qmul,
    right_mat,
    unit_quaternion,
)

IDENTITY8 = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
ZERO8 = np.zeros(8)

#: Dual conjugation matrix: ``dqconj(a) == CONJ_MAT8 @ a``.
CONJ_MAT8 = np.diag([1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0])


def real(a) -> np.ndarray:
    """Real quaternion part."""
    return np.asarray(a, dtype=float)[..., :4]


def dual(a) -> np.ndarray:
    """Dual quaternion part."""
    return np.asarray(a, dtype=float)[..., 4:]


def compose(real_part, dual_part) -> np.ndarray:
    """Join real and dual quaternion parts into one (..., 8) array."""
    real_part, dual_part = np.broadcast_arrays(
        np.asarray(real_part, dtype=float), np.asarray(dual_part, dtype=float)
    )
    return np.concatenate([real_part, dual_part], axis=-1)


def pure8(v_real, v_dual) -> np.ndarray:
    """Vector dual quaternion [0, v_real, 0, v_dual] from two 3-vectors."""
    return compose(pure(v_real), pure(v_dual))


def dqmul(a, b) -> np.ndarray:
    """Product (ar br) + eps (ad br + ar bd); the eps^2 term is dropped."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ar, ad = a[..., :4], a[..., 4:]
    br, bd = b[..., :4], b[..., 4:]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., :4] = qmul(ar, br)
    out[..., 4:] = qmul(ad, br) + qmul(ar, bd)
    return out


def dqconj(a) -> np.ndarray:
    """Conjugate of both parts; (a b)* = b* a*."""
    a = np.asarray(a, dtype=float)
    return compose(qconj(a[..., :4]), qconj(a[..., 4:]))


def dqswap(a) -> np.ndarray:
    """Exchange real and dual parts."""
    a = np.asarray(a, dtype=float)
    out = np.empty_like(a)
    out[..., :4] = a[..., 4:]
    out[..., 4:] = a[..., :4]
    return out


def dqdot(a, b) -> np.ndarray:
    """Dot product (ar.br) + eps (ad.br + ar.bd), parts scalar quaternions."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ar, ad = a[..., :4], a[..., 4:]
    br, bd = b[..., :4], b[..., 4:]
    lead = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
    out = np.zeros(lead + (8,))
    out[..., 0] = np.sum(ar * br, axis=-1)
    out[..., 4] = np.sum(ad * br, axis=-1) + np.sum(ar * bd, axis=-1)
    return out


def dqcross(a, b) -> np.ndarray:
    """Cross product (ar x br) + eps (ad x br + ar x bd)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ar, ad = a[..., :4], a[..., 4:]
    br, bd = b[..., :4], b[..., 4:]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., :4] = qcross(ar, br)
    out[..., 4:] = qcross(ad, br) + qcross(ar, bd)
    return out


def dqnorm2(a):
    """Squared norm ar.ar + ad.ad (a real number, the dual term is zero)."""
    a = np.asarray(a, dtype=float)
    return np.sum(a * a, axis=-1)


def left_mat8(a) -> np.ndarray:
    """8x8 left multiplication matrix, block lower triangular.

    ``left_mat8(a) @ b == dqmul(a, b)``; the (1, 2) block is zero and both
    diagonal blocks equal ``left_mat(real(a))``.
    """
    a = np.asarray(a, dtype=float)
    lr = left_mat(a[..., :4])
    ld = left_mat(a[..., 4:])
    z = np.zeros_like(lr)
    top = np.concatenate([lr, z], axis=-1)
    bottom = np.concatenate([ld, lr], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def right_mat8(a) -> np.ndarray:
    """8x8 right multiplication matrix: right_mat8(b) @ a == dqmul(a, b)."""
    a = np.asarray(a, dtype=float)
    rr = right_mat(a[..., :4])
    rd = right_mat(a[..., 4:])
    z = np.zeros_like(rr)
    top = np.concatenate([rr, z], axis=-1)
    bottom = np.concatenate([rd, rr], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def is_pure(a, tol: float = PURE_TOL):
    """True where both scalar slots are within tol of zero."""
    a = np.asarray(a, dtype=float)
    return (np.abs(a[..., 0]) <= tol) & (np.abs(a[..., 4]) <= tol)


def is_unit_dualquat(a, tol: float = UNIT_TOL):
    """Unit test: real part unit and real.dual orthogonal, both to tol.

    The two scalar conditions together are equivalent to conj(a) * a
    equalling the identity dual quaternion.
    """
    a = np.asarray(a, dtype=float)
    ar, ad = a[..., :4], a[..., 4:]
    unit = np.abs(np.sum(ar * ar, axis=-1) - 1.0) <= tol
    ortho = np.abs(np.sum(ar * ad, axis=-1)) <= tol
    return unit & ortho


def unit_dualquat(a) -> np.ndarray:
    """Validate-and-project a dual quaternion expected to be unit.

    The real part is normalized to the unit sphere and the dual part has
    its component along the real part removed.  This is the projection
    applied after every integration step.  Inputs outside the RENORM_TOL
    window are rejected.
    """
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != 8:
        raise ValueError("dual quaternion arrays must have 8 trailing components")
    ar, ad = a[..., :4], a[..., 4:]
    n = np.linalg.norm(ar, axis=-1)
    if np.any(np.abs(n - 1.0) > RENORM_TOL):
        raise ValueError("real part too far from unit norm to renormalize")
    ar = ar / n[..., None]
    defect = np.sum(ar * ad, axis=-1)
    if np.any(np.abs(defect) > RENORM_TOL):
        raise ValueError("real/dual orthogonality defect too large to project")
    ad = ad - defect[..., None] * ar
    return compose(ar, ad)


def dual_pose_from(q, r, frame: str = "parent") -> np.ndarray:
    """Build the unit dual pose of a child frame from (q, r).

    ``frame`` names the coordinates of the translation r: "parent" gives
    ``q + eps 0.5 r_hat q`` and "child" gives ``q + eps 0.5 q r_hat``.
    Both forms produce the same pose when fed consistent coordinates.
    """
    q = unit_quaternion(q)
    r_hat = pure(r)
    if frame == "parent":
        d = 0.5 * qmul(r_hat, q)
    elif frame == "child":
        d = 0.5 * qmul(q, r_hat)
    else:
        raise ValueError("frame must be 'parent' or 'child'")
    return compose(q, d)


def pose_to_parts(p, frame: str = "parent"):
    """Recover (q, r) from a unit dual pose; inverts dual_pose_from.

    Uses r_hat = 2 qd qr* (parent coordinates) or 2 qr* qd (child).
    """
    p = np.asarray(p, dtype=float)
    if not np.all(is_unit_dualquat(p)):
        raise ValueError("pose_to_parts requires a unit dual quaternion")
    q = p[..., :4]
    d = p[..., 4:]
    if frame == "parent":
        r_hat = 2.0 * qmul(d, qconj(q))
    elif frame == "child":
        r_hat = 2.0 * qmul(qconj(q), d)
    else:
        raise ValueError("frame must be 'parent' or 'child'")
    return q, r_hat[..., 1:]


def dual_velocity_from(omega, v, r_frame_wrt_body) -> np.ndarray:
    """Dual velocity [0, w, 0, v + w x r] from rates and coupling position.

    ``r_frame_wrt_body`` is the position of the expression-frame origin
    relative to the moving body, in expression-frame coordinates.  For the
    self velocity of a body in its own frame this is zero; for the relative
    state (target w.r.t. camera, camera coordinates) it is minus the
    relative position.
    """
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    r = np.asarray(r_frame_wrt_body, dtype=float)
    return pure8(omega, v + np.cross(omega, r))


def twist_to_parts(w, r_frame_wrt_body):
    """Recover (omega, v) from a dual velocity given the same position."""
    w = np.asarray(w, dtype=float)
    if not np.all(is_pure(w)):
        raise ValueError("dual velocity must be a vector dual quaternion")
    omega = w[..., 1:4]
    r = np.asarray(r_frame_wrt_body, dtype=float)
    v = w[..., 5:8] - np.cross(omega, r)
    return omega, v


def sandwich(p, w) -> np.ndarray:
    """Conjugation product p w p*, with no validity checks.

    Polynomial in every input, so it is also the correct ambient-space
    extension when p is not exactly unit (finite differencing relies on
    this).  For p the pose of frame A with respect to frame B and w
    expressed in A coordinates, the result is w in B coordinates.
    """
    return dqmul(dqmul(p, w), dqconj(p))


def frame_transform(p, w) -> np.ndarray:
    """Re-express the vector dual quaternion w through the unit pose p.

    Validating wrapper around :func:`sandwich`: p must be unit and w must
    be pure.  Transforming by the identity pose returns w unchanged, and
    transforming by p then conj(p) composes to the identity.
    """
    p = np.asarray(p, dtype=float)
    w = np.asarray(w, dtype=float)
    if not np.all(is_unit_dualquat(p)):
        raise ValueError("frame_transform requires a unit dual pose")
    if not np.all(is_pure(w)):
        raise ValueError("frame_transform requires a vector dual quaternion")
    return sandwich(p, w)


def dqkin(pose, w_child) -> np.ndarray:
    """Pose rate 0.5 * pose * w for the dual velocity in child coordinates."""
    return 0.5 * dqmul(pose, w_child)


def dqkin_parent(pose, w_parent) -> np.ndarray:
    """Pose rate 0.5 * w * pose for the dual velocity in parent coordinates."""
    return 0.5 * dqmul(w_parent, pose)
