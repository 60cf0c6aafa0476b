"""Output-sensitivity analysis of the marker measurement along the motion.

The measurement depends on the state only through the pose block, so its
Jacobian has a structurally zero right half.  Stacking the Jacobians of
the measurement and of its first directional derivative along the motion
field gives a 16x16 matrix with closed-form blocks:

    [ R8(marker)                      0            ]
    [ 0.5 L8(w) R8(marker)   0.5 R8(pose * marker) ]

where L8/R8 are the dual quaternion multiplication matrices, ``pose`` the
relative pose, ``w`` the relative dual velocity and ``marker`` the marker
mounting pose.  Full numeric rank of this matrix certifies local weak
observability of the 16-component state at the evaluation point.

Derivatives here are ambient: the state is treated as a free point of R^16
and finite-difference perturbations are taken coordinate-wise without
re-projecting onto the unit-pose manifold.  Every map involved is
polynomial, so the off-manifold evaluations are well defined; projecting
would instead measure a different (tangent) Jacobian and collapse the
radial directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dualquat as dq
from . import quat as qt
from .dynamics import POSE, VELOCITY, DivergenceError, rk4_step_vec
from .measurement import MarkerConfig


def _marker_pose(marker) -> np.ndarray:
    if isinstance(marker, MarkerConfig):
        return marker.pose_in_target
    return np.asarray(marker, dtype=float)


def _state_vector(x) -> np.ndarray:
    if hasattr(x, "as_vector"):
        return x.as_vector()
    return np.asarray(x, dtype=float)


def lie0(x, marker) -> np.ndarray:
    """Measurement value pose * marker; identical to measurement.measure.

    Accepts raw (..., 16) arrays and places no unit requirement on them,
    so it can be evaluated at finite-difference perturbations.
    """
    x = _state_vector(x)
    return dq.dqmul(x[..., POSE], _marker_pose(marker))


def grad_lie0(marker) -> np.ndarray:
    """Jacobian of lie0: [R8(marker), 0]; state independent."""
    block = dq.right_mat8(_marker_pose(marker))
    return np.concatenate([block, np.zeros_like(block)], axis=-1)


def lie1(x, marker) -> np.ndarray:
    """Directional derivative of the measurement along the motion field.

    Equals 0.5 * w * pose * marker, and also grad_lie0 @ f(x) for any
    motion field f sharing the kinematics rows, because the velocity
    block of grad_lie0 is zero.
    """
    x = _state_vector(x)
    return 0.5 * dq.dqmul(dq.dqmul(x[..., VELOCITY], x[..., POSE]), _marker_pose(marker))


def grad_lie1(x, marker) -> np.ndarray:
    """Jacobian of lie1: [0.5 L8(w) R8(marker), 0.5 R8(pose * marker)]."""
    x = _state_vector(x)
    m = _marker_pose(marker)
    left = 0.5 * dq.left_mat8(x[..., VELOCITY]) @ dq.right_mat8(m)
    right = 0.5 * dq.right_mat8(dq.dqmul(x[..., POSE], m))
    return np.concatenate([left, right], axis=-1)


@dataclass(frozen=True)
class ObservabilityMatrix:
    """Stacked measurement Jacobians with tagged 8x8 blocks."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape[-1] != 16 or entries.shape[-2] < 16:
            raise ValueError("observability matrix must be at least 16x16")
        if np.any(entries[..., 0:8, 8:16] != 0.0):
            raise ValueError("the measurement Jacobian velocity block must be zero")
        object.__setattr__(self, "entries", entries)

    @property
    def pose_block(self) -> np.ndarray:
        return self.entries[..., 0:8, 0:8]

    @property
    def zero_block(self) -> np.ndarray:
        return self.entries[..., 0:8, 8:16]

    @property
    def coupling_block(self) -> np.ndarray:
        return self.entries[..., 8:16, 0:8]

    @property
    def velocity_block(self) -> np.ndarray:
        return self.entries[..., 8:16, 8:16]


def observability_entries(x, marker) -> np.ndarray:
    """Raw stacked [grad_lie0; grad_lie1], batched over leading axes."""
    g0 = grad_lie0(marker)
    g1 = grad_lie1(x, marker)
    g0 = np.broadcast_to(g0, g1.shape)
    return np.concatenate([g0, g1], axis=-2)


def build_observability_matrix(x, marker, extra_gradients=()) -> ObservabilityMatrix:
    """Closed-form observability matrix at one state.

    ``extra_gradients`` is an extension hook: callables mapping the state
    vector to additional (n, 16) Jacobian rows (higher-order derivatives
    for future measurement models) appended below the built-in two.
    """
    xv = _state_vector(x)
    rows = [observability_entries(xv, marker)]
    for g in extra_gradients:
        rows.append(np.asarray(g(xv), dtype=float))
    return ObservabilityMatrix(np.concatenate(rows, axis=-2))


def central_difference_jacobian(f, x, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of f at x, columns over x's entries."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * step))
    return np.stack(cols, axis=-1)


def kinematics_rate(t: float, x) -> np.ndarray:
    """Motion field with the pose kinematics only; velocity rows are zero."""
    x = np.asarray(x, dtype=float)
    pose_rate = dq.dqkin_parent(x[..., POSE], x[..., VELOCITY])
    return np.concatenate([pose_rate, np.zeros_like(pose_rate)], axis=-1)


def build_observability_matrix_numeric(x, marker, rate_fn, step: float = 1e-6) -> ObservabilityMatrix:
    """Observability matrix assembled from finite differences.

    The first derivative is evaluated as grad_lie0 @ rate_fn(0, x), so the
    result depends on the supplied motion field only through its
    kinematics rows; any two fields sharing them produce bitwise equal
    matrices.  Cross-checks the closed forms.
    """
    xv = _state_vector(x)
    g0_fd = central_difference_jacobian(lambda y: lie0(y, marker), xv, step)
    grad0 = grad_lie0(marker)
    g1_fd = central_difference_jacobian(lambda y: grad0 @ rate_fn(0.0, y), xv, step)
    return ObservabilityMatrix(np.concatenate([g0_fd, g1_fd], axis=-2))


@dataclass(frozen=True)
class ObservabilityReport:
    """Singular value summary and numeric rank verdict."""

    singular_values: np.ndarray
    numeric_rank: int
    rank_tolerance: float
    condition_number: float
    full_rank: bool


def rank_report(obs, tol: float = 1e-10) -> ObservabilityReport:
    """SVD-based numeric rank: count sigma_i > tol * sigma_1.

    The default tolerance sits far below the provable spectrum of unit
    inputs yet well above finite-difference noise.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError("rank tolerance must lie in (0, 1)")
    entries = obs.entries if isinstance(obs, ObservabilityMatrix) else np.asarray(obs, dtype=float)
    if not np.all(np.isfinite(entries)):
        raise ValueError("observability matrix has non-finite entries")
    s = np.linalg.svd(entries, compute_uv=False)
    rank = int(np.sum(s > tol * s[..., 0])) if s[..., 0] > 0.0 else 0
    cond = float(s[..., 0] / s[..., -1]) if s[..., -1] > 0.0 else np.inf
    return ObservabilityReport(
        singular_values=s,
        numeric_rank=rank,
        rank_tolerance=float(tol),
        condition_number=cond,
        full_rank=rank == entries.shape[-1],
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def lemma_suite(seed: int = 0, samples: int = 1000) -> list[CheckResult]:
    """Randomized checks of the matrix facts the analysis rests on.

    Covers: eigenvalues of triangular matrices, full rank of proper
    triangular and block triangular matrices, the unit determinant of the
    4x4 multiplication matrices, and the strictly positive smallest
    singular value of the 8x8 ones.
    """
    rng = np.random.default_rng(seed)
    results = []

    n = 6
    tri = np.triu(rng.standard_normal((samples, n, n)))
    eigs = np.sort(np.linalg.eigvals(tri).real, axis=-1)
    diags = np.sort(np.diagonal(tri, axis1=-2, axis2=-1), axis=-1)
    err = float(np.max(np.abs(eigs - diags)))
    results.append(CheckResult(
        "triangular_eigenvalues_are_diagonal", err <= 1e-8,
        f"max |eig - diag| = {err:.2e} over {samples} upper-triangular matrices"))

    diag = np.sign(rng.standard_normal((samples, n))) * rng.uniform(0.1, 2.0, (samples, n))
    proper = tri.copy()
    proper[..., np.arange(n), np.arange(n)] = diag
    ranks = np.linalg.matrix_rank(proper)
    results.append(CheckResult(
        "proper_triangular_full_rank", bool(np.all(ranks == n)),
        f"min rank {int(np.min(ranks))} of {n} over {samples} matrices"))

    blocks = rng.standard_normal((samples, 2, 4, 4)) + 2.0 * np.eye(4)
    bt = np.zeros((samples, 8, 8))
    bt[:, :4, :4] = blocks[:, 0]
    bt[:, 4:, 4:] = blocks[:, 1]
    bt[:, 4:, :4] = rng.standard_normal((samples, 4, 4))
    block_ok = np.linalg.matrix_rank(bt) == 8
    deficient = bt.copy()
    deficient[:, 4:, 4:] = 0.0
    deficient_ok = np.linalg.matrix_rank(deficient) < 8
    results.append(CheckResult(
        "block_triangular_full_rank", bool(np.all(block_ok) and np.all(deficient_ok)),
        f"{int(np.sum(block_ok))}/{samples} full rank with invertible diagonal blocks, "
        f"{int(np.sum(deficient_ok))}/{samples} deficient with a zero block"))

    q = rng.standard_normal((samples, 4))
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    det_l = np.linalg.det(qt.left_mat(q))
    det_r = np.linalg.det(qt.right_mat(q))
    det_err = float(max(np.max(np.abs(det_l - 1.0)), np.max(np.abs(det_r - 1.0)),
                        np.max(np.abs(det_l - det_r))))
    results.append(CheckResult(
        "unit_quaternion_determinants", det_err <= 1e-12,
        f"max |det - 1| = {det_err:.2e} over {samples} unit quaternions"))

    qd = rng.standard_normal((samples, 8))
    qd[..., :4] /= np.linalg.norm(qd[..., :4], axis=-1, keepdims=True)
    defect = np.sum(qd[..., :4] * qd[..., 4:], axis=-1, keepdims=True)
    qd[..., 4:] -= defect * qd[..., :4]
    s_l = np.linalg.svd(dq.left_mat8(qd), compute_uv=False)[..., -1]
    s_r = np.linalg.svd(dq.right_mat8(qd), compute_uv=False)[..., -1]
    smin = float(min(np.min(s_l), np.min(s_r)))
    results.append(CheckResult(
        "unit_dualquat_sigma_min_positive", smin > 0.0,
        f"min sigma_min = {smin:.3e} over {samples} unit dual quaternions"))

    return results


@dataclass(frozen=True)
class EmpiricalGramian:
    """Finite-horizon output-energy Gramian from perturbed trajectories."""

    entries: np.ndarray
    horizon: float
    dt: float
    delta: float
    eigenvalues: np.ndarray = field(init=False)

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        scale = max(1.0, float(np.max(np.abs(entries))))
        if np.max(np.abs(entries - entries.T)) > 1e-10 * scale:
            raise ValueError("gramian must be symmetric")
        eigs = np.linalg.eigvalsh(entries)
        if eigs[0] < -1e-10 * max(1.0, eigs[-1]):
            raise ValueError("gramian must be positive semidefinite")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "eigenvalues", eigs)

    def numeric_rank(self, tol: float = 1e-10) -> int:
        eigs = self.eigenvalues
        if eigs[-1] <= 0.0:
            return 0
        return int(np.sum(eigs > tol * eigs[-1]))


def empirical_gramian(x0, marker, horizon: float, dt: float, delta: float,
                      rate_fn) -> EmpiricalGramian:
    """Empirical observability Gramian over a finite horizon.

    The initial state is perturbed by plus/minus delta along each of the
    16 ambient coordinates, every perturbed copy is propagated under ``rate_fn``
    (without re-projection, to keep the ambient information), and the
    centered measurement differences Y(t) accumulate G = sum_t Y'Y dt over
    the left-endpoint grid of [0, horizon).
    """
    if not horizon > 0.0:
        raise ValueError("horizon must be positive")
    if not delta > 0.0:
        raise ValueError("perturbation delta must be positive")
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    n_steps = max(1, int(round(horizon / dt)))
    x0 = _state_vector(x0)
    basis = delta * np.eye(16)
    states = np.concatenate([x0 + basis, x0 - basis], axis=0)
    marker_pose = _marker_pose(marker)

    gram = np.zeros((16, 16))
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps):
            y = lie0(states, marker_pose)
            rows = (y[:16] - y[16:]) / (2.0 * delta)
            gram += (rows @ rows.T) * dt
            states = rk4_step_vec(states, k * dt, rate_fn, dt)
            if not np.all(np.isfinite(states)):
                raise DivergenceError(step=k + 1, last_time=k * dt)
    gram = 0.5 * (gram + gram.T)
    return EmpiricalGramian(gram, horizon=float(n_steps * dt), dt=float(dt), delta=float(delta))
