"""Self-check suite behind the CLI `check` verb.

Runs the lemma checks plus randomized validations of the algebraic
identities the rest of the package leans on: derivative identities against
finite differences, nilpotency of the dual unit, closure of unit dual
quaternions under multiplication, and the multiplication-matrix
factorizations.
"""

from __future__ import annotations

import numpy as np

from . import dualquat as dq
from . import quat as qt
from .observability import CheckResult, central_difference_jacobian, lemma_suite


def _fd_identity_checks(rng: np.random.Generator, samples: int) -> list[CheckResult]:
    results = []
    step, tol = 1e-6, 1e-6

    worst = {"d(ab)/da = R(b)": 0.0, "d(ab)/db = L(a)": 0.0,
             "d|q|^2/dq = 2q": 0.0, "d(a* b a)/da": 0.0}
    for _ in range(samples):
        a = rng.standard_normal(4)
        b = rng.standard_normal(4)
        fd = central_difference_jacobian(lambda x: qt.qmul(x, b), a, step)
        worst["d(ab)/da = R(b)"] = max(worst["d(ab)/da = R(b)"],
                                       float(np.max(np.abs(fd - qt.right_mat(b)))))
        fd = central_difference_jacobian(lambda x: qt.qmul(a, x), b, step)
        worst["d(ab)/db = L(a)"] = max(worst["d(ab)/db = L(a)"],
                                       float(np.max(np.abs(fd - qt.left_mat(a)))))
        fd = central_difference_jacobian(lambda x: np.atleast_1d(qt.qnorm2(x)), a, step)
        worst["d|q|^2/dq = 2q"] = max(worst["d|q|^2/dq = 2q"],
                                      float(np.max(np.abs(fd[0] - 2.0 * a))))
        fd = central_difference_jacobian(
            lambda x: qt.qmul(qt.qmul(qt.qconj(x), b), x), a, step)
        analytic = qt.left_mat(qt.qmul(qt.qconj(a), b)) + qt.right_mat(qt.qmul(b, a)) @ qt.CONJ_MAT
        worst["d(a* b a)/da"] = max(worst["d(a* b a)/da"],
                                    float(np.max(np.abs(fd - analytic))))
    for name, err in worst.items():
        results.append(CheckResult(f"quat_derivative {name}", err <= tol,
                                   f"max FD error {err:.2e} over {samples} samples"))

    worst8 = {"d(ab)/da = R8(b)": 0.0, "d(ab)/db = L8(a)": 0.0,
              "d|q|^2/dq = 2q": 0.0, "d(a* b a)/da": 0.0}
    for _ in range(samples):
        a = rng.standard_normal(8)
        b = rng.standard_normal(8)
        fd = central_difference_jacobian(lambda x: dq.dqmul(x, b), a, step)
        worst8["d(ab)/da = R8(b)"] = max(worst8["d(ab)/da = R8(b)"],
                                         float(np.max(np.abs(fd - dq.right_mat8(b)))))
        fd = central_difference_jacobian(lambda x: dq.dqmul(a, x), b, step)
        worst8["d(ab)/db = L8(a)"] = max(worst8["d(ab)/db = L8(a)"],
                                         float(np.max(np.abs(fd - dq.left_mat8(a)))))
        fd = central_difference_jacobian(lambda x: np.atleast_1d(dq.dqnorm2(x)), a, step)
        worst8["d|q|^2/dq = 2q"] = max(worst8["d|q|^2/dq = 2q"],
                                       float(np.max(np.abs(fd[0] - 2.0 * a))))
        fd = central_difference_jacobian(
            lambda x: dq.dqmul(dq.dqmul(dq.dqconj(x), b), x), a, step)
        analytic = (dq.left_mat8(dq.dqmul(dq.dqconj(a), b))
                    + dq.right_mat8(dq.dqmul(b, a)) @ dq.CONJ_MAT8)
        worst8["d(a* b a)/da"] = max(worst8["d(a* b a)/da"],
                                     float(np.max(np.abs(fd - analytic))))
    for name, err in worst8.items():
        results.append(CheckResult(f"dualquat_derivative {name}", err <= tol,
                                   f"max FD error {err:.2e} over {samples} samples"))
    return results


def _algebra_checks(rng: np.random.Generator, samples: int) -> list[CheckResult]:
    results = []

    a = rng.standard_normal((samples, 8))
    b = rng.standard_normal((samples, 8))
    # eps^2 = 0: two purely dual inputs multiply to exactly zero.
    a_dual_only = a.copy()
    a_dual_only[:, :4] = 0.0
    b_dual_only = b.copy()
    b_dual_only[:, :4] = 0.0
    nilpotent = float(np.max(np.abs(dq.dqmul(a_dual_only, b_dual_only))))
    results.append(CheckResult("dual_unit_nilpotency", nilpotent == 0.0,
                               f"max |eps*eps product| = {nilpotent:.1e}"))

    err = float(np.max(np.abs(
        np.einsum("nij,nj->ni", dq.left_mat8(a), b) - dq.dqmul(a, b))))
    err = max(err, float(np.max(np.abs(
        np.einsum("nij,nj->ni", dq.right_mat8(b), a) - dq.dqmul(a, b)))))
    results.append(CheckResult("multiplication_matrix_factorization", err <= 1e-12,
                               f"max |L8(a)b - ab|, |R8(b)a - ab| = {err:.2e}"))

    qs = rng.standard_normal((samples, 8))
    qs[:, :4] /= np.linalg.norm(qs[:, :4], axis=-1, keepdims=True)
    qs[:, 4:] -= np.sum(qs[:, :4] * qs[:, 4:], axis=-1, keepdims=True) * qs[:, :4]
    u = qs
    v = np.roll(u, 1, axis=0)
    closure = np.max(np.abs(np.stack([
        np.sum(dq.real(dq.dqmul(u, v)) ** 2, axis=-1) - 1.0,
        np.sum(dq.real(dq.dqmul(u, v)) * dq.dual(dq.dqmul(u, v)), axis=-1),
    ])))
    results.append(CheckResult("unit_dualquat_closure", closure <= 1e-12,
                               f"max unit defect of products = {closure:.2e}"))

    conj_err = float(np.max(np.abs(
        dq.dqconj(dq.dqmul(a, b)) - dq.dqmul(dq.dqconj(b), dq.dqconj(a)))))
    results.append(CheckResult("conjugate_antihomomorphism", conj_err <= 1e-12,
                               f"max |(ab)* - b*a*| = {conj_err:.2e}"))
    return results


def run_checks(seed: int = 0, samples: int = 200) -> list[CheckResult]:
    """Lemma suite plus algebra diagnostics; deterministic for a seed."""
    rng = np.random.default_rng(seed)
    results = list(lemma_suite(seed=seed, samples=max(samples, 100)))
    results.extend(_fd_identity_checks(rng, min(samples, 50)))
    results.extend(_algebra_checks(rng, max(samples, 100)))
    return results
