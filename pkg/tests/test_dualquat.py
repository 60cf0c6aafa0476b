import numpy as np
import pytest

from dqnav import dualquat as dq
from dqnav import quat as qt

from conftest import random_unit_dualquat, random_unit_quaternion
from oracles import (
    fd_jacobian,
    left_matrix8,
    pose_to_homogeneous,
    quat_conj,
    quat_mul,
    right_matrix8,
    rotation_matrix,
)


class TestMultiplication:
    def test_identity_element(self, rng):
        b = rng.standard_normal(8)
        assert np.array_equal(dq.dqmul(dq.IDENTITY8, b), b)
        assert np.array_equal(dq.dqmul(b, dq.IDENTITY8), b)

    def test_unit_times_conjugate_is_identity(self, rng):
        for _ in range(50):
            a = random_unit_dualquat(rng)
            assert np.allclose(dq.dqmul(a, dq.dqconj(a)), dq.IDENTITY8, atol=1e-14)
            assert np.allclose(dq.dqmul(dq.dqconj(a), a), dq.IDENTITY8, atol=1e-14)

    def test_matches_matrix_oracle(self, rng):
        for _ in range(100):
            a, b = rng.standard_normal(8), rng.standard_normal(8)
            assert np.allclose(dq.dqmul(a, b), left_matrix8(a) @ b, atol=1e-13)

    def test_nilpotency_of_dual_unit(self, rng):
        # the product of two purely dual inputs is exactly zero
        a, b = rng.standard_normal(8), rng.standard_normal(8)
        a[:4] = 0.0
        b[:4] = 0.0
        assert np.array_equal(dq.dqmul(a, b), np.zeros(8))

    def test_unit_closure(self, rng):
        for _ in range(50):
            a = random_unit_dualquat(rng)
            b = random_unit_dualquat(rng)
            assert np.all(dq.is_unit_dualquat(dq.dqmul(a, b), tol=1e-12))


class TestElementwiseOps:
    def test_swap_involution(self, rng):
        a = rng.standard_normal(8)
        assert np.array_equal(dq.dqswap(dq.dqswap(a)), a)

    def test_swap_layout(self):
        a = np.arange(8.0)
        assert np.array_equal(dq.dqswap(a), [4, 5, 6, 7, 0, 1, 2, 3])

    def test_dot_of_unit_is_identity(self, rng):
        # the unit set is defined by conj(a) a = a . a = identity
        for _ in range(50):
            a = random_unit_dualquat(rng)
            assert np.allclose(dq.dqdot(a, a), dq.IDENTITY8, atol=1e-14)

    def test_norm2_sums_both_parts(self, rng):
        a = rng.standard_normal(8)
        assert dq.dqnorm2(a) == pytest.approx(np.sum(a * a))

    def test_norm2_of_pure_rotation_unit(self, rng):
        q = random_unit_quaternion(rng)
        u = dq.compose(q, qt.ZERO)
        assert dq.dqnorm2(u) == pytest.approx(1.0, abs=1e-14)

    def test_conjugate_antihomomorphism(self, rng):
        for _ in range(50):
            a, b = rng.standard_normal(8), rng.standard_normal(8)
            assert np.allclose(
                dq.dqconj(dq.dqmul(a, b)), dq.dqmul(dq.dqconj(b), dq.dqconj(a)), atol=1e-13
            )

    def test_conjugation_matrix(self, rng):
        a = rng.standard_normal(8)
        assert np.array_equal(dq.dqconj(a), dq.CONJ_MAT8 @ a)

    def test_cross_of_pure_vectors(self, rng):
        wr, wd, vr, vd = (rng.standard_normal(3) for _ in range(4))
        out = dq.dqcross(dq.pure8(wr, wd), dq.pure8(vr, vd))
        assert np.allclose(out[1:4], np.cross(wr, vr))
        assert np.allclose(out[5:8], np.cross(wd, vr) + np.cross(wr, vd))
        assert out[0] == 0.0 and out[4] == 0.0


class TestDualPose:
    def test_identity(self):
        p = dq.dual_pose_from(qt.IDENTITY, [0, 0, 0])
        assert np.array_equal(p, dq.IDENTITY8)

    def test_pure_translation(self):
        p = dq.dual_pose_from(qt.IDENTITY, [2, 0, 0])
        assert np.allclose(p, [1, 0, 0, 0, 0, 1, 0, 0])

    def test_parent_and_child_forms_agree(self, rng):
        for _ in range(50):
            q = random_unit_quaternion(rng)
            r_parent = rng.standard_normal(3)
            r_child = rotation_matrix(q).T @ r_parent
            p1 = dq.dual_pose_from(q, r_parent, frame="parent")
            p2 = dq.dual_pose_from(q, r_child, frame="child")
            assert np.allclose(p1, p2, atol=1e-14)

    def test_round_trip(self, rng):
        for _ in range(50):
            q = random_unit_quaternion(rng)
            r = 5.0 * rng.standard_normal(3)
            for frame in ("parent", "child"):
                q2, r2 = dq.pose_to_parts(dq.dual_pose_from(q, r, frame), frame)
                assert np.allclose(q2, q, atol=1e-12)
                assert np.allclose(r2, r, atol=1e-12)

    def test_translation_recovery_oracle(self, rng):
        p = random_unit_dualquat(rng)
        _, r = dq.pose_to_parts(p)
        r_hat = 2.0 * quat_mul(p[4:], quat_conj(p[:4]))
        assert abs(r_hat[0]) < 1e-12
        assert np.allclose(r, r_hat[1:])

    def test_rejects_non_unit_inputs(self):
        with pytest.raises(ValueError):
            dq.dual_pose_from([1.1, 0, 0, 0], [0, 0, 0])
        with pytest.raises(ValueError):
            dq.pose_to_parts(np.array([1.0, 0, 0, 0, 0.5, 0, 0, 0]))

    def test_chain_matches_homogeneous_oracle(self, rng):
        # pose of x w.r.t. z through y equals the composed transform
        for _ in range(20):
            p_xy = random_unit_dualquat(rng)
            p_yz = random_unit_dualquat(rng)
            p_xz = dq.dqmul(p_yz, p_xy)
            oracle = pose_to_homogeneous(p_yz) @ pose_to_homogeneous(p_xy)
            assert np.allclose(pose_to_homogeneous(p_xz), oracle, atol=1e-12)

    def test_inverse_chain_identity(self, rng):
        # q(x/y) = conj(q(y/z)) q(x/z)
        p_yz = random_unit_dualquat(rng)
        p_xz = random_unit_dualquat(rng)
        p_xy = dq.dqmul(dq.dqconj(p_yz), p_xz)
        assert np.allclose(dq.dqmul(p_yz, p_xy), p_xz, atol=1e-13)


class TestDualVelocity:
    def test_zero(self):
        w = dq.dual_velocity_from([0, 0, 0], [0, 0, 0], [5, 5, 5])
        assert np.array_equal(w, dq.ZERO8)

    def test_unit_cross_term(self):
        w = dq.dual_velocity_from([0, 0, 1], [0, 0, 0], [1, 0, 0])
        assert np.allclose(w, [0, 0, 0, 1, 0, 0, 1, 0])

    def test_round_trip(self, rng):
        for _ in range(50):
            omega, v, r = (rng.standard_normal(3) for _ in range(3))
            w = dq.dual_velocity_from(omega, v, r)
            omega2, v2 = dq.twist_to_parts(w, r)
            assert np.allclose(omega2, omega)
            assert np.allclose(v2, v, atol=1e-14)

    def test_twist_rejects_nonpure(self):
        with pytest.raises(ValueError):
            dq.twist_to_parts(np.ones(8), [0, 0, 0])


class TestFrameTransform:
    def test_identity_pose(self, rng):
        w = dq.pure8(rng.standard_normal(3), rng.standard_normal(3))
        assert np.allclose(dq.frame_transform(dq.IDENTITY8, w), w)

    def test_pure_rotation_rotates_both_parts(self, rng):
        q = random_unit_quaternion(rng)
        p = dq.dual_pose_from(q, [0, 0, 0])
        wr, wd = rng.standard_normal(3), rng.standard_normal(3)
        out = dq.frame_transform(p, dq.pure8(wr, wd))
        assert np.allclose(out[1:4], qt.rotate_vector(q, qt.pure(wr))[1:], atol=1e-13)
        assert np.allclose(out[5:8], qt.rotate_vector(q, qt.pure(wd))[1:], atol=1e-13)

    def test_chained_frames_match_direct(self, rng):
        for _ in range(20):
            p_xy = random_unit_dualquat(rng)
            p_yz = random_unit_dualquat(rng)
            w = dq.pure8(rng.standard_normal(3), rng.standard_normal(3))
            via_y = dq.frame_transform(p_yz, dq.frame_transform(p_xy, w))
            direct = dq.frame_transform(dq.dqmul(p_yz, p_xy), w)
            assert np.allclose(via_y, direct, atol=1e-12)

    def test_inverse_composes_to_identity(self, rng):
        p = random_unit_dualquat(rng)
        w = dq.pure8(rng.standard_normal(3), rng.standard_normal(3))
        back = dq.sandwich(dq.dqconj(p), dq.frame_transform(p, w))
        assert np.allclose(back, w, atol=1e-12)

    def test_decouples_twist_between_frames(self, rng):
        # the defining property of the coupled dual velocity: transforming
        # the parent-frame build gives the child-frame build with plainly
        # rotated rate vectors
        for _ in range(20):
            q = random_unit_quaternion(rng)
            r = rng.standard_normal(3)
            omega_p, v_p = rng.standard_normal(3), rng.standard_normal(3)
            pose = dq.dual_pose_from(q, r, frame="parent")
            w_parent = dq.dual_velocity_from(omega_p, v_p, -r)
            w_child = dq.frame_transform(dq.dqconj(pose), w_parent)
            rot = rotation_matrix(q).T
            assert np.allclose(w_child[1:4], rot @ omega_p, atol=1e-12)
            assert np.allclose(w_child[5:8], rot @ v_p, atol=1e-12)

    def test_rejects_invalid_inputs(self, rng):
        w = dq.pure8(rng.standard_normal(3), rng.standard_normal(3))
        with pytest.raises(ValueError):
            dq.frame_transform(2.0 * dq.IDENTITY8, w)
        with pytest.raises(ValueError):
            dq.frame_transform(dq.IDENTITY8, np.ones(8))


class TestMultiplicationMatrices8:
    def test_identity(self):
        assert np.array_equal(dq.left_mat8(dq.IDENTITY8), np.eye(8))
        assert np.array_equal(dq.right_mat8(dq.IDENTITY8), np.eye(8))

    def test_block_structure(self, rng):
        a = rng.standard_normal(8)
        for mat, mat4 in ((dq.left_mat8(a), qt.left_mat), (dq.right_mat8(a), qt.right_mat)):
            assert np.array_equal(mat[:4, 4:], np.zeros((4, 4)))
            assert np.array_equal(mat[:4, :4], mat[4:, 4:])
            assert np.array_equal(mat[:4, :4], mat4(a[:4]))
            assert np.array_equal(mat[4:, :4], mat4(a[4:]))

    def test_matches_oracle(self, rng):
        a = rng.standard_normal(8)
        assert np.array_equal(dq.left_mat8(a), left_matrix8(a))
        assert np.array_equal(dq.right_mat8(a), right_matrix8(a))

    def test_products_match_dqmul(self, rng):
        for _ in range(50):
            a, b = rng.standard_normal(8), rng.standard_normal(8)
            ab = dq.dqmul(a, b)
            assert np.allclose(dq.left_mat8(a) @ b, ab, atol=1e-13)
            assert np.allclose(dq.right_mat8(b) @ a, ab, atol=1e-13)

    def test_unit_determinant(self, rng):
        # triangular blocks give det = det(left_mat(real))^2 = 1
        for _ in range(50):
            a = random_unit_dualquat(rng)
            assert np.linalg.det(dq.left_mat8(a)) == pytest.approx(1.0, rel=1e-10)
            assert np.linalg.det(dq.right_mat8(a)) == pytest.approx(1.0, rel=1e-10)


class TestKinematics:
    def test_zero_velocity(self, rng):
        p = random_unit_dualquat(rng)
        assert np.array_equal(dq.dqkin(p, dq.ZERO8), dq.ZERO8)

    def test_pure_rotation_real_part_matches_qkin(self, rng):
        q = random_unit_quaternion(rng)
        p = dq.dual_pose_from(q, [0, 0, 0])
        omega = rng.standard_normal(3)
        out = dq.dqkin(p, dq.pure8(omega, np.zeros(3)))
        assert np.allclose(out[:4], qt.qkin(q, qt.pure(omega)), atol=1e-14)

    def test_parent_form_consistency(self, rng):
        for _ in range(20):
            p = random_unit_dualquat(rng)
            w_child = dq.pure8(rng.standard_normal(3), rng.standard_normal(3))
            w_parent = dq.frame_transform(p, w_child)
            assert np.allclose(dq.dqkin(p, w_child), dq.dqkin_parent(p, w_parent), atol=1e-12)

    def test_unit_norm_derivative_vanishes(self, rng):
        # d/dt of both unit conditions is zero along the kinematics
        p = random_unit_dualquat(rng)
        rate = dq.dqkin(p, dq.pure8(np.array([0.1, -0.2, 0.3]), np.array([1.0, 0.5, -0.5])))
        d_unit = 2.0 * np.dot(p[:4], rate[:4])
        d_ortho = np.dot(rate[:4], p[4:]) + np.dot(p[:4], rate[4:])
        assert abs(d_unit) < 1e-14
        assert abs(d_ortho) < 1e-14


class TestUnitProjection:
    def test_projection_restores_unit(self, rng):
        a = random_unit_dualquat(rng) + 1e-8 * rng.standard_normal(8)
        u = dq.unit_dualquat(a)
        assert np.all(dq.is_unit_dualquat(u, tol=1e-14))

    def test_rejects_far_inputs(self):
        with pytest.raises(ValueError):
            dq.unit_dualquat(1.5 * dq.IDENTITY8)

    def test_exact_input_unchanged(self):
        assert np.array_equal(dq.unit_dualquat(dq.IDENTITY8), dq.IDENTITY8)


class TestDerivativeIdentities:
    def test_product_jacobians(self, rng):
        for _ in range(10):
            a, b = rng.standard_normal(8), rng.standard_normal(8)
            fd_a = fd_jacobian(lambda x: dq.dqmul(x, b), a)
            fd_b = fd_jacobian(lambda x: dq.dqmul(a, x), b)
            assert np.max(np.abs(fd_a - dq.right_mat8(b))) < 1e-6
            assert np.max(np.abs(fd_b - dq.left_mat8(a))) < 1e-6

    def test_norm_gradient(self, rng):
        a = rng.standard_normal(8)
        fd = fd_jacobian(lambda x: np.atleast_1d(dq.dqnorm2(x)), a)
        assert np.max(np.abs(fd[0] - 2.0 * a)) < 1e-6

    def test_conjugate_sandwich_jacobian(self, rng):
        for _ in range(10):
            a, b = rng.standard_normal(8), rng.standard_normal(8)
            fd = fd_jacobian(lambda x: dq.dqmul(dq.dqmul(dq.dqconj(x), b), x), a)
            analytic = (
                dq.left_mat8(dq.dqmul(dq.dqconj(a), b))
                + dq.right_mat8(dq.dqmul(b, a)) @ dq.CONJ_MAT8
            )
            assert np.max(np.abs(fd - analytic)) < 1e-6


def test_homogeneous_oracle_matches_frame_transform(rng):
    # moving a point: p_parent = R p_child + t, via pose chaining
    for _ in range(20):
        p = random_unit_dualquat(rng)
        point = rng.standard_normal(3)
        point_pose = dq.dual_pose_from(qt.IDENTITY, point, frame="parent")
        moved = dq.dqmul(p, point_pose)
        _, r_moved = dq.pose_to_parts(moved)
        rot, trans = pose_to_homogeneous(p)[:3, :3], pose_to_homogeneous(p)[:3, 3]
        assert np.allclose(r_moved, rot @ point + trans, atol=1e-12)
