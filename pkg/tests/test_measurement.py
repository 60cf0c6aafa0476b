import numpy as np
import pytest

from dqnav import dualquat as dq
from dqnav import dynamics as dyn
from dqnav.measurement import MarkerConfig, PoseMeasurement, measure, measure_noisy

from conftest import random_unit_dualquat
from oracles import pose_to_homogeneous, rotation_angle


def random_state(rng):
    pose = random_unit_dualquat(rng)
    omega, v = rng.standard_normal(3), rng.standard_normal(3)
    _, r = dq.pose_to_parts(pose)
    return dyn.RelativeState(pose, dq.dual_velocity_from(omega, v, -r))


class TestMeasure:
    def test_marker_at_target_origin(self, rng):
        state = random_state(rng)
        y = measure(state, MarkerConfig.at_origin())
        assert np.array_equal(y.value, state.pose)

    def test_identity_relative_pose(self, rng):
        marker = MarkerConfig(random_unit_dualquat(rng), marker_id=3)
        state = dyn.RelativeState.identity()
        y = measure(state, marker)
        assert np.array_equal(y.value, marker.pose_in_target)
        assert marker.marker_id == 3

    def test_matches_homogeneous_composition(self, rng):
        for _ in range(20):
            state = random_state(rng)
            marker = MarkerConfig(random_unit_dualquat(rng))
            y = measure(state, marker, timestamp=1.5)
            oracle = pose_to_homogeneous(state.pose) @ pose_to_homogeneous(
                marker.pose_in_target
            )
            assert np.allclose(pose_to_homogeneous(y.value), oracle, atol=1e-12)
            assert y.timestamp == 1.5

    def test_output_is_unit(self, rng):
        state = random_state(rng)
        marker = MarkerConfig(random_unit_dualquat(rng))
        assert np.all(dq.is_unit_dualquat(measure(state, marker).value, tol=1e-12))

    def test_chaining_through_intermediate_frame(self, rng):
        # splitting the relative pose across an intermediate frame cannot
        # change the measurement
        state = random_state(rng)
        marker = MarkerConfig(random_unit_dualquat(rng))
        split = random_unit_dualquat(rng)
        left = dq.dqmul(state.pose, dq.dqconj(split))
        direct = measure(state, marker).value
        chained = dq.dqmul(dq.dqmul(left, split), marker.pose_in_target)
        assert np.allclose(chained, direct, atol=1e-13)

    def test_marker_validates_pose(self):
        with pytest.raises(ValueError):
            MarkerConfig(1.2 * dq.IDENTITY8)

    def test_measurement_validates_pose(self):
        with pytest.raises(ValueError):
            PoseMeasurement(np.ones(8))


class TestMeasureNoisy:
    def test_zero_sigma_is_exact(self, rng):
        state = random_state(rng)
        marker = MarkerConfig(random_unit_dualquat(rng))
        exact = measure(state, marker).value
        noisy = measure_noisy(state, marker, 0.0, 0.0, rng=123).value
        assert np.array_equal(noisy, exact)

    def test_fixed_seed_reproduces_bits(self, rng):
        state = random_state(rng)
        marker = MarkerConfig(random_unit_dualquat(rng))
        a = measure_noisy(state, marker, 0.01, 0.005, rng=42).value
        b = measure_noisy(state, marker, 0.01, 0.005, rng=42).value
        assert a.tobytes() == b.tobytes()

    def test_different_seeds_differ(self, rng):
        state = random_state(rng)
        marker = MarkerConfig(random_unit_dualquat(rng))
        a = measure_noisy(state, marker, 0.01, 0.005, rng=1).value
        b = measure_noisy(state, marker, 0.01, 0.005, rng=2).value
        assert not np.array_equal(a, b)

    def test_rejects_negative_sigma(self, rng):
        state = random_state(rng)
        with pytest.raises(ValueError):
            measure_noisy(state, MarkerConfig.at_origin(), -0.1, 0.0, rng=0)

    def test_output_is_unit(self, rng):
        state = random_state(rng)
        marker = MarkerConfig(random_unit_dualquat(rng))
        y = measure_noisy(state, marker, 0.05, 0.02, rng=7)
        assert np.all(dq.is_unit_dualquat(y.value, tol=1e-12))

    def test_rotation_noise_statistics(self, rng):
        # RMS of the rotation error angle approximates sigma_rot
        sigma_rot = 0.02
        state = dyn.RelativeState.identity()
        marker = MarkerConfig.at_origin()
        gen = np.random.default_rng(2024)
        n = 10_000
        angles = np.empty(n)
        offsets = np.empty((n, 3))
        for i in range(n):
            y = measure_noisy(state, marker, sigma_rot, 0.01, rng=gen)
            err = dq.dqmul(dq.dqconj(measure(state, marker).value), y.value)
            angles[i] = rotation_angle(err[:4])
            _, offsets[i] = dq.pose_to_parts(err, frame="child")
        rms = np.sqrt(np.mean(angles**2))
        assert rms == pytest.approx(sigma_rot, rel=0.05)
        assert np.sqrt(np.mean(offsets**2)) == pytest.approx(0.01, rel=0.05)
