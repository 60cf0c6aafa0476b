import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_unit_quaternion(rng, n=None):
    q = rng.standard_normal(4 if n is None else (n, 4))
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def random_unit_dualquat(rng, r_scale=2.0, n=None):
    from dqnav import dualquat as dq

    q = random_unit_quaternion(rng, n)
    shape = (3,) if n is None else (n, 3)
    r = r_scale * rng.standard_normal(shape)
    return dq.dual_pose_from(q, r, frame="parent")
