import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_pose, random_rotvec
from telefilter.geometry import (
    DeltaPose,
    Pose,
    as_unit_quat,
    as_vec3,
    matrix_to_quat,
    pose_apply,
    pose_diff,
    quat_multiply,
    quat_to_matrix,
    quat_to_rotvec,
    rotvec_to_quat,
    wrap_rotvec,
)


# independent rotation-matrix oracle: Rodrigues formula + trace-based log map
def rodrigues(r):
    angle = np.linalg.norm(r)
    if angle < 1e-12:
        return np.eye(3)
    kx, ky, kz = r / angle
    skew = np.array([[0, -kz, ky], [kz, 0, -kx], [-ky, kx, 0]])
    return np.eye(3) + math.sin(angle) * skew + (1 - math.cos(angle)) * (skew @ skew)


def matrix_log(rot):
    c = np.clip((np.trace(rot) - 1.0) / 2.0, -1.0, 1.0)
    angle = math.acos(c)
    if angle < 1e-12:
        return np.zeros(3)
    return (angle / (2.0 * math.sin(angle))) * np.array(
        [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
    )


class TestValidation:
    def test_vec3_rejects_nan(self):
        with pytest.raises(ValueError):
            as_vec3([0.0, float("nan"), 0.0])

    def test_vec3_rejects_inf(self):
        with pytest.raises(ValueError):
            as_vec3([0.0, float("inf"), 0.0])

    def test_vec3_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            as_vec3([1.0, 2.0])

    def test_vec3_is_frozen(self):
        v = as_vec3([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            v[0] = 5.0

    def test_quat_rejects_denormalized(self):
        with pytest.raises(ValueError):
            as_unit_quat([0.9, 0.0, 0.0, 0.0])

    def test_quat_canonical_sign(self):
        q = as_unit_quat([-1.0, 0.0, 0.0, 0.0])
        assert q[0] == 1.0

    def test_quat_absorbs_float_drift(self):
        q = as_unit_quat([1.0 + 1e-9, 0.0, 0.0, 0.0])
        assert abs(np.linalg.norm(q) - 1.0) < 1e-12


class TestRotvecQuat:
    def test_zero_rotvec_is_identity(self):
        q = rotvec_to_quat(np.zeros(3))
        assert np.allclose(q, [1, 0, 0, 0], atol=0)

    def test_axis_angle_definition(self):
        q = rotvec_to_quat(np.array([math.pi / 2, 0, 0]))
        expected = [math.cos(math.pi / 4), math.sin(math.pi / 4), 0, 0]
        assert np.allclose(q, expected, atol=1e-15)

    def test_round_trip_1000(self, rng):
        worst = 0.0
        for _ in range(1000):
            r = random_rotvec(rng, max_angle=math.pi - 1e-6)
            err = np.abs(quat_to_rotvec(rotvec_to_quat(r)) - r).max()
            worst = max(worst, err)
        assert worst < 1e-10

    def test_small_angle_branch(self, rng):
        for scale in (1e-9, 1e-10, 1e-12, 0.0):
            r = np.array([0.6, -0.8, 0.0]) * scale
            q = rotvec_to_quat(r)
            assert abs(np.linalg.norm(q) - 1.0) < 1e-15
            assert np.abs(quat_to_rotvec(q) - r).max() < 1e-10

    def test_unit_norm_always(self, rng):
        for _ in range(1000):
            q = rotvec_to_quat(random_rotvec(rng))
            assert abs(np.linalg.norm(q) - 1.0) < 1e-12

    def test_matrix_round_trip(self, rng):
        for _ in range(200):
            q = rotvec_to_quat(random_rotvec(rng))
            assert np.abs(matrix_to_quat(quat_to_matrix(q)) - q).max() < 1e-12

    def test_quat_matches_rodrigues(self, rng):
        for _ in range(200):
            r = random_rotvec(rng)
            assert np.abs(quat_to_matrix(rotvec_to_quat(r)) - rodrigues(r)).max() < 1e-12


class TestWrap:
    def test_inside_ball_untouched(self):
        r = np.array([0.1, 0.2, -0.3])
        assert wrap_rotvec(r) is r

    def test_wraps_beyond_pi(self):
        axis = np.array([0.0, 0.0, 1.0])
        r = wrap_rotvec(axis * (math.pi + 0.5))
        assert np.allclose(r, axis * (math.pi + 0.5 - 2 * math.pi), atol=1e-12)

    def test_wrapped_rotation_equivalent(self, rng):
        for _ in range(100):
            r = random_rotvec(rng) * rng.uniform(1.0, 3.0)
            q1 = rotvec_to_quat(r)
            q2 = rotvec_to_quat(wrap_rotvec(r))
            assert np.abs(q1 - q2).max() < 1e-9


class TestPoseDiffApply:
    def test_identical_poses_zero_delta(self, rng):
        p = random_pose(rng)
        d = pose_diff(p, p)
        assert np.allclose(d.translation, 0, atol=0)
        assert np.allclose(d.rotation, 0, atol=1e-12)

    def test_pure_translation(self, rng):
        p = random_pose(rng)
        target = Pose(p.position + [0.1, 0, 0], p.orientation)
        d = pose_diff(target, p)
        assert np.allclose(d.translation, [0.1, 0, 0], atol=1e-15)
        assert np.allclose(d.rotation, 0, atol=1e-12)

    def test_zero_delta_apply(self, rng):
        p = random_pose(rng)
        q = pose_apply(p, DeltaPose.zero())
        assert np.allclose(q.position, p.position, atol=0)
        assert np.allclose(q.orientation, p.orientation, atol=0)

    def test_identity_base_translation(self):
        q = pose_apply(Pose.identity(), DeltaPose([0, 0, 0.05], [0, 0, 0]))
        assert np.allclose(q.position, [0, 0, 0.05], atol=0)

    def test_matches_matrix_oracle(self, rng):
        worst = 0.0
        for _ in range(300):
            cur, tgt = random_pose(rng), random_pose(rng)
            d = pose_diff(tgt, cur)
            # independent check: translation is the world-frame offset,
            # rotation is the log of the relative rotation matrix
            r_cur = quat_to_matrix(cur.orientation)
            r_tgt = quat_to_matrix(tgt.orientation)
            r_expected = matrix_log(r_cur.T @ r_tgt)
            worst = max(
                worst,
                np.abs(d.translation - (tgt.position - cur.position)).max(),
                np.abs(d.rotation - r_expected).max(),
            )
        assert worst < 1e-9

    def test_round_trip_1000(self, rng):
        worst = 0.0
        for _ in range(1000):
            base, target = random_pose(rng), random_pose(rng)
            delta = pose_diff(target, base)
            back = pose_apply(base, delta)
            worst = max(
                worst,
                np.abs(back.position - target.position).max(),
                np.abs(back.orientation - target.orientation).max(),
            )
        assert worst < 1e-9

    def test_delta_round_trip(self, rng):
        for _ in range(500):
            base = random_pose(rng)
            d = DeltaPose(rng.uniform(-1, 1, 3), random_rotvec(rng, max_angle=math.pi - 1e-5))
            d2 = pose_diff(pose_apply(base, d), base)
            assert np.abs(d2.translation - d.translation).max() < 1e-9
            assert np.abs(d2.rotation - d.rotation).max() < 1e-9


@given(
    st.tuples(*(st.floats(-1, 1) for _ in range(3))),
    st.tuples(*(st.floats(-1, 1) for _ in range(3))),
    st.tuples(*(st.floats(-0.9, 0.9) for _ in range(3))),
)
@settings(max_examples=200, deadline=None)
def test_apply_diff_property(pos, tvec, rvec):
    base = Pose(np.array(pos), rotvec_to_quat(np.array(rvec)))
    delta = DeltaPose(np.array(tvec), np.array(rvec))
    target = pose_apply(base, delta)
    recovered = pose_diff(target, base)
    assert np.abs(recovered.translation - delta.translation).max() < 1e-9
    assert np.abs(recovered.rotation - delta.rotation).max() < 1e-9


def test_quat_multiply_associative(rng):
    for _ in range(100):
        a, b, c = (rotvec_to_quat(random_rotvec(rng)) for _ in range(3))
        left = quat_multiply(quat_multiply(a, b), c)
        right = quat_multiply(a, quat_multiply(b, c))
        assert np.abs(left - right).max() < 1e-12
