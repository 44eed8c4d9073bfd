import numpy as np
import pytest

from telefilter.controller import (
    ArmController,
    FaultReason,
    FaultStatus,
    StiffnessParams,
    WrenchPhase,
    WrenchSchedule,
    compliance_offset,
)
from telefilter.geometry import DeltaPose, pose_apply, pose_diff
from telefilter.kinematics import DHParams, JointLimits, forward_kinematics

DT = 0.01
HOME = np.array([0.0, 1.1, -1.8, 0.0, -1.0, 0.0])


def make_controller(**kwargs):
    defaults = dict(home=HOME)
    defaults.update(kwargs)
    return ArmController(**defaults)


class TestCompliance:
    def test_linear_spring_example(self):
        k = StiffnessParams(diagonal=[1000.0, 1000.0, 1000.0, 10.0, 10.0, 10.0])
        offset = compliance_offset(k, [10.0, 0, 0, 0, 0, 0])
        assert np.allclose(offset.translation, [0.01, 0, 0], atol=1e-15)
        assert np.allclose(offset.rotation, 0, atol=0)

    def test_zero_wrench(self):
        offset = compliance_offset(StiffnessParams.default(), np.zeros(6))
        assert offset.is_zero()

    def test_disabled_gives_zero(self):
        offset = compliance_offset(StiffnessParams.disabled(), [100.0, 0, 0, 5.0, 0, 0])
        assert offset.is_zero()

    def test_elementwise_oracle(self, rng):
        for _ in range(200):
            diag = rng.uniform(10.0, 5000.0, 6)
            wrench = rng.normal(0, 20.0, 6)
            offset = compliance_offset(StiffnessParams(diagonal=diag), wrench)
            expected = wrench / diag
            assert np.abs(offset.translation - expected[:3]).max() < 1e-12
            assert np.abs(offset.rotation - expected[3:]).max() < 1e-12

    def test_linearity(self, rng):
        k = StiffnessParams(diagonal=rng.uniform(100, 1000, 6))
        wrench = rng.normal(0, 5.0, 6)
        for c in (0.5, 2.0, 7.0):
            a = compliance_offset(k, c * wrench)
            b = compliance_offset(k, wrench)
            assert np.abs(a.translation - c * b.translation).max() < 1e-15
            assert np.abs(a.rotation - c * b.rotation).max() < 1e-15

    def test_rejects_nonpositive_diagonal(self):
        with pytest.raises(ValueError):
            StiffnessParams(diagonal=[0.0, 1, 1, 1, 1, 1])


class TestStep:
    def test_zero_substep_only_advances_time(self):
        ctl = make_controller()
        s0 = ctl.reset()
        s1 = ctl.step(s0, DeltaPose.zero(), DT)
        assert np.array_equal(s1.q, s0.q)
        assert s1.sim_time == pytest.approx(DT)
        assert not s1.fault.tripped

    def test_feasible_substep_advances_pose(self):
        ctl = make_controller()
        state = ctl.reset()
        substep = DeltaPose([0.001, 0, 0], [0, 0, 0])
        state = ctl.step(state, substep, DT)
        assert not state.fault.tripped
        wanted = pose_apply(forward_kinematics(ctl.dh, HOME), substep)
        residual = np.linalg.norm(state.executed_pose.position - wanted.position)
        assert residual < 1e-5

    def test_velocity_budget_violation_trips(self):
        ctl = make_controller()
        state = ctl.reset()
        # ~10x the per-step joint-velocity budget through a huge Cartesian step
        substep = DeltaPose([0.05, 0, 0], [0, 0, 0])
        tripped = ctl.step(state, substep, DT)
        assert tripped.fault.tripped
        assert tripped.fault.reason is FaultReason.JOINT_VELOCITY_EXCEEDED
        assert tripped.fault.joint is not None
        assert np.array_equal(tripped.q, state.q)

    def test_joint_limit_violation_trips(self):
        limits = JointLimits(
            q_min=HOME - 1e-4,
            q_max=HOME + 1e-4,
            v_max=np.full(6, 1e3),
        )
        ctl = make_controller(limits=limits)
        state = ctl.reset()
        tripped = ctl.step(state, DeltaPose([0.002, 0, 0], [0, 0, 0]), DT)
        assert tripped.fault.tripped
        assert tripped.fault.reason is FaultReason.JOINT_LIMIT_VIOLATED
        assert np.array_equal(tripped.q, state.q)

    def test_tracking_divergence_trips_after_streak(self):
        ctl = make_controller(tracking_bound=1e-12, tracking_streak=4)
        state = ctl.reset()
        substep = DeltaPose([0.0005, 0, 0], [0, 0, 0])
        for _ in range(3):
            state = ctl.step(state, substep, DT)
            assert not state.fault.tripped
        state = ctl.step(state, substep, DT)
        assert state.fault.tripped
        assert state.fault.reason is FaultReason.TRACKING_DIVERGED

    def test_tripped_state_is_frozen(self):
        ctl = make_controller()
        state = ctl.step(ctl.reset(), DeltaPose([0.05, 0, 0], [0, 0, 0]), DT)
        assert state.fault.tripped
        again = ctl.step(state, DeltaPose([0.001, 0, 0], [0, 0, 0]), DT)
        assert again is state

    def test_fault_monotonic_over_random_commands(self, rng):
        ctl = make_controller()
        state = ctl.step(ctl.reset(), DeltaPose([0.05, 0, 0], [0, 0, 0]), DT)
        q_at_fault = state.q
        for _ in range(50):
            state = ctl.step(state, DeltaPose(rng.normal(0, 0.01, 3), rng.normal(0, 0.01, 3)), DT)
            assert state.fault.tripped
            assert np.array_equal(state.q, q_at_fault)

    def test_compliance_shifts_executed_pose(self):
        ctl = make_controller()
        state = ctl.reset()
        wrench = np.array([20.0, 0, 0, 0, 0, 0])
        state = ctl.step(state, DeltaPose.zero(), DT, external_wrench=wrench)
        shift = state.executed_pose.position - state.nominal_pose.position
        assert np.allclose(shift, [20.0 / 2000.0, 0, 0], atol=1e-12)

    def test_determinism_bit_identical(self, rng):
        commands = [
            DeltaPose(rng.normal(0, 0.0005, 3), rng.normal(0, 0.002, 3)) for _ in range(100)
        ]
        traces = []
        for _ in range(2):
            ctl = make_controller()
            state = ctl.reset()
            qs = []
            for cmd in commands:
                state = ctl.step(state, cmd, DT)
                qs.append(state.q)
            traces.append(np.array(qs))
        assert np.array_equal(traces[0], traces[1])

    def test_rejects_nonpositive_dt(self):
        ctl = make_controller()
        with pytest.raises(ValueError):
            ctl.step(ctl.reset(), DeltaPose.zero(), 0.0)


class TestReset:
    def test_reset_after_fault(self):
        ctl = make_controller()
        state = ctl.step(ctl.reset(), DeltaPose([0.05, 0, 0], [0, 0, 0]), DT)
        assert state.fault.tripped
        fresh = ctl.reset()
        assert not fresh.fault.tripped
        assert np.array_equal(fresh.q, HOME)
        assert fresh.sim_time == 0.0

    def test_reset_idempotent(self):
        ctl = make_controller()
        a, b = ctl.reset(), ctl.reset()
        assert np.array_equal(a.q, b.q)
        assert np.array_equal(a.executed_pose.position, b.executed_pose.position)

    def test_executed_pose_is_fk_home(self):
        ctl = make_controller()
        state = ctl.reset()
        fk = forward_kinematics(ctl.dh, HOME)
        assert np.array_equal(state.executed_pose.position, fk.position)
        assert np.array_equal(state.executed_pose.orientation, fk.orientation)

    def test_rejects_home_outside_limits(self):
        ctl = make_controller()
        with pytest.raises(ValueError):
            ctl.reset(home=np.full(6, 10.0))


class TestFaultStatus:
    def test_reason_required_when_tripped(self):
        with pytest.raises(ValueError):
            FaultStatus(tripped=True)
        with pytest.raises(ValueError):
            FaultStatus(tripped=False, reason=FaultReason.TRACKING_DIVERGED)


class TestWrenchSchedule:
    def test_piecewise_lookup(self):
        schedule = WrenchSchedule.from_json(
            [
                {"start_s": 1.0, "end_s": 2.0, "wrench": [10, 0, 0, 0, 0, 0]},
                {"start_s": 3.0, "end_s": 4.0, "wrench": [0, 5, 0, 0, 0, 0]},
            ]
        )
        assert not schedule.wrench_at(0.5).any()
        assert schedule.wrench_at(1.5)[0] == 10.0
        assert schedule.wrench_at(2.0)[0] == 0.0  # half-open interval
        assert schedule.wrench_at(3.5)[1] == 5.0

    def test_phase_validation(self):
        with pytest.raises(ValueError):
            WrenchPhase(2.0, 1.0, np.zeros(6))
        with pytest.raises(ValueError):
            WrenchPhase(0.0, 1.0, np.zeros(5))
