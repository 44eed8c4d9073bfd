"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest tests/test_acceptance.py -v -s` to see them
live).  Tolerances are pinned here and nowhere else.
"""

import functools
import math
import time

import numpy as np
import pytest

from conftest import random_pose, random_rotvec
from reference_filter import reference_filter
from telefilter import corpus
from telefilter.config import GatewayConfig
from telefilter.filtering import FilterParams, filter_delta, interpolate, process_command
from telefilter.geometry import DeltaPose, pose_apply, quat_to_matrix
from telefilter.kinematics import (
    DHParams,
    forward_kinematics,
    geometric_jacobian,
    resolved_rate_step,
)
from telefilter.metrics import (
    MetricsReport,
    avg_jerk_norm,
    log_metrics,
    render_report,
    reports_to_csv,
    rms_error,
)
from telefilter.session import TeleopSession, run_replay
from telefilter.synth import SyntheticTraceSpec, dumps_command_log, generate_trace
from telefilter.protocol import CommandMessage
from telefilter.trajlog import LogHeader, TrajectoryLog


def acceptance(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                result = fn(*args, **kwargs)
            except BaseException:
                print(f"[ACCEPTANCE] FAIL  {name}")
                raise
            print(f"[ACCEPTANCE] PASS  {name}")
            return result

        return wrapper

    return decorate


@pytest.fixture(scope="module")
def corpus_runs():
    """All 20 corpus replays (10 filtered + 10 raw) with wall time."""
    config = GatewayConfig()
    runs = []
    started = time.perf_counter()
    for name, commands in corpus.iter_traces():
        filtered, _ = run_replay(config, commands, apply_filter=True)
        raw, _ = run_replay(config, commands, apply_filter=False)
        runs.append((name, filtered, raw))
    elapsed = time.perf_counter() - started
    return runs, elapsed


@acceptance("filter oracle equivalence (10^4 inputs, 1e-12, < 5 s)")
def test_filter_oracle_equivalence():
    params = FilterParams()
    rng = np.random.default_rng(7)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(10_000):
        scale = 10.0 ** rng.uniform(-5, -1)
        translation = rng.normal(0.0, scale, 3)
        rotation = rng.normal(0.0, scale, 3)
        plan = process_command(DeltaPose(translation, rotation), params)
        ref_steps, ref_period = reference_filter(
            translation.tolist(),
            rotation.tolist(),
            params.command_hz,
            params.control_hz,
            params.max_position_step,
            params.max_rotation_step,
            params.position_deadband,
            params.rotation_deadband,
        )
        assert len(plan.substeps) == len(ref_steps)
        assert plan.period == ref_period
        for got, (rt, rr) in zip(plan.substeps, ref_steps):
            worst = max(
                worst,
                float(np.abs(got.translation - rt).max()),
                float(np.abs(got.rotation - rr).max()),
            )
    elapsed = time.perf_counter() - started
    assert worst < 1e-12, f"worst deviation {worst}"
    assert elapsed < 5.0, f"took {elapsed:.2f} s"


@acceptance("substep exactness: substep = filtered/K, sum reconstructs to 1e-12")
def test_substep_exactness():
    rng = np.random.default_rng(8)
    for f, fprime in [(20.0, 100.0), (10.0, 20.0), (25.0, 100.0), (20.0, 1000.0), (5.0, 85.0)]:
        params = FilterParams(command_hz=f, control_hz=fprime)
        k = params.substeps_per_command
        assert k == round(fprime / f)
        for _ in range(200):
            dp = DeltaPose(rng.normal(0, 0.01, 3), rng.normal(0, 0.01, 3))
            fd = filter_delta(dp, params)
            plan = interpolate(fd, params)
            assert len(plan.substeps) == k
            expected_t = fd.translation / k
            expected_r = fd.rotation / k
            t_sum = np.zeros(3)
            r_sum = np.zeros(3)
            for step in plan.substeps:
                assert np.array_equal(step.translation, expected_t)  # exact division
                assert np.array_equal(step.rotation, expected_r)
                t_sum += step.translation
                r_sum += step.rotation
            assert np.abs(t_sum - fd.translation).max() < 1e-12
            assert np.abs(r_sum - fd.rotation).max() < 1e-12


@acceptance("fault dichotomy on the bundled corpus (filtered 0, raw >= 1, < 60 s)")
def test_fault_dichotomy(corpus_runs):
    runs, elapsed = corpus_runs
    assert len(runs) == 10
    for name, filtered, raw in runs:
        assert filtered.fault_count() == 0, f"{name}: filtered run tripped a fault"
        assert raw.fault_count() >= 1, f"{name}: raw run tripped no fault"
    assert elapsed < 60.0, f"corpus replays took {elapsed:.1f} s"


@acceptance("jerk reduction >= 2x on every corpus item")
def test_jerk_reduction(corpus_runs):
    runs, _ = corpus_runs
    for name, filtered, _raw in runs:
        report = log_metrics(filtered, name)
        assert report.executed_jerk <= 0.5 * report.commanded_jerk, (
            f"{name}: executed {report.executed_jerk} vs commanded {report.commanded_jerk}"
        )


@acceptance("kinematics: Jacobian FD 1e-6; resolved-rate residual < 1e-5 m; bounded at singularity")
def test_kinematics_checks():
    dh = DHParams.default()
    rng = np.random.default_rng(9)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        q = rng.uniform(-2.9, 2.9, 6)
        jac = geometric_jacobian(dh, q)
        fd = np.zeros((6, 6))
        for i in range(6):
            qp, qm = q.copy(), q.copy()
            qp[i] += h
            qm[i] -= h
            pp, pm = forward_kinematics(dh, qp), forward_kinematics(dh, qm)
            fd[:3, i] = (pp.position - pm.position) / (2 * h)
            rel = quat_to_matrix(pp.orientation) @ quat_to_matrix(pm.orientation).T
            c = np.clip((np.trace(rel) - 1) / 2, -1, 1)
            angle = math.acos(c)
            if angle >= 1e-12:
                axis = (
                    np.array([rel[2, 1] - rel[1, 2], rel[0, 2] - rel[2, 0], rel[1, 0] - rel[0, 1]])
                    * angle
                    / (2 * math.sin(angle))
                )
            else:
                axis = np.zeros(3)
            fd[3:, i] = axis / (2 * h)
        worst = max(worst, float(np.abs(jac - fd).max()))
    assert worst < 1e-6, f"worst Jacobian FD deviation {worst}"

    home = GatewayConfig().home
    worst_residual = 0.0
    for _ in range(50):
        q = home + rng.uniform(-0.3, 0.3, 6)
        dx = DeltaPose(rng.normal(0, 3e-4, 3), rng.normal(0, 1e-3, 3))
        result = resolved_rate_step(dh, q, dx, 1e-4)
        achieved = forward_kinematics(dh, q + result.dq)
        wanted = pose_apply(forward_kinematics(dh, q), dx)
        worst_residual = max(
            worst_residual, float(np.linalg.norm(achieved.position - wanted.position))
        )
    assert worst_residual < 1e-5, f"worst Cartesian residual {worst_residual}"

    stretched = np.zeros(6)
    assert np.linalg.svd(geometric_jacobian(dh, stretched), compute_uv=False)[-1] < 1e-8
    lam = 1e-3
    dx = DeltaPose([0, 0, 0.001], [0, 0, 0])
    result = resolved_rate_step(dh, stretched, dx, lam)
    assert np.all(np.isfinite(result.dq))
    jac = geometric_jacobian(dh, stretched)
    bound = np.linalg.norm(jac.T @ np.concatenate([dx.translation, dx.rotation])) / lam**2
    assert np.linalg.norm(result.dq) <= bound + 1e-12


@acceptance("metrics oracles: RMS/jerk brute force 1e-9; quadratic 0; cubic analytic")
def test_metrics_oracles():
    rng = np.random.default_rng(10)
    header = LogHeader(config_hash="acc", control_hz=100.0, command_hz=20.0)
    n = 100
    cmd = rng.normal(0, 0.1, (n, 3))
    exe = rng.normal(0, 0.1, (n, 3))
    quat = np.tile([1.0, 0, 0, 0], (n, 1))
    log = TrajectoryLog(header, np.arange(n) / 100.0, cmd, quat.copy(), exe, quat.copy(),
                        [None] * n, [None] * n)
    total = 0.0
    for a, b in zip(cmd.tolist(), exe.tolist()):
        total += sum((a[i] - b[i]) ** 2 for i in range(3))
    expected_rms = math.sqrt(total / n) * 1000.0
    assert abs(rms_error(log) - expected_rms) < 1e-9

    dt = 0.01
    positions = rng.normal(0, 0.05, (60, 3))
    total, count = 0.0, 0
    for k in range(60 - 3):
        d = [
            positions[k + 3][i] - 3 * positions[k + 2][i] + 3 * positions[k + 1][i] - positions[k][i]
            for i in range(3)
        ]
        total += math.sqrt(d[0] ** 2 + d[1] ** 2 + d[2] ** 2)
        count += 1
    assert abs(avg_jerk_norm(positions, dt) - total / count / dt**3) < 1e-9

    t = np.arange(80) * dt
    quadratic = np.stack([3 * t**2 + 2 * t + 1, -0.5 * t**2, t], axis=1)
    assert avg_jerk_norm(quadratic, dt) < 1e-9

    cubic = np.stack([t**3, np.zeros_like(t), np.zeros_like(t)], axis=1)
    assert abs(avg_jerk_norm(cubic, dt) - 6.0) < 1e-6


@acceptance("determinism: synth(42) -> replay -> report twice is byte-identical")
def test_end_to_end_determinism():
    spec = SyntheticTraceSpec(kind="jittery-pick-place", duration_s=20.0, seed=42)
    config = GatewayConfig()
    artifacts = []
    for _ in range(2):
        commands = generate_trace(spec)
        trace_bytes = dumps_command_log(commands, spec)
        log, _ = run_replay(config, commands, apply_filter=True)
        report = log_metrics(log, "determinism")
        artifacts.append((trace_bytes, log.dumps(), reports_to_csv([report])))
    assert artifacts[0][0] == artifacts[1][0], "trace bytes differ"
    assert artifacts[0][1] == artifacts[1][1], "trajectory log bytes differ"
    assert artifacts[0][2] == artifacts[1][2], "report bytes differ"


TABLE1_ROWS = [
    ("Bandu", 69.675, 28.87, 0.000611, 0.000147),
    ("Block destacking", 83.07, 28.21, 0.000617, 0.000125),
    ("Block stacking", 71.92, 21.5, 0.000525, 0.000124),
    ("Block stacking (irreg.)", 80.35, 25.63, 0.000632, 0.000124),
    ("Flipping", 61.02, 15.34, 0.000432, 0.000134),
    ("Handover", 41.27, 19.2, 0.000602, 0.000152),
    ("Peg-in-hole unplugging", 85.62, 38.382, 0.000635, 0.000134),
    ("Peg-in-hole", 49.67, 38.38, 0.000542, 0.000122),
]


@acceptance("report fidelity: published-table layout, exact headline row")
def test_report_fidelity():
    reports = [
        MetricsReport(task=task, time_s=t, rms_mm=rms, commanded_jerk=cj, executed_jerk=ej)
        for task, t, rms, cj, ej in TABLE1_ROWS
    ]
    table = render_report(reports)
    lines = table.splitlines()
    assert [c.strip() for c in lines[0].split("|")] == [
        "Task", "Time (s)", "RMS (mm)", "Comm. Jerk", "Exe. Jerk",
    ]
    rows = lines[2 : 2 + len(TABLE1_ROWS)]
    assert all("|" in row for row in rows)
    assert lines[2 + len(TABLE1_ROWS)] == ""  # table ends before the footnote
    bandu = [c.strip() for c in rows[0].split("|")]
    assert bandu == ["Bandu", "69.675", "28.87", "0.000611", "0.000147"]
    expected_cells = {
        1: ["83.07", "28.21", "0.000617", "0.000125"],
        6: ["85.62", "38.382", "0.000635", "0.000134"],
        7: ["49.67", "38.38", "0.000542", "0.000122"],
    }
    for idx, expected in expected_cells.items():
        assert [c.strip() for c in rows[idx].split("|")][1:] == expected


@acceptance("gateway timing: 1000 +/- 1 samples in 10 s; <= K substeps per command at 10x flood")
def test_gateway_timing_and_latest_wins():
    config = GatewayConfig()
    commands = generate_trace(SyntheticTraceSpec(kind="line", duration_s=8.0, seed=4))
    log, _ = run_replay(config, commands, duration_s=10.0)
    assert abs(len(log) - 1000) <= 1, f"{len(log)} samples"

    # 10x command-rate flood: one command per control tick
    k = config.filter.substeps_per_command
    session = TeleopSession(config)
    rng = np.random.default_rng(11)
    flood_ticks = 400
    for i in range(flood_ticks):
        session.ingest_command(
            CommandMessage(
                seq=i,
                translation=rng.normal(0.0, 0.01, 3),
                rotation=rng.normal(0.0, 0.02, 3),
                client_time_ms=i * 5,
            )
        )
        assert session.queue_depth() <= 1
        session.control_tick()
    for _ in range(k):
        session.control_tick()
    log = session.finish()
    per_seq = {}
    for seq in log.seq_active:
        if seq is not None:
            per_seq[seq] = per_seq.get(seq, 0) + 1
    assert per_seq, "no plans installed during flood"
    assert max(per_seq.values()) <= k, f"a command executed {max(per_seq.values())} substeps"
    assert not session.state.fault.tripped
