"""Two-stage command filter: noise gate + speed cap, then uniform substep
interpolation at the higher control frequency.

Stage one replaces the magnitude of each delta component (translation and
rotation are gated independently) with a fixed per-command-period step: a
delta above the noise threshold is normalized to its direction and rescaled
to exactly the max step; a delta at or below the threshold is zeroed.  Stage
two splits the filtered delta into K = control_hz / command_hz equal substeps
emitted once per control period, so the downstream controller only ever sees
small, feasible increments while staying reactive to fresh commands.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import DeltaPose, as_vec3


@dataclass(frozen=True)
class FilterParams:
    """Filter configuration.

    Step and deadband units are displacement per command period (meters and
    radians per 1/command_hz), not per second: the cap is applied once per
    incoming command and then split across that period's substeps.

    Because an above-threshold command always moves exactly the max step,
    keep max_step <= 2 * deadband: otherwise a stationary target inside the
    band (deadband, max_step - deadband) makes the arm overshoot back and
    forth forever instead of settling.
    """

    command_hz: float = 20.0
    control_hz: float = 100.0
    max_position_step: float = 0.005
    max_rotation_step: float = 0.02
    position_deadband: float = 0.0025
    rotation_deadband: float = 0.01

    def __post_init__(self):
        for name in (
            "command_hz",
            "control_hz",
            "max_position_step",
            "max_rotation_step",
            "position_deadband",
            "rotation_deadband",
        ):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.control_hz <= self.command_hz:
            raise ValueError(
                f"control_hz ({self.control_hz}) must exceed command_hz ({self.command_hz})"
            )
        ratio = self.control_hz / self.command_hz
        k = round(ratio)
        if k < 2:
            raise ValueError(f"control_hz / command_hz must round to >= 2, got {ratio}")
        if abs(ratio - k) > 1e-6:
            warnings.warn(
                f"control_hz / command_hz = {ratio} is not an integer; "
                f"using {k} substeps per command",
                stacklevel=2,
            )

    @property
    def substeps_per_command(self) -> int:
        return round(self.control_hz / self.command_hz)

    @property
    def control_period(self) -> float:
        return 1.0 / self.control_hz

    @property
    def command_period(self) -> float:
        return 1.0 / self.command_hz


@dataclass(frozen=True, eq=False)
class FilteredDelta:
    """Stage-one output: each part is either zero or has magnitude exactly
    equal to the corresponding max step."""

    translation: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "translation", as_vec3(self.translation))
        object.__setattr__(self, "rotation", as_vec3(self.rotation))


@dataclass(frozen=True)
class SubstepPlan:
    """Stage-two output: the K uniform increments realizing one filtered
    command, emitted every `period` seconds."""

    substeps: tuple[DeltaPose, ...]
    period: float


def filter_delta(dp: DeltaPose, params: FilterParams) -> FilteredDelta:
    """Noise-gate and speed-cap a delta pose.

    Comparisons are strict: a magnitude exactly at the deadband is treated
    as noise and zeroed.
    """
    t_norm = dp.translation_norm
    if t_norm > params.position_deadband:
        translation = dp.translation / t_norm * params.max_position_step
    else:
        translation = np.zeros(3)
    r_norm = dp.rotation_norm
    if r_norm > params.rotation_deadband:
        rotation = dp.rotation / r_norm * params.max_rotation_step
    else:
        rotation = np.zeros(3)
    return FilteredDelta(translation, rotation)


def interpolate(fd, params: FilterParams) -> SubstepPlan:
    """Split a delta into K equal substeps at the control frequency.

    Accepts a FilteredDelta or (for the unfiltered replay path) a raw
    DeltaPose; either way every substep is exactly delta / K.  Splitting the
    rotation vector linearly is exact for filter output because it is a
    single-axis rotation.
    """
    k = params.substeps_per_command
    step = DeltaPose(fd.translation / k, fd.rotation / k)
    return SubstepPlan(substeps=(step,) * k, period=params.control_period)


def process_command(dp: DeltaPose, params: FilterParams) -> SubstepPlan:
    """Full two-stage pipeline: filter, then interpolate."""
    return interpolate(filter_delta(dp, params), params)
