import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for reference_filter / oracle helpers

from telefilter.config import GatewayConfig


@pytest.fixture
def config():
    return GatewayConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240731)


def random_rotvec(rng, max_angle=np.pi - 1e-3):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return axis * rng.uniform(0.0, max_angle)


def random_pose(rng):
    from telefilter.geometry import Pose, rotvec_to_quat

    return Pose(rng.uniform(-1.0, 1.0, 3), rotvec_to_quat(random_rotvec(rng)))
