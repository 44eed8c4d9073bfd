"""telefilter: filtered delta-pose teleoperation of a simulated industrial arm.

Command pipeline: noise gate + speed cap + substep interpolation feeding a
black-box position-controller simulation, with a websocket gateway, trajectory
logging and smoothness/tracking metrics.
"""

__version__ = "0.1.0"

from .filtering import FilterParams, FilteredDelta, SubstepPlan, filter_delta, interpolate, process_command
from .geometry import DeltaPose, Pose, pose_apply, pose_diff

__all__ = [
    "DeltaPose",
    "FilterParams",
    "FilteredDelta",
    "Pose",
    "SubstepPlan",
    "filter_delta",
    "interpolate",
    "pose_apply",
    "pose_diff",
    "process_command",
    "__version__",
]
