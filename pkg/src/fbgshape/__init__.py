"""Sliding-fiber length sensing and shape reconstruction for extensible soft
manipulators: constant-curvature channel matching, a two-mode model-free
Kalman filter over intermittent length measurements, and a simulation and
metrics harness.
"""
from .backend import BACKEND
from .errors import FbgShapeError
from .estimator import FilterConfig, FilterState, baseline_integrate, predict, step, update
from .fiber import ChannelConfig, FiberConfig, FiberFrame, read_frames, validate_geometry, write_frames
from .geometry import (
    SectionArc,
    Transform,
    cc_angles_from_endpoint,
    cc_arc_endpoint,
    compose,
    reconstruct_shape,
    section_transform,
)
from .length_sensor import LengthMeasurement, effective_length, match_channel_index, matching_cost
from .metrics import endpoint_error, length_error_stats, shape_error
from .simulator import DisturbanceEvent, NoiseSpec, RobotTruth, TrajectorySpec, robot_step, synth_frame

__version__ = "0.1.0"
