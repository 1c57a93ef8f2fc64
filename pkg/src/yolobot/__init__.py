"""Behavior software for the YOLO social robot, hardware-agnostic.

Subsystems: trajectory ingestion and segmentation, convex-hull shape
features, a KNN movement classifier with synthetic generators, a sensor/
actuator HAL, composable social behaviors, the storytelling-arc planner,
a deterministic simulator with trace record/replay, and a CLI plus a
WebSocket bridge for the browser play surface.
"""

from .behaviors import (
    ComposedBehavior,
    LightBehavior,
    MovementBehavior,
    SimpleBehavior,
    SocialProfile,
    make_movement,
    profile_preset,
    step,
    touch_override,
)
from .classifier import KnnConfig, TrainedModel, classify, evaluate, fit
from .geometry import FeatureVector, HullPolygon, convex_hull, extract_features
from .hal import Backend, LedCommand, MotionDelta, TouchState, WheelCommand
from .planner import ArcPhase, ArcSchedule, InteractionState, Planner, Technique, phase_of, respond, technique_for
from .shapes import NoiseProfile, ShapeClass, generate_shape
from .sim import Session, SimConfig, replay, run_session
from .trajectory import SegmentationConfig, TimedPoint, Trajectory, append_sample, normalize, segment

__version__ = "0.1.0"
