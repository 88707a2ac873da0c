"""Resilient trajectory planning for car-like vehicles.

Straight-line routes are monitored for footprint collisions; blocked stretches
are repaired by hybrid A* search and Voronoi-field smoothing, the final approach
goes through an alignment pose behind the goal, and the result is timed with a
trapezoidal speed profile.
"""
from ._jit import USE_NUMBA
from .errors import (
    ConfigError,
    DensityUnreachable,
    ExpansionLimit,
    NoPath,
    PlanFailure,
    PlanningError,
)
from .gridmap import FieldMap, OccupancyGrid, compute_distance_map, compute_voronoi, obstacle_density, voronoi_field
from .hybrid_astar import HeuristicWeights, SearchLimits, collision_free, search
from .kinematics import MotionPrimitive, Pose2D, VehicleParams, control_set, propagate, sample_arc
from .pipeline import (
    GoalAlignmentConfig,
    Planner,
    PlannerConfig,
    PlanningQuery,
    TimedTrajectory,
    execute,
    plan_resilient,
    time_parameterize,
)
from .smoother import SmoothingWeights, Waypath, smooth

__all__ = [
    "USE_NUMBA",
    "ConfigError",
    "DensityUnreachable",
    "ExpansionLimit",
    "NoPath",
    "PlanFailure",
    "PlanningError",
    "FieldMap",
    "OccupancyGrid",
    "compute_distance_map",
    "compute_voronoi",
    "obstacle_density",
    "voronoi_field",
    "HeuristicWeights",
    "SearchLimits",
    "collision_free",
    "search",
    "MotionPrimitive",
    "Pose2D",
    "VehicleParams",
    "control_set",
    "propagate",
    "sample_arc",
    "GoalAlignmentConfig",
    "Planner",
    "PlannerConfig",
    "PlanningQuery",
    "TimedTrajectory",
    "execute",
    "plan_resilient",
    "time_parameterize",
    "SmoothingWeights",
    "Waypath",
    "smooth",
]
