"""Car-like (rear-axle bicycle) kinematics over circular-arc motion primitives."""
import math
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi
STRAIGHT_EPS = 1e-6  # |steering| below this is treated as straight motion

FORWARD = 1
REVERSE = -1


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    a = math.remainder(a, TWO_PI)
    return math.pi if a <= -math.pi else a


def wrap_angles(a: np.ndarray) -> np.ndarray:
    a = np.remainder(np.asarray(a, dtype=float) + math.pi, TWO_PI) - math.pi
    return np.where(a <= -math.pi, math.pi, a)


class Pose2D(NamedTuple):
    x: float
    y: float
    theta: float

    def normalized(self) -> "Pose2D":
        return Pose2D(self.x, self.y, wrap_angle(self.theta))

    def distance_to(self, other) -> float:
        return math.hypot(self.x - other[0], self.y - other[1])


class MotionPrimitive(NamedTuple):
    steering: float
    arc_length: float

    @property
    def direction(self) -> int:
        return FORWARD if self.arc_length > 0 else REVERSE


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 0.65
    delta_max: float = 0.4
    s_max: float = 1.0
    r_s: float = 0.3
    r_a: float = 0.5
    rho_min: float = 1.6
    v_max: float = 0.6
    a_max: float = 0.5
    footprint_length: float = 0.98
    footprint_width: float = 0.74

    def __post_init__(self):
        if self.wheelbase <= 0:
            raise ValueError("wheelbase must be positive")
        if not 0 < self.delta_max < math.pi / 2:
            raise ValueError("delta_max must lie in (0, pi/2)")
        if self.s_max <= 0:
            raise ValueError("s_max must be positive")
        if not (0 < self.r_s <= 1 and 0 < self.r_a <= 1):
            raise ValueError("r_s and r_a must lie in (0, 1]")
        if self.rho_min < self.wheelbase / math.tan(self.delta_max) - 1e-12:
            raise ValueError("rho_min is below the kinematic bound wheelbase / tan(delta_max)")
        if self.v_max <= 0 or self.a_max <= 0:
            raise ValueError("v_max and a_max must be positive")
        if self.footprint_length <= 0 or self.footprint_width <= 0:
            raise ValueError("footprint dimensions must be positive")

    @property
    def rear_overhang(self) -> float:
        return max(0.5 * (self.footprint_length - self.wheelbase), 0.0)

    @property
    def front_extent(self) -> float:
        """Distance from the rear axle to the front bumper."""
        return self.footprint_length - self.rear_overhang

    @property
    def k_max(self) -> float:
        return 1.0 / self.rho_min


def propagate(state: Pose2D, primitive: MotionPrimitive, params: VehicleParams) -> Pose2D:
    x, y, th = state
    phi, s = primitive
    if abs(phi) < STRAIGHT_EPS:
        return Pose2D(x + s * math.cos(th), y + s * math.sin(th), wrap_angle(th))
    k = params.wheelbase / math.tan(phi)
    th1 = th + s / k
    return Pose2D(
        x + k * (math.sin(th1) - math.sin(th)),
        y - k * (math.cos(th1) - math.cos(th)),
        wrap_angle(th1),
    )


def _samples(ratio: float) -> List[float]:
    # multiples of ``ratio`` in [0, 1], endpoint included
    n = math.ceil(1.0 / ratio - 1e-9)
    return [min(i * ratio, 1.0) for i in range(n + 1)]


def control_set(direction: int, params: VehicleParams) -> List[MotionPrimitive]:
    """Admissible primitives for one travel direction (``FORWARD`` or ``REVERSE``)."""
    mags = [f * params.delta_max for f in _samples(params.r_s)]
    steering = [-m for m in reversed(mags[1:])] + mags
    sign = 1.0 if direction >= 0 else -1.0
    arcs = [sign * params.s_max * (1.0 + f) for f in _samples(params.r_a)]
    if sign < 0:
        arcs.reverse()
    return [MotionPrimitive(d, a) for d in steering for a in arcs]


def sample_arc(state: Pose2D, primitive: MotionPrimitive, params: VehicleParams, step: float) -> List[Pose2D]:
    """Poses along a primitive at arc-length spacing <= step, endpoint included."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = max(1, math.ceil(abs(primitive.arc_length) / step - 1e-12))
    return [
        propagate(state, MotionPrimitive(primitive.steering, primitive.arc_length * (i / n)), params)
        for i in range(1, n + 1)
    ]


def arc_offsets(primitive: MotionPrimitive, params: VehicleParams, step: float) -> np.ndarray:
    """``sample_arc`` from the origin as an (n, 3) array; compose with :func:`transform`."""
    return np.array(sample_arc(Pose2D(0.0, 0.0, 0.0), primitive, params, step), dtype=float)


def transform(pose, offsets: np.ndarray) -> np.ndarray:
    """Express origin-relative poses ``offsets`` in the frame of ``pose``."""
    x, y, th = pose
    c, s = math.cos(th), math.sin(th)
    out = np.empty_like(offsets)
    out[:, 0] = x + c * offsets[:, 0] - s * offsets[:, 1]
    out[:, 1] = y + s * offsets[:, 0] + c * offsets[:, 1]
    out[:, 2] = wrap_angles(th + offsets[:, 2])
    return out
