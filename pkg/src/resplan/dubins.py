"""Forward-only curve-straight-curve connections at the minimum turning radius.

Used to turn straight route polylines into drivable pose sequences and to rejoin
the route after a recovery search. Only the four CSC words are produced; LSL and
RSR always exist, so a connection is always found.
"""
import math
from typing import List, NamedTuple

import numpy as np

from .kinematics import MotionPrimitive, VehicleParams, arc_offsets, transform

TWO_PI = 2.0 * math.pi
COINCIDENT = 1e-12  # squared center gap, in radii


def _mod2pi(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    # full loops are never shorter than no turn
    return 0.0 if a > TWO_PI - 1e-9 else a


class DubinsWord(NamedTuple):
    kinds: str  # e.g. "LSR"
    t: float  # first turn angle (rad)
    p: float  # straight length over radius
    q: float  # second turn angle (rad)
    radius: float

    @property
    def length(self) -> float:
        return (self.t + self.p + self.q) * self.radius


def _candidates(alpha, beta, d):
    sa, ca, sb, cb = math.sin(alpha), math.cos(alpha), math.sin(beta), math.cos(beta)
    cab = math.cos(alpha - beta)
    out = []
    p2 = 2 + d * d - 2 * cab + 2 * d * (sa - sb)
    if p2 >= 0:
        # coincident circles leave the straight direction undefined; stay on the circle
        tmp = math.atan2(cb - ca, d + sa - sb) if p2 > COINCIDENT else alpha
        out.append(("LSL", _mod2pi(-alpha + tmp), math.sqrt(p2), _mod2pi(beta - tmp)))
    p2 = 2 + d * d - 2 * cab + 2 * d * (sb - sa)
    if p2 >= 0:
        tmp = math.atan2(ca - cb, d - sa + sb) if p2 > COINCIDENT else alpha
        out.append(("RSR", _mod2pi(alpha - tmp), math.sqrt(p2), _mod2pi(-beta + tmp)))
    p2 = -2 + d * d + 2 * cab + 2 * d * (sa + sb)
    if p2 >= 0:
        p = math.sqrt(p2)
        tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
        out.append(("LSR", _mod2pi(-alpha + tmp), p, _mod2pi(-_mod2pi(beta) + tmp)))
    p2 = d * d - 2 + 2 * cab - 2 * d * (sa + sb)
    if p2 >= 0:
        p = math.sqrt(p2)
        tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
        out.append(("RSL", _mod2pi(alpha - tmp), p, _mod2pi(beta - tmp)))
    return out


def shortest_csc(start, end, radius: float) -> DubinsWord:
    dx, dy = end[0] - start[0], end[1] - start[1]
    d = math.hypot(dx, dy) / radius
    phi = math.atan2(dy, dx) if d > 0 else 0.0
    alpha = _mod2pi(start[2] - phi)
    beta = _mod2pi(end[2] - phi)
    best = min(_candidates(alpha, beta, d), key=lambda c: c[1] + c[2] + c[3])
    return DubinsWord(best[0], best[1], best[2], best[3], radius)


def word_primitives(word: DubinsWord, params: VehicleParams) -> List[MotionPrimitive]:
    """The connection as forward primitives; zero-length pieces dropped."""
    turn = math.atan(params.wheelbase / word.radius)
    steer = {"L": turn, "S": 0.0, "R": -turn}
    pieces = []
    for kind, amount in zip(word.kinds, (word.t, word.p, word.q)):
        length = amount * word.radius
        if length > 1e-9:
            pieces.append(MotionPrimitive(steer[kind], length))
    return pieces


def connect(start, end, params: VehicleParams, step: float, radius: float = None) -> np.ndarray:
    """Dense (n, 3) poses from just after ``start`` to ``end``; the last row is ``end`` exactly.

    Returns an empty array when the two poses coincide.
    """
    radius = params.rho_min if radius is None else radius
    word = shortest_csc(start, end, radius)
    pose = tuple(float(v) for v in start[:3])
    chunks = []
    for prim in word_primitives(word, params):
        seg = transform(pose, arc_offsets(prim, params, step))
        chunks.append(seg)
        pose = tuple(seg[-1])
    if not chunks:
        return np.empty((0, 3))
    out = np.concatenate(chunks)
    # absorb float drift so legs chain exactly
    out[-1] = end[:3]
    return out
