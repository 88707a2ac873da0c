import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resplan.dubins import connect, shortest_csc, word_primitives
from resplan.kinematics import Pose2D, VehicleParams, propagate, wrap_angle

VP = VehicleParams()
R = VP.rho_min


def _m2pi(a):
    return a % (2 * math.pi)


def tangent_oracle(start, end, r):
    """Shortest CSC length from turning-circle centers and their tangent lines."""
    x0, y0, t0 = start
    x1, y1, t1 = end

    def center(x, y, t, side):
        return x - side * r * math.sin(t), y + side * r * math.cos(t)

    best = math.inf
    for first, second in ((1, 1), (-1, -1), (1, -1), (-1, 1)):
        c1, c2 = center(x0, y0, t0, first), center(x1, y1, t1, second)
        dx, dy = c2[0] - c1[0], c2[1] - c1[1]
        dist = math.hypot(dx, dy)
        if first == second:
            straight, psi = dist, (math.atan2(dy, dx) if dist > 1e-9 else t0)
        else:
            if dist < 2 * r:
                continue
            straight = math.sqrt(dist * dist - 4 * r * r)
            # the straight leg is offset by the two radii on opposite sides
            psi = math.atan2(dy, dx) + first * math.atan2(2 * r, straight)
        a1 = _m2pi(first * (psi - t0))
        a2 = _m2pi(second * (t1 - psi))
        best = min(best, r * (a1 + a2) + straight)
    return best


# millimetre lattice: sub-micrometre offsets make the tangent directions ill-conditioned
mm = st.integers(-6000, 6000).map(lambda v: v / 1000)
poses = st.tuples(mm, mm, st.integers(-3141, 3141).map(lambda v: v / 1000))


@given(poses, poses)
def test_length_matches_tangent_oracle(a, b):
    word = shortest_csc(a, b, R)
    assert word.length == pytest.approx(tangent_oracle(a, b, R), abs=1e-7)


@given(poses, poses)
def test_primitives_reach_the_end_pose(a, b):
    word = shortest_csc(a, b, R)
    pose = Pose2D(*a)
    for prim in word_primitives(word, VP):
        assert prim.arc_length > 0
        assert abs(prim.steering) <= VP.delta_max + 1e-12
        pose = propagate(pose, prim, VP)
    assert math.hypot(pose.x - b[0], pose.y - b[1]) < 1e-7
    assert abs(wrap_angle(pose.theta - b[2])) < 1e-7


def test_straight_ahead_is_pure_straight():
    word = shortest_csc((0, 0, 0), (5, 0, 0), R)
    assert word.t == 0 and word.q == 0 and word.length == pytest.approx(5.0)
    assert len(word_primitives(word, VP)) == 1


def test_quarter_turn_is_one_arc():
    word = shortest_csc((0, 0, 0), (R, R, math.pi / 2), R)
    assert word.length == pytest.approx(math.pi / 2 * R)


def test_turn_steering_realises_the_radius():
    word = shortest_csc((0, 0, 0), (R, R, math.pi / 2), R)
    (prim,) = word_primitives(word, VP)
    assert math.tan(prim.steering) / VP.wheelbase == pytest.approx(1 / R)


@given(poses, poses)
def test_connect_dense_poses(a, b):
    step = 0.05
    out = connect(a, b, VP, step)
    if len(out) == 0:
        return
    assert np.array_equal(out[-1], np.asarray(b, dtype=float))
    pts = np.vstack([a, out])
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    turn = np.abs((np.diff(pts[:, 2]) + math.pi) % (2 * math.pi) - math.pi)
    assert seg.max() <= step + 1e-6
    # curvature never exceeds 1 / rho_min: a turn over a chord needs at least this arc
    arc = 2 * R * np.arcsin(np.minimum(seg / (2 * R), 1.0))
    assert np.all(turn <= arc / R + 1e-9)
    assert seg.sum() <= shortest_csc(a, b, R).length + 1e-6


def test_connect_coincident_is_empty():
    assert connect((1.0, 2.0, 0.3), (1.0, 2.0, 0.3), VP, 0.05).shape == (0, 3)
