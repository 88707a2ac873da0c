import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resplan.kinematics import (
    FORWARD,
    REVERSE,
    MotionPrimitive,
    Pose2D,
    VehicleParams,
    arc_offsets,
    control_set,
    propagate,
    sample_arc,
    transform,
    wrap_angle,
    wrap_angles,
)

UNIT = VehicleParams(wheelbase=1.0, delta_max=math.pi / 4, rho_min=1.0)

angles = st.floats(-20.0, 20.0, allow_nan=False)
coords = st.floats(-50.0, 50.0, allow_nan=False)
steer = st.floats(-0.6, 0.6, allow_nan=False)
arcs = st.floats(0.05, 3.0, allow_nan=False)


def close_pose(a, b, tol):
    return (abs(a[0] - b[0]) <= tol and abs(a[1] - b[1]) <= tol
            and abs(wrap_angle(a[2] - b[2])) <= tol)


class TestWrap:
    @given(angles)
    def test_range(self, a):
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi
        assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)
        assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-9)

    def test_minus_pi_maps_to_pi(self):
        assert wrap_angle(-math.pi) == math.pi
        assert wrap_angles(np.array([-math.pi]))[0] == math.pi

    @given(st.lists(angles, min_size=1, max_size=20))
    def test_vector_form_agrees(self, xs):
        v = wrap_angles(np.array(xs))
        for a, b in zip(xs, v):
            assert abs(wrap_angle(a) - b) < 1e-12 or abs(abs(wrap_angle(a) - b) - 2 * math.pi) < 1e-12


class TestPropagate:
    def test_straight(self):
        assert propagate(Pose2D(0, 0, 0), MotionPrimitive(0.0, 1.0), UNIT) == Pose2D(1.0, 0.0, 0.0)

    def test_reverse_straight(self):
        assert propagate(Pose2D(0, 0, 0), MotionPrimitive(0.0, -1.0), UNIT) == Pose2D(-1.0, 0.0, 0.0)

    def test_quarter_circle(self):
        p = propagate(Pose2D(0, 0, 0), MotionPrimitive(math.pi / 4, math.pi / 2), UNIT)
        assert close_pose(p, (1.0, 1.0, math.pi / 2), 1e-12)

    def test_heading_normalized(self):
        p = propagate(Pose2D(0, 0, 3.0), MotionPrimitive(math.pi / 4, 1.0), UNIT)
        assert -math.pi < p.theta <= math.pi

    @given(coords, coords, angles, steer, arcs, arcs)
    def test_arc_composition(self, x, y, th, phi, s1, s2):
        a = propagate(propagate(Pose2D(x, y, th), MotionPrimitive(phi, s1), UNIT), MotionPrimitive(phi, s2), UNIT)
        b = propagate(Pose2D(x, y, th), MotionPrimitive(phi, s1 + s2), UNIT)
        assert close_pose(a, b, 1e-9)

    @given(coords, coords, angles, steer, arcs)
    def test_reverse_inverts(self, x, y, th, phi, s):
        p = Pose2D(x, y, th)
        back = propagate(propagate(p, MotionPrimitive(phi, s), UNIT), MotionPrimitive(phi, -s), UNIT)
        assert close_pose(back, p, 1e-9)

    @given(coords, coords, angles, arcs, st.sampled_from([1e-5, 1e-4, 1e-3]))
    def test_straight_limit_converges(self, x, y, th, s, phi):
        # the branches differ by exactly s*tan(phi)/L in heading and at most
        # s^2*tan(phi)/(2L) in position, so they meet linearly as phi -> 0
        p = Pose2D(x, y, th)
        curved = propagate(p, MotionPrimitive(phi, s), UNIT)
        straight = propagate(p, MotionPrimitive(0.0, s), UNIT)
        turn = s * math.tan(phi) / UNIT.wheelbase
        assert abs(wrap_angle(curved.theta - straight.theta) - turn) < 1e-12
        assert math.hypot(curved.x - straight.x, curved.y - straight.y) <= 0.5 * s * turn + 1e-11

    @given(coords, coords, angles, st.floats(0.001, 0.09))
    def test_straight_limit_short_arcs(self, x, y, th, s):
        p = Pose2D(x, y, th)
        assert close_pose(propagate(p, MotionPrimitive(1e-5, s), UNIT), propagate(p, MotionPrimitive(0.0, s), UNIT),
                          1e-6)

    def test_below_threshold_is_straight(self):
        p = Pose2D(1.0, 2.0, 0.3)
        assert propagate(p, MotionPrimitive(5e-7, 1.5), UNIT) == propagate(p, MotionPrimitive(0.0, 1.5), UNIT)


class TestControlSet:
    PARAMS = VehicleParams(delta_max=0.5, r_s=0.5, s_max=1.0, r_a=0.5, wheelbase=0.65, rho_min=1.6)

    def test_forward_enumeration(self):
        prims = control_set(FORWARD, self.PARAMS)
        assert len(prims) == 15
        assert sorted({p.steering for p in prims}) == [-0.5, -0.25, 0.0, 0.25, 0.5]
        assert sorted({p.arc_length for p in prims}) == [1.0, 1.5, 2.0]

    def test_reverse_enumeration(self):
        prims = control_set(REVERSE, self.PARAMS)
        assert sorted({p.steering for p in prims}) == [-0.5, -0.25, 0.0, 0.25, 0.5]
        assert sorted({p.arc_length for p in prims}) == [-2.0, -1.5, -1.0]

    def test_coarsest_steering(self):
        vp = VehicleParams(r_s=1.0)
        assert sorted({p.steering for p in control_set(FORWARD, vp)}) == [-vp.delta_max, 0.0, vp.delta_max]

    @given(st.floats(0.05, 1.0), st.floats(0.05, 1.0))
    def test_cardinality(self, r_s, r_a):
        vp = VehicleParams(r_s=r_s, r_a=r_a)
        n = (2 * math.ceil(1 / r_s - 1e-9) + 1) * (math.ceil(1 / r_a - 1e-9) + 1)
        for d in (FORWARD, REVERSE):
            prims = control_set(d, vp)
            assert len(prims) == n
            assert all(abs(p.steering) <= vp.delta_max + 1e-15 for p in prims)
            assert all(p.arc_length != 0 and p.direction == d for p in prims)

    def test_defaults(self):
        assert len(control_set(FORWARD, VehicleParams())) == 27


class TestSampleArc:
    def test_straight_subdivision(self):
        got = sample_arc(Pose2D(0, 0, 0), MotionPrimitive(0.0, 1.0), UNIT, 0.5)
        assert got == [Pose2D(0.5, 0.0, 0.0), Pose2D(1.0, 0.0, 0.0)]

    def test_arc_midpoint(self):
        got = sample_arc(Pose2D(0, 0, 0), MotionPrimitive(math.pi / 4, math.pi / 2), UNIT, math.pi / 4)
        assert len(got) == 2
        h = math.pi / 4
        assert close_pose(got[0], (math.sin(h), 1 - math.cos(h), h), 1e-12)
        assert close_pose(got[1], (1.0, 1.0, math.pi / 2), 1e-12)

    def test_endpoint_matches_propagate(self, rng):
        vp = VehicleParams()
        for _ in range(100):
            p = Pose2D(*rng.uniform(-10, 10, 2), rng.uniform(-math.pi, math.pi))
            prim = MotionPrimitive(rng.uniform(-vp.delta_max, vp.delta_max), rng.choice([-1, 1]) * rng.uniform(0.1, 2))
            pts = sample_arc(p, prim, vp, 0.07)
            assert close_pose(pts[-1], propagate(p, prim, vp), 1e-12)
            gaps = np.hypot(np.diff([q.x for q in [p] + pts]), np.diff([q.y for q in [p] + pts]))
            assert gaps.max() <= 0.07 + 1e-12

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            sample_arc(Pose2D(0, 0, 0), MotionPrimitive(0.0, 1.0), UNIT, 0.0)

    @given(coords, coords, angles, steer, st.floats(-2.0, 2.0).filter(lambda a: abs(a) > 0.05))
    def test_transform_composes_offsets(self, x, y, th, phi, s):
        vp = VehicleParams()
        prim = MotionPrimitive(phi * vp.delta_max / 0.6, s)
        direct = np.array(sample_arc(Pose2D(x, y, th), prim, vp, 0.1))
        composed = transform((x, y, th), arc_offsets(prim, vp, 0.1))
        assert np.allclose(direct[:, :2], composed[:, :2], atol=1e-9)
        assert np.allclose(wrap_angles(direct[:, 2] - composed[:, 2]), 0.0, atol=1e-9)


class TestVehicleParams:
    def test_geometry(self):
        vp = VehicleParams()
        assert vp.rear_overhang + vp.front_extent == pytest.approx(vp.footprint_length)
        assert vp.k_max == pytest.approx(1 / 1.6)

    @pytest.mark.parametrize("kw", [
        {"wheelbase": 0.0}, {"delta_max": 0.0}, {"delta_max": 2.0}, {"s_max": -1.0},
        {"r_s": 0.0}, {"r_a": 1.5}, {"rho_min": 0.5}, {"v_max": 0.0}, {"footprint_width": 0.0},
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            VehicleParams(**kw)
