"""
Tests for bearings, projectors and the FoV cone.
"""

import math

import numpy as np
import pytest

from fov_relay.exceptions import CoincidentPoints, InvalidAngle, MarginInfeasible
from fov_relay.geometry import (
    angular_margin,
    angular_margins,
    bearing,
    bearings,
    in_fov,
    in_fov_many,
    make_fov,
    project,
    projector,
    rotate,
    safe_fov,
    signed_offset,
    transient_margin,
)

H = math.sqrt(2) / 2


class TestBearing:
    """Unit bearings between points."""

    def test_points_along_axis(self):
        assert bearing((0, 0), (3, 0)) == pytest.approx([1.0, 0.0])

    def test_is_unit_and_scale_free(self):
        g = bearing((1.0, 2.0), (4.0, 6.0))
        assert np.linalg.norm(g) == pytest.approx(1.0, abs=1e-15)
        assert g == pytest.approx([0.6, 0.8])

    def test_coincident_points_raise(self):
        with pytest.raises(CoincidentPoints):
            bearing((1.0, 1.0), (1.0, 1.0 + 1e-10))

    def test_non_finite_input_rejected(self):
        with pytest.raises(ValueError):
            bearing((0.0, math.nan), (1.0, 0.0))

    def test_many_returns_ranges(self):
        G, d = bearings(np.zeros(2), np.array([[0.0, -10.0], [3.0, 4.0]]))
        assert d == pytest.approx([10.0, 5.0])
        assert G[0] == pytest.approx([0.0, -1.0])

    def test_many_coincident_raises(self):
        with pytest.raises(CoincidentPoints):
            bearings(np.zeros(2), np.array([[1.0, 0.0], [0.0, 0.0]]))


class TestProjector:
    """P_g = I - g g^T."""

    def test_algebra(self):
        rng = np.random.default_rng(7)
        for a in rng.uniform(-math.pi, math.pi, size=200):
            g = np.array([math.cos(a), math.sin(a)])
            P = projector(g)
            assert np.allclose(P @ P, P, atol=1e-14)
            assert np.allclose(P, P.T)
            assert np.allclose(P @ g, 0.0, atol=1e-15)

    def test_project_matches_matrix(self):
        g = np.array([0.6, 0.8])
        v = np.array([2.0, -1.0])
        assert project(g, v) == pytest.approx(projector(g) @ v)


class TestRotation:
    def test_counterclockwise_positive(self):
        assert rotate(math.pi / 2, (1.0, 0.0)) == pytest.approx([0.0, 1.0], abs=1e-15)


class TestFov:
    """Cone construction, membership and margins."""

    def test_borders_for_quarter_pi(self, fov):
        assert fov.g_fov1 == pytest.approx([-H, -H])
        assert fov.g_fov2 == pytest.approx([H, -H])
        assert fov.bisector == pytest.approx([0.0, -1.0])

    def test_bisector_is_normalized_sum_of_borders(self, fov):
        s = fov.g_fov1 + fov.g_fov2
        assert s / np.linalg.norm(s) == pytest.approx(fov.bisector)

    def test_bisector_is_normalized(self):
        assert make_fov((0.0, -3.0), math.pi / 4).bisector == pytest.approx([0.0, -1.0])

    @pytest.mark.parametrize("gamma", [0.0, -0.1, math.pi / 2 + 1e-6])
    def test_invalid_gamma(self, gamma):
        with pytest.raises(InvalidAngle):
            make_fov((0.0, -1.0), gamma)

    def test_half_plane_cone_allowed(self):
        fov = make_fov((0.0, -1.0), math.pi / 2)
        assert fov.g_fov1 == pytest.approx([-1.0, 0.0], abs=1e-15)

    def test_border_counts_as_inside(self, fov):
        assert in_fov(fov.g_fov1, fov)
        assert in_fov(fov.g_fov2, fov)
        assert in_fov(fov.bisector, fov)

    def test_outside(self, fov, at_angle):
        assert not in_fov(at_angle(math.pi / 4 + 1e-3), fov)
        assert not in_fov(-fov.bisector, fov)

    def test_many_matches_single(self, fov, at_angle):
        G = np.array([at_angle(a) for a in (-1.0, -0.5, 0.0, 0.7, 0.9)])
        assert in_fov_many(G, fov).tolist() == [in_fov(g, fov) for g in G]

    def test_margins(self, fov, at_angle):
        assert angular_margin(fov.bisector, fov) == pytest.approx(math.pi / 4)
        assert angular_margin(fov.g_fov2, fov) == pytest.approx(0.0, abs=1e-12)
        assert angular_margin(at_angle(-math.pi / 4 - 0.1), fov) == pytest.approx(-0.1)
        G = np.array([at_angle(0.2), at_angle(-0.3)])
        assert angular_margins(G, fov) == pytest.approx([math.pi / 4 - 0.2, math.pi / 4 - 0.3])

    def test_signed_offset_sign(self, fov):
        assert signed_offset(fov.g_fov2, fov) == pytest.approx(math.pi / 4)
        assert signed_offset(fov.g_fov1, fov) == pytest.approx(-math.pi / 4)


class TestTransientMargin:
    """Cone shrinkage for a detection delay."""

    def test_value(self):
        assert transient_margin(0.1, 5.0, 5.0) == pytest.approx(math.asin(0.1))

    def test_zero_delay(self):
        assert transient_margin(0.0, 5.0, 5.0) == 0.0

    def test_infeasible(self):
        with pytest.raises(MarginInfeasible):
            transient_margin(2.0, 5.0, 5.0)

    @pytest.mark.parametrize("T_r, v_M, eps", [(0.1, 5.0, 0.0), (0.1, 5.0, -1.0), (-0.1, 5.0, 5.0), (0.1, -5.0, 5.0)])
    def test_bad_arguments(self, T_r, v_M, eps):
        with pytest.raises(MarginInfeasible):
            transient_margin(T_r, v_M, eps)

    def test_safe_fov(self, fov):
        shrunk = safe_fov(fov, 0.1)
        assert shrunk.gamma == pytest.approx(math.pi / 4 - 0.1)
        assert shrunk.bisector == pytest.approx(fov.bisector)
        assert safe_fov(fov, 0.0) is fov

    def test_safe_fov_rejects_full_margin(self, fov):
        with pytest.raises(InvalidAngle):
            safe_fov(fov, fov.gamma)
