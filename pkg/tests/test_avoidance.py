"""
Tests for the collision-avoidance term.
"""

import math

import numpy as np
import pytest

from fov_relay.avoidance import (
    SafetyConfig,
    alert,
    avoidance_effort,
    avoidance_term,
    proximity,
    relay_velocity,
)
from fov_relay.controller import control_general
from fov_relay.exceptions import CollisionError, DomainError, GammaDegenerate
from fov_relay.geometry import make_fov
from fov_relay.world import WorldState

from .conftest import V_MAX


@pytest.fixture
def cfg():
    return SafetyConfig(eps=5.0, eps_s=10.0, delta=0.01)


def _world(*agents):
    return WorldState(t=0.0, p_r=(0.0, 0.0), agents=np.array(agents, dtype=float))


class TestSafetyConfig:
    @pytest.mark.parametrize("kwargs", [dict(eps=10.0, eps_s=5.0), dict(eps=0.0), dict(delta=0.0), dict(delta=1.5)])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            SafetyConfig(**kwargs)


class TestProximity:
    """Closest agents, escape normal and retreat speed."""

    def test_nobody_near(self, cfg, fov):
        prox = proximity(_world((0.0, -30.0)), cfg, fov, V_MAX)
        assert prox.d_r == cfg.eps_s
        assert prox.V_s == () and prox.V_r == ()
        assert prox.critical_pair is None
        assert prox.n_r == pytest.approx(fov.bisector)
        assert prox.v_bar == 0.0

    def test_single_agent_on_bisector(self, cfg, fov):
        prox = proximity(_world((0.0, -5.0)), cfg, fov, V_MAX)
        assert prox.d_r == pytest.approx(5.0)
        assert prox.V_r == (0,)
        assert prox.critical_pair == (0, 0)
        assert prox.n_r == pytest.approx(fov.bisector)
        assert prox.v_bar == pytest.approx(V_MAX)

    def test_symmetric_pair_on_borders(self, cfg, fov):
        prox = proximity(_world(8.0 * fov.g_fov1, 8.0 * fov.g_fov2), cfg, fov, V_MAX)
        assert prox.V_r == (0, 1)
        assert prox.critical_pair == (0, 1)
        assert prox.n_r == pytest.approx(fov.bisector)
        assert prox.v_bar == pytest.approx(7.0711, abs=1e-4)

    def test_only_closest_are_critical(self, cfg, fov):
        prox = proximity(_world((0.0, -9.0), (1.0, -6.0), (0.0, -40.0)), cfg, fov, V_MAX)
        assert prox.V_s == (0, 1)
        assert prox.V_r == (1,)

    def test_v_bar_bounds(self, cfg, fov):
        rng = np.random.default_rng(17)
        for _ in range(500):
            theta = rng.uniform(-fov.gamma, fov.gamma, size=3)
            G = np.stack([np.sin(theta), -np.cos(theta)], axis=1)
            d = np.full(3, rng.uniform(5.0, 10.0))
            prox = proximity(_world(*(G * d[:, None])), cfg, fov, V_MAX)
            assert V_MAX - 1e-9 <= prox.v_bar <= V_MAX / math.cos(fov.gamma) + 1e-9

    def test_collision(self, cfg, fov):
        with pytest.raises(CollisionError):
            proximity(_world((0.0, 0.0)), cfg, fov, V_MAX)

    def test_half_plane_cone_is_degenerate(self, cfg):
        fov = make_fov((0.0, -1.0), math.pi / 2)
        with pytest.raises(GammaDegenerate):
            proximity(_world((0.0, -6.0)), cfg, fov, V_MAX)

    def test_opposite_pair_is_degenerate(self, cfg, fov):
        with pytest.raises(GammaDegenerate, match="opposite"):
            proximity(_world((4.0, 0.0), (-4.0, 0.0)), cfg, fov, V_MAX)

    def test_nearly_opposite_pair_stays_finite(self, cfg, fov):
        other = 4.0 * np.array([-math.cos(1e-3), math.sin(1e-3)])
        prox = proximity(_world((4.0, 0.0), other), cfg, fov, V_MAX)
        assert prox.V_r == (0, 1)
        assert np.all(np.isfinite(prox.n_r))
        assert math.isfinite(prox.v_bar) and prox.v_bar > 0.0


class TestAlert:
    """Ramp from 1 at eps to 0 at eps (1 + delta)."""

    @pytest.mark.parametrize(
        "d, expected",
        [(3.0, 1.0), (5.0, 1.0), (5.025, 0.5), (5.05, 0.0), (7.5, 0.0), (10.0, 0.0), (20.0, 0.0)],
    )
    def test_values(self, cfg, d, expected):
        assert alert(d, cfg) == pytest.approx(expected, abs=1e-9)

    def test_monotone(self, cfg):
        values = [alert(d, cfg) for d in np.linspace(4.0, 11.0, 500)]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestAvoidanceTerm:
    """Effort magnitude and the composed input."""

    def test_effort_on_bisector_at_rest(self, cfg, fov):
        prox = proximity(_world((0.0, -5.0)), cfg, fov, V_MAX)
        assert avoidance_effort(prox, np.zeros(2), fov) == pytest.approx(V_MAX)

    def test_no_effort_when_already_retreating(self, cfg, fov):
        prox = proximity(_world((0.0, -5.0)), cfg, fov, V_MAX)
        u = -prox.v_bar * prox.n_r
        assert avoidance_effort(prox, u, fov) == pytest.approx(0.0, abs=1e-12)

    def test_no_effort_without_neighbours(self, cfg, fov):
        prox = proximity(_world((0.0, -30.0)), cfg, fov, V_MAX)
        assert avoidance_effort(prox, np.array([1.0, 2.0]), fov) == 0.0

    def test_term_pushes_against_bisector(self, cfg, fov):
        term = avoidance_term(_world((0.0, -5.0)), cfg, fov, V_MAX, np.zeros(2))
        assert term.eta == 1.0
        assert term.upsilon == pytest.approx(-V_MAX * fov.bisector)
        assert relay_velocity(np.zeros(2), term) == pytest.approx(term.upsilon)

    def test_inactive_outside_ramp(self, cfg, fov):
        term = avoidance_term(_world((0.0, -8.0)), cfg, fov, V_MAX, np.zeros(2))
        assert term.eta == 0.0
        assert term.upsilon == pytest.approx([0.0, 0.0])
        # Effort is still computed for diagnostics
        assert term.a_r == pytest.approx(V_MAX)

    def test_retreat_guarantee(self, cfg, fov):
        rng = np.random.default_rng(29)
        for _ in range(1000):
            n = int(rng.integers(1, 5))
            theta = rng.uniform(-fov.gamma, fov.gamma, size=n)
            G = np.stack([np.sin(theta), -np.cos(theta)], axis=1)
            d = rng.uniform(3.0, 5.0, size=n)
            world = _world(*(G * d[:, None]))
            u_r = control_general(G, fov, 8.0).u_r
            term = avoidance_term(world, cfg, fov, V_MAX, u_r)
            v = relay_velocity(u_r, term)
            assert term.eta == 1.0
            assert float(v @ -term.proximity.n_r) >= term.proximity.v_bar - 1e-9
            assert float(v @ fov.bisector) <= 1e-12
            assert term.w_r == pytest.approx(-float(u_r @ term.proximity.n_r))
