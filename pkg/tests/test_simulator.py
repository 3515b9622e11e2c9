"""
Tests for the fixed-step integrator, scenario validation and event extraction.
"""

import math

import numpy as np
import pytest

from fov_relay.agents import ConstantVelocity, Static
from fov_relay.avoidance import SafetyConfig
from fov_relay.controller import GainSpec
from fov_relay.exceptions import ScenarioError
from fov_relay.scenarios import scenario_two_agent_worst_case
from fov_relay.simulator import (
    EventKind,
    Scenario,
    chi_switch_count,
    evaluate,
    extract_events,
    max_switch_jump_ratio,
    run,
    step,
)
from fov_relay.world import WorldState

from .conftest import GAMMA, V_MAX


def _scenario(fov, agents, models=None, **kwargs):
    agents = np.array(agents, dtype=float)
    n = len(agents)
    models = models or tuple(Static() for _ in range(n))
    params = dict(
        fov=fov,
        gains=GainSpec.from_multiplier(V_MAX, GAMMA, n, 1.0),
        safety=SafetyConfig(),
        avoidance_enabled=True,
        agent_models=models,
        initial=WorldState(t=0.0, p_r=(0.0, 0.0), agents=agents),
        dt=0.01,
        t_final=1.0,
    )
    params.update(kwargs)
    return Scenario(**params)


class TestScenarioValidation:
    """Construction-time checks."""

    def test_valid(self, fov):
        scenario = _scenario(fov, [(0.0, -30.0)])
        assert scenario.n == 1
        assert scenario.n_steps == 100
        assert scenario.control_fov is scenario.fov

    @pytest.mark.parametrize("dt", [0.0, -0.01, 0.2])
    def test_bad_dt(self, fov, dt):
        with pytest.raises(ScenarioError):
            _scenario(fov, [(0.0, -30.0)], dt=dt)

    def test_agent_outside_fov(self, fov):
        with pytest.raises(ScenarioError, match="outside the field of view"):
            _scenario(fov, [(0.0, -30.0), (30.0, -1.0)])

    def test_agent_too_close(self, fov):
        with pytest.raises(ScenarioError, match="below eps"):
            _scenario(fov, [(0.0, -4.0)])

    def test_model_count(self, fov):
        with pytest.raises(ScenarioError):
            _scenario(fov, [(0.0, -30.0)], models=(Static(), Static()))

    def test_gain_agent_count(self, fov):
        with pytest.raises(ScenarioError):
            _scenario(fov, [(0.0, -30.0)], gains=GainSpec.from_multiplier(V_MAX, GAMMA, 2, 1.0))

    def test_transient_delay_shrinks_control_cone(self, fov):
        scenario = _scenario(fov, [(0.0, -30.0)], transient_delay=0.1)
        assert scenario.control_fov.gamma == pytest.approx(GAMMA - math.asin(0.1))
        assert scenario.fov.gamma == GAMMA


class TestStep:
    """One Euler step."""

    def test_relay_at_rest_with_agent_on_bisector(self, fov):
        scenario = _scenario(fov, [(0.0, -30.0)])
        nxt = step(scenario.initial, scenario)
        assert nxt.t == pytest.approx(0.01)
        assert nxt.p_r == pytest.approx([0.0, 0.0])

    def test_relay_turns_towards_agent(self, fov):
        agent = 30.0 * fov.g_fov1
        scenario = _scenario(fov, [agent])
        rec = evaluate(scenario.initial, scenario)
        # The relay moves so that the bearing rotates back towards the bisector
        assert rec.u_r[0] < 0
        assert float(rec.u_r @ fov.bisector) < 0

    def test_speed_bound(self, fov):
        models = (ConstantVelocity(v=(50.0, 0.0)),)
        scenario = _scenario(fov, [(0.0, -30.0)], models=models)
        nxt = step(scenario.initial, scenario)
        moved = np.linalg.norm(nxt.agents[0] - scenario.initial.agents[0])
        assert moved <= V_MAX * scenario.dt + 1e-12

    def test_alert_reported_without_avoidance(self, fov):
        scenario = _scenario(fov, [(0.0, -5.02)], avoidance_enabled=False)
        rec = evaluate(scenario.initial, scenario)
        assert rec.d_r == pytest.approx(5.02)
        assert rec.eta == pytest.approx(0.6)
        assert rec.upsilon == pytest.approx([0.0, 0.0])


class TestRun:
    """Whole-run traces."""

    def test_row_count_and_times(self, fov):
        trace = run(_scenario(fov, [(0.0, -30.0)], dt=0.01, t_final=1.0))
        assert len(trace.t) == 101
        assert trace.t[-1] == pytest.approx(1.0)
        assert trace.agents.shape == (101, 1, 2)
        assert trace.margins.shape == (101, 1)

    def test_deterministic(self, fov):
        models = (ConstantVelocity(v=(-2.0, 1.0)), ConstantVelocity(v=(1.5, 0.5)))
        scenario = _scenario(fov, [(-10.0, -30.0), (8.0, -25.0)], models=models, t_final=2.0)
        a, b = run(scenario), run(scenario)
        for name in ("p_r", "agents", "u_r", "chi_n", "margins", "d_r", "eta", "a_r"):
            assert np.array_equal(getattr(a, name), getattr(b, name))
        assert a.events == b.events

    def test_static_agent_stays_put(self, fov):
        trace = run(_scenario(fov, [(0.0, -30.0), (5.0, -20.0)]))
        assert np.all(trace.agents[:, 1] == trace.agents[0, 1])

    def test_world_at(self, fov):
        trace = run(_scenario(fov, [(0.0, -30.0)]))
        world = trace.world_at(50)
        assert world.t == pytest.approx(0.5)
        assert world.p_r == pytest.approx(trace.p_r[50])

    def test_min_distance_event(self, fov):
        trace = run(_scenario(fov, [(0.0, -30.0)]))
        (event,) = trace.events_of(EventKind.MIN_DISTANCE)
        assert event.value == pytest.approx(trace.min_distance)

    def test_first_order_in_dt(self):
        finals = [
            run(scenario_two_agent_worst_case(dt=dt, t_final=2.0)).p_r[-1]
            for dt in (4e-3, 2e-3, 1e-3)
        ]
        coarse = float(np.linalg.norm(finals[0] - finals[1]))
        fine = float(np.linalg.norm(finals[1] - finals[2]))
        assert fine < 0.1 * 2e-3
        assert coarse / fine == pytest.approx(2.0, rel=0.05)


class TestEvents:
    """Event extraction from per-step records."""

    def test_chi_switches_skip_zero(self):
        t = np.arange(7) * 0.1
        chi = np.array([1, 1, 0, -1, -1, 0, 1])
        margins = np.full((7, 1), 0.5)
        distances = np.full((7, 1), 20.0)
        events = extract_events(t, chi, margins, distances)
        switches = [e for e in events if e.kind == EventKind.CHI_SWITCH]
        assert [e.step for e in switches] == [3, 6]
        assert [e.value for e in switches] == [-1.0, 1.0]

    def test_violation_onsets(self):
        t = np.arange(6) * 0.1
        chi = np.zeros(6, dtype=int)
        margins = np.array([[0.1, 0.1], [-0.01, 0.1], [-0.02, 0.1], [0.1, -0.005], [-0.01, 0.1], [0.1, 0.1]])
        distances = np.array([[20.0, 30.0]] * 5 + [[4.0, 30.0]])
        events = extract_events(t, chi, margins, distances, threshold=-1e-3)
        onsets = [(e.step, e.agent) for e in events if e.kind == EventKind.FOV_VIOLATION]
        assert onsets == [(1, 0), (3, 1), (4, 0)]
        (closest,) = [e for e in events if e.kind == EventKind.MIN_DISTANCE]
        assert (closest.step, closest.agent, closest.value) == (5, 0, 4.0)

    def test_small_dips_ignored(self):
        t = np.arange(3) * 0.1
        margins = np.array([[0.0], [-5e-4], [0.0]])
        events = extract_events(t, np.zeros(3, dtype=int), margins, np.full((3, 1), 10.0))
        assert not [e for e in events if e.kind == EventKind.FOV_VIOLATION]

    def test_switch_helpers_on_quiet_run(self, fov):
        trace = run(_scenario(fov, [(0.0, -30.0)]))
        assert chi_switch_count(trace) == 0
        assert max_switch_jump_ratio(trace) == 0.0
