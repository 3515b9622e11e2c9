"""
Reference scenarios: worst-case escapes, bisector dancing and patrolling.
"""

import math
from typing import Optional, Sequence

import numpy as np

from .agents import BisectorOscillator, CirclePath, ConstantVelocity, Static, WaypointLoop, clamp_speed
from .avoidance import SafetyConfig
from .controller import GainSpec, decide
from .exceptions import ScenarioError
from .geometry import VecLike, as_vec2, bearings, make_fov, rotate
from .qgamma import phi_star
from .simulator import DEFAULT_DT, Scenario
from .world import WorldState

DEFAULT_GAMMA = math.pi / 4
DEFAULT_V_MAX = 5.0
DEFAULT_BISECTOR = (0.0, -1.0)


def _check_d0(d0: float, safety: SafetyConfig) -> None:
    if d0 <= safety.eps:
        raise ScenarioError(f"initial distance d0={d0} must exceed eps={safety.eps}")


def scenario_single_worst_case(
    gamma: float = DEFAULT_GAMMA,
    v_M: float = DEFAULT_V_MAX,
    K_r_multiplier: float = 1.0,
    d0: float = 30.0,
    *,
    escape_duration: Optional[float] = None,
    safety: Optional[SafetyConfig] = None,
    avoidance_enabled: bool = True,
    dt: float = DEFAULT_DT,
    t_final: float = 30.0,
    transient_delay: float = 0.0,
    bisector: VecLike = DEFAULT_BISECTOR,
    relay_position: VecLike = (0.0, 0.0),
) -> Scenario:
    """
    One agent on border 1 escaping perpendicular to it at full speed.

    The agent keeps its world-frame velocity for the whole run, or only for
    escape_duration seconds before holding still when that is given.
    """
    safety = safety or SafetyConfig()
    _check_d0(d0, safety)
    fov = make_fov(bisector, gamma)
    p_r = as_vec2(relay_position)
    agent = p_r + d0 * fov.g_fov1
    escape = v_M * rotate(-math.pi / 2, fov.g_fov1)
    return Scenario(
        fov=fov,
        gains=GainSpec.from_multiplier(v_M, gamma, 1, K_r_multiplier),
        safety=safety,
        avoidance_enabled=avoidance_enabled,
        agent_models=(ConstantVelocity(v=escape, stop_time=escape_duration),),
        initial=WorldState(t=0.0, p_r=p_r, agents=[agent]),
        dt=dt,
        t_final=t_final,
        transient_delay=transient_delay,
        name="single_worst_case",
    )


def scenario_two_agent_worst_case(
    gamma: float = DEFAULT_GAMMA,
    v_M: float = DEFAULT_V_MAX,
    K_r_multiplier: float = 1.0,
    d0: float = 30.0,
    *,
    safety: Optional[SafetyConfig] = None,
    avoidance_enabled: bool = True,
    dt: float = DEFAULT_DT,
    t_final: float = 30.0,
    transient_delay: float = 0.0,
    bisector: VecLike = DEFAULT_BISECTOR,
    relay_position: VecLike = (0.0, 0.0),
) -> Scenario:
    """
    Agent 1 escapes from border 1 while agent 2 sits phi* inward of border 2.

    Agent 2 moves with the relay's initial velocity (clamped to v_M) so its
    bearing holds near the minimizing offset phi*. When phi* = 0 it sits on
    border 2 and escapes perpendicular to it instead.
    """
    safety = safety or SafetyConfig()
    _check_d0(d0, safety)
    fov = make_fov(bisector, gamma)
    gains = GainSpec.from_multiplier(v_M, gamma, 2, K_r_multiplier)
    p_r = as_vec2(relay_position)
    phi = phi_star(gamma).phi_star

    p1 = p_r + d0 * fov.g_fov1
    p2 = p_r + d0 * rotate(gamma - phi, fov.bisector)
    v1 = v_M * rotate(-math.pi / 2, fov.g_fov1)
    if phi == 0.0:
        v2 = v_M * rotate(math.pi / 2, fov.g_fov2)
    else:
        G, _ = bearings(p_r, np.vstack([p1, p2]))
        v2 = clamp_speed(decide(G, fov, gains.K_r).u_r, v_M)

    return Scenario(
        fov=fov,
        gains=gains,
        safety=safety,
        avoidance_enabled=avoidance_enabled,
        agent_models=(ConstantVelocity(v=v1), ConstantVelocity(v=v2)),
        initial=WorldState(t=0.0, p_r=p_r, agents=[p1, p2]),
        dt=dt,
        t_final=t_final,
        transient_delay=transient_delay,
        name="two_agent_worst_case",
    )


def scenario_dancing(
    n: int = 2,
    crossings: int = 5,
    gamma: float = DEFAULT_GAMMA,
    v_M: float = DEFAULT_V_MAX,
    K_r_multiplier: float = 1.0,
    *,
    distance: float = 200.0,
    safety: Optional[SafetyConfig] = None,
    avoidance_enabled: bool = True,
    dt: float = DEFAULT_DT,
    t_final: float = 30.0,
    transient_delay: float = 0.0,
) -> Scenario:
    """
    One agent swaying across the bisector while n-1 others wait to its left.

    The static agents sit at x = -(6 + 1.5 k) m and the oscillator sways
    around x = 0, all `distance` metres below the relay. Its frequency fits
    crossings + 1.5 half-periods in t_final and its peak speed is 0.96 v_M.
    """
    if n < 2:
        raise ScenarioError(f"the dancing scenario needs n >= 2, got {n}")
    if crossings < 1:
        raise ScenarioError(f"crossings must be positive, got {crossings}")
    safety = safety or SafetyConfig()
    fov = make_fov(DEFAULT_BISECTOR, gamma)
    omega = math.pi * (crossings + 1.5) / t_final
    amplitude = 0.96 * v_M / omega

    oscillator = BisectorOscillator(anchor=(0.0, -distance), amplitude=amplitude, omega=omega)
    positions = [oscillator.anchor]
    models: list = [oscillator]
    for k in range(n - 1):
        positions.append(np.array([-(6.0 + 1.5 * k), -distance]))
        models.append(Static())

    return Scenario(
        fov=fov,
        gains=GainSpec.from_multiplier(v_M, gamma, n, K_r_multiplier),
        safety=safety,
        avoidance_enabled=avoidance_enabled,
        agent_models=tuple(models),
        initial=WorldState(t=0.0, p_r=(0.0, 0.0), agents=positions),
        dt=dt,
        t_final=t_final,
        transient_delay=transient_delay,
        name="dancing",
    )


def _triangle(center: np.ndarray, size: float) -> tuple:
    return tuple(
        tuple(center + size * np.array([math.cos(a), math.sin(a)]))
        for a in (-math.pi / 2, math.pi / 6, 5 * math.pi / 6)
    )


def scenario_patrol(
    radius: float = 20.0,
    center: Sequence[float] = (0.0, -60.0),
    angular_rate: float = 0.2,
    gamma: float = DEFAULT_GAMMA,
    v_M: float = DEFAULT_V_MAX,
    K_r_multiplier: float = 1.0,
    *,
    triangle_speed: float = 3.0,
    safety: Optional[SafetyConfig] = None,
    avoidance_enabled: bool = True,
    dt: float = DEFAULT_DT,
    t_final: float = 30.0,
    transient_delay: float = 0.0,
) -> Scenario:
    """
    Five patrolling agents: one on a circle, three on triangles, one static.

    Agent 1 starts on the rightmost point of the circle; the triangles are
    spread around the centre at 0.45 R and agent 5 holds the centre. The
    relay starts R + 5 m right of and 60 m above the centre, so every agent
    initially lies left of the bisector and the regime switches once agent 1
    passes to its right.
    """
    safety = safety or SafetyConfig()
    c = as_vec2(center)
    fov = make_fov(DEFAULT_BISECTOR, gamma)

    circle = CirclePath(center=c, radius=radius, angular_rate=angular_rate)
    models: list = [circle]
    positions = [circle.start(0.0)]
    for k in range(3):
        a = math.pi / 2 + 2 * math.pi * k / 3
        tri = WaypointLoop(points=_triangle(c + 0.45 * radius * np.array([math.cos(a), math.sin(a)]), 0.2 * radius),
                           speed=triangle_speed)
        models.append(tri)
        positions.append(np.array(tri.points[0]))
    models.append(Static())
    positions.append(c)

    return Scenario(
        fov=fov,
        gains=GainSpec.from_multiplier(v_M, gamma, 5, K_r_multiplier),
        safety=safety,
        avoidance_enabled=avoidance_enabled,
        agent_models=tuple(models),
        initial=WorldState(t=0.0, p_r=c + np.array([radius + 5.0, 60.0]), agents=positions),
        dt=dt,
        t_final=t_final,
        transient_delay=transient_delay,
        name="patrol",
    )
