"""
Scripted agent motion models.

Each model returns a velocity from the current world state; agent_velocity
clamps it to the speed bound v_M so no model can break the bounded-speed
assumption the gains are designed against.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np
from numpy.typing import NDArray

from .exceptions import ScenarioError
from .geometry import Vec2, as_vec2, bearing, project
from .world import WorldState

_ZERO = np.zeros(2)


def _frozen(v) -> Vec2:
    arr = as_vec2(v).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Static:
    def velocity(self, state: WorldState, index: int) -> Vec2:
        return _ZERO.copy()


@dataclass(frozen=True, eq=False)
class ConstantVelocity:
    """Constant world-frame velocity, optionally held only until stop_time."""
    v: Vec2
    stop_time: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "v", _frozen(self.v))

    def velocity(self, state: WorldState, index: int) -> Vec2:
        if self.stop_time is not None and state.t >= self.stop_time:
            return _ZERO.copy()
        return np.array(self.v)


@dataclass(frozen=True, eq=False)
class WaypointLoop:
    """
    Closed polygonal path travelled at constant speed.

    The agent is assumed to start on points[0]; its velocity is fixed by the
    arc length speed * t, so positions never drift off the loop segments.
    """
    points: tuple
    speed: float

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64).reshape(-1, 2)
        if pts.shape[0] < 2:
            raise ScenarioError("a waypoint loop needs at least 2 points")
        closed = np.vstack([pts, pts[:1]])
        seg = np.diff(closed, axis=0)
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(lengths <= 0.0):
            raise ScenarioError("consecutive waypoints must be distinct")
        object.__setattr__(self, "points", tuple(tuple(float(c) for c in p) for p in pts))
        object.__setattr__(self, "_directions", seg / lengths[:, None])
        object.__setattr__(self, "_cumulative", np.concatenate([[0.0], np.cumsum(lengths)]))

    @property
    def perimeter(self) -> float:
        return float(self._cumulative[-1])

    def velocity(self, state: WorldState, index: int) -> Vec2:
        s = (self.speed * state.t) % self.perimeter
        k = int(np.searchsorted(self._cumulative, s, side="right")) - 1
        k = min(k, len(self._directions) - 1)
        return self.speed * self._directions[k]


@dataclass(frozen=True, eq=False)
class CirclePath:
    """Rotation about center at angular_rate (counterclockwise if positive)."""
    center: Vec2
    radius: float
    angular_rate: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen(self.center))
        if self.radius <= 0:
            raise ScenarioError(f"circle radius must be positive, got {self.radius}")

    def start(self, phase: float = 0.0) -> Vec2:
        """Point of the circle at angle phase from the +x axis."""
        return self.center + self.radius * np.array([math.cos(phase), math.sin(phase)])

    def velocity(self, state: WorldState, index: int) -> Vec2:
        rel = state.agents[index] - self.center
        return self.angular_rate * np.array([-rel[1], rel[0]])


@dataclass(frozen=True, eq=False)
class BisectorOscillator:
    """p(t) = anchor + drift t + amplitude sin(omega t) x_hat."""
    anchor: Vec2
    amplitude: float
    omega: float
    drift: Vec2 = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        object.__setattr__(self, "anchor", _frozen(self.anchor))
        object.__setattr__(self, "drift", _frozen(self.drift))

    def velocity(self, state: WorldState, index: int) -> Vec2:
        sway = self.amplitude * self.omega * math.cos(self.omega * state.t)
        return self.drift + np.array([sway, 0.0])


@dataclass(frozen=True, eq=False)
class FormationSpec:
    """
    Bearing formation: directed edges (i, j) with desired bearings g*_ij.

    An edge (i, j) also constrains agent j through g*_ji = -g*_ij.
    """
    edges: tuple[tuple[int, int], ...]
    desired: Mapping[tuple[int, int], Vec2]

    def __post_init__(self):
        desired = {}
        for edge in self.edges:
            if edge not in self.desired:
                raise ScenarioError(f"missing desired bearing for edge {edge}")
            g = as_vec2(self.desired[edge])
            if abs(float(np.hypot(*g)) - 1.0) > 1e-9:
                raise ScenarioError(f"desired bearing of edge {edge} is not unit norm")
            desired[tuple(edge)] = g
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "desired", desired)

    def validate(self, n: int) -> None:
        for i, j in self.edges:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ScenarioError(f"edge ({i}, {j}) does not join two distinct agents out of {n}")

    def neighbors(self, index: int) -> list[tuple[int, Vec2]]:
        """(neighbor, desired bearing from index to neighbor) pairs."""
        out = []
        for (i, j), g in self.desired.items():
            if i == index:
                out.append((j, g))
            elif j == index:
                out.append((i, -g))
        return out


@dataclass(frozen=True)
class FormationAgent:
    """Agent running the gradient-like bearing formation law."""
    spec: FormationSpec
    gain: float = 1.0

    def velocity(self, state: WorldState, index: int) -> Vec2:
        return self.gain * formation_velocity(self.spec, state.agents, index)


AgentModel = Union[Static, ConstantVelocity, WaypointLoop, CirclePath, BisectorOscillator, FormationAgent]


def clamp_speed(v: Vec2, v_M: float) -> Vec2:
    """Rescale v to norm v_M if it is faster, keeping its direction."""
    speed = math.hypot(v[0], v[1])
    if speed > v_M:
        return v * (v_M / speed)
    return v


def agent_velocity(model: AgentModel, state: WorldState, index: int, v_M: float) -> Vec2:
    """Velocity of agent `index` under its model, clamped to v_M."""
    return clamp_speed(model.velocity(state, index), v_M)


def formation_velocity(spec: FormationSpec, positions: NDArray[np.float64], index: int) -> Vec2:
    """-sum over neighbors of P_{g_ij} g*_ij; zero when every bearing matches."""
    v = np.zeros(2)
    p_i = positions[index]
    for j, g_star in spec.neighbors(index):
        g_ij = bearing(p_i, positions[j])
        v -= project(g_ij, g_star)
    return v


def formation_error(spec: FormationSpec, positions: NDArray[np.float64]) -> float:
    """Largest ||g_ij - g*_ij|| over the formation edges."""
    worst = 0.0
    for (i, j), g_star in spec.desired.items():
        g_ij = bearing(positions[i], positions[j])
        worst = max(worst, float(np.linalg.norm(g_ij - g_star)))
    return worst
