"""
Fixed-step simulation of the relay closed loop against scripted agents.

Explicit Euler with simultaneous updates: every velocity of a step is
computed from the pre-step state, then all positions advance together.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from loguru import logger
from numpy.typing import NDArray

from .agents import AgentModel, FormationAgent, agent_velocity
from .avoidance import SafetyConfig, alert, avoidance_term
from .controller import Branch, GainSpec, decide
from .exceptions import CollisionError, ScenarioError
from .geometry import (
    MIN_DISTANCE,
    FovConfig,
    angular_margins,
    bearings,
    in_fov_many,
    safe_fov,
    transient_margin,
)
from .world import WorldState

DEFAULT_DT = 1e-3
MAX_DT = 0.1
FOV_VIOLATION_THRESHOLD = -1e-3
# Multiplier C of the switch-continuity bound ||du|| <= C K_r sum(dtheta)
SWITCH_JUMP_CONSTANT = 4.0


class EventKind(str, Enum):
    CHI_SWITCH = "chi_switch"
    FOV_VIOLATION = "fov_violation"
    MIN_DISTANCE = "min_distance"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    t: float
    step: int
    agent: Optional[int] = None
    value: float = 0.0


@dataclass(frozen=True, eq=False)
class Scenario:
    """Everything a run needs: cone, gains, safety, agents and timing."""
    fov: FovConfig
    gains: GainSpec
    safety: SafetyConfig
    avoidance_enabled: bool
    agent_models: tuple
    initial: WorldState
    dt: float = DEFAULT_DT
    t_final: float = 30.0
    # Detection/computation delay T_r; shrinks the cone the controller steers on
    transient_delay: float = 0.0
    violation_threshold: float = FOV_VIOLATION_THRESHOLD
    name: str = "custom"
    control_fov: FovConfig = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "agent_models", tuple(self.agent_models))
        if not (0.0 < self.dt <= MAX_DT):
            raise ScenarioError(f"dt must lie in (0, {MAX_DT}], got {self.dt}")
        if self.t_final <= 0.0:
            raise ScenarioError(f"t_final must be positive, got {self.t_final}")
        n = self.initial.n
        if n < 1:
            raise ScenarioError("at least one agent is required")
        if len(self.agent_models) != n:
            raise ScenarioError(f"{len(self.agent_models)} agent models for {n} agents")
        if self.gains.n != n:
            raise ScenarioError(f"gains were selected for n={self.gains.n} but the scenario has {n} agents")
        if abs(self.gains.gamma - self.fov.gamma) > 1e-12:
            raise ScenarioError("gains and FoV disagree on gamma")
        for model in self.agent_models:
            if isinstance(model, FormationAgent):
                model.spec.validate(n)

        d = self.initial.distances()
        if np.any(d < self.safety.eps):
            i = int(np.argmin(d))
            raise ScenarioError(f"initial distance of agent {i} is {d[i]:.4f} m, below eps={self.safety.eps}")
        G, _ = bearings(self.initial.p_r, self.initial.agents)
        outside = np.flatnonzero(~in_fov_many(G, self.fov))
        if outside.size:
            raise ScenarioError(f"agents {outside.tolist()} start outside the field of view")

        cfov = self.fov
        if self.transient_delay > 0.0:
            lam = transient_margin(self.transient_delay, self.gains.v_M, self.safety.eps)
            cfov = safe_fov(self.fov, lam)
        object.__setattr__(self, "control_fov", cfov)

    @property
    def n(self) -> int:
        return self.initial.n

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True)
class StepRecord:
    """Quantities evaluated at one instant, before integration."""
    u_r: NDArray[np.float64]
    upsilon: NDArray[np.float64]
    relay_velocity: NDArray[np.float64]
    agent_velocities: NDArray[np.float64]
    chi_n: int
    branch: Branch
    selected: tuple[int, ...]
    d_r: float
    eta: float
    a_r: float
    w_r: float
    margins: NDArray[np.float64]
    in_fov: NDArray[np.bool_]


@dataclass(frozen=True, eq=False)
class SimTrace:
    """Per-step records of a run plus the events extracted from them."""
    scenario: Scenario
    t: NDArray[np.float64]
    p_r: NDArray[np.float64]
    agents: NDArray[np.float64]
    u_r: NDArray[np.float64]
    upsilon: NDArray[np.float64]
    chi_n: NDArray[np.int64]
    branch: NDArray[np.int64]  # 0 same side, 1 opposite sides
    selected: NDArray[np.int64]  # -1 where only one index was selected
    d_r: NDArray[np.float64]
    eta: NDArray[np.float64]
    a_r: NDArray[np.float64]
    w_r: NDArray[np.float64]
    margins: NDArray[np.float64]
    in_fov: NDArray[np.bool_]
    distances: NDArray[np.float64]
    events: tuple[Event, ...]

    @property
    def n(self) -> int:
        return self.agents.shape[1]

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    @property
    def fov_violations(self) -> list[Event]:
        return self.events_of(EventKind.FOV_VIOLATION)

    @property
    def min_margin(self) -> float:
        return float(self.margins.min())

    @property
    def min_distance(self) -> float:
        return float(self.distances.min())

    def world_at(self, k: int) -> WorldState:
        return WorldState(t=float(self.t[k]), p_r=self.p_r[k], agents=self.agents[k])


# ==================== Single step ====================

def evaluate(world: WorldState, scenario: Scenario) -> StepRecord:
    """Control, avoidance and agent velocities at the current state."""
    G, d = bearings(world.p_r, world.agents)
    gains = scenario.gains
    decision = decide(G, scenario.control_fov, gains.K_r)
    u_r = decision.u_r

    if scenario.avoidance_enabled:
        term = avoidance_term(world, scenario.safety, scenario.fov, gains.v_M, u_r)
        upsilon, d_r, eta, a_r, w_r = term.upsilon, term.proximity.d_r, term.eta, term.a_r, term.w_r
    else:
        near = d[d <= scenario.safety.eps_s]
        d_r = float(near.min()) if near.size else scenario.safety.eps_s
        eta = alert(d_r, scenario.safety)
        upsilon, a_r, w_r = np.zeros(2), 0.0, 0.0

    velocities = np.empty((world.n, 2))
    for i, model in enumerate(scenario.agent_models):
        velocities[i] = agent_velocity(model, world, i, gains.v_M)

    margins = angular_margins(G, scenario.fov)
    return StepRecord(
        u_r=u_r,
        upsilon=upsilon,
        relay_velocity=u_r + upsilon,
        agent_velocities=velocities,
        chi_n=decision.chi_n,
        branch=decision.branch,
        selected=decision.selected,
        d_r=d_r,
        eta=eta,
        a_r=a_r,
        w_r=w_r,
        margins=margins,
        in_fov=in_fov_many(G, scenario.fov),
    )


def _advance(world: WorldState, record: StepRecord, dt: float, t_next: float) -> WorldState:
    nxt = WorldState(
        t=t_next,
        p_r=world.p_r + dt * record.relay_velocity,
        agents=world.agents + dt * record.agent_velocities,
    )
    d = nxt.distances()
    if np.any(d <= MIN_DISTANCE):
        i = int(np.argmin(d))
        raise CollisionError(f"agent {i} collided with the relay at t={t_next:.6f} s")
    return nxt


def step(world: WorldState, scenario: Scenario) -> WorldState:
    """
    Advance the world by one explicit Euler step of scenario.dt.

    Raises:
        CollisionError: if an agent ends the step on top of the relay.
    """
    record = evaluate(world, scenario)
    return _advance(world, record, scenario.dt, world.t + scenario.dt)


# ==================== Full run ====================

def run(scenario: Scenario) -> SimTrace:
    """
    Integrate the scenario over [0, t_final] and extract its events.

    The trace holds t_final/dt + 1 rows; row k is the state at t = k dt
    together with the inputs evaluated there.
    """
    K = scenario.n_steps
    n = scenario.n
    dt = scenario.dt
    logger.info(
        "run {}: n={} K_r={:.4f} ({:.3f} x K_rc) dt={} t_final={} avoidance={}",
        scenario.name, n, scenario.gains.K_r, scenario.gains.multiplier, dt,
        scenario.t_final, scenario.avoidance_enabled,
    )

    t = np.arange(K + 1) * dt
    p_r = np.empty((K + 1, 2))
    agents = np.empty((K + 1, n, 2))
    u_r = np.empty((K + 1, 2))
    upsilon = np.empty((K + 1, 2))
    chi = np.empty(K + 1, dtype=np.int64)
    branch = np.empty(K + 1, dtype=np.int64)
    selected = np.full((K + 1, 2), -1, dtype=np.int64)
    d_r = np.empty(K + 1)
    eta = np.empty(K + 1)
    a_r = np.empty(K + 1)
    w_r = np.empty(K + 1)
    margins = np.empty((K + 1, n))
    in_fov = np.empty((K + 1, n), dtype=bool)

    world = WorldState(t=0.0, p_r=scenario.initial.p_r, agents=scenario.initial.agents)
    for k in range(K + 1):
        rec = evaluate(world, scenario)
        p_r[k] = world.p_r
        agents[k] = world.agents
        u_r[k] = rec.u_r
        upsilon[k] = rec.upsilon
        chi[k] = rec.chi_n
        branch[k] = 0 if rec.branch is Branch.SAME_SIDE else 1
        selected[k, : len(rec.selected)] = rec.selected
        d_r[k] = rec.d_r
        eta[k] = rec.eta
        a_r[k] = rec.a_r
        w_r[k] = rec.w_r
        margins[k] = rec.margins
        in_fov[k] = rec.in_fov
        if k < K:
            world = _advance(world, rec, dt, t[k + 1])

    diff = agents - p_r[:, None, :]
    distances = np.hypot(diff[..., 0], diff[..., 1])
    events = extract_events(t, chi, margins, distances, scenario.violation_threshold)

    trace = SimTrace(
        scenario=scenario, t=t, p_r=p_r, agents=agents, u_r=u_r, upsilon=upsilon,
        chi_n=chi, branch=branch, selected=selected, d_r=d_r, eta=eta, a_r=a_r,
        w_r=w_r, margins=margins, in_fov=in_fov, distances=distances, events=events,
    )
    logger.info(
        "run {} done: min margin {:.3e} rad, {} violation onsets, {} chi switches, min distance {:.4f} m",
        scenario.name, trace.min_margin, len(trace.fov_violations),
        chi_switch_count(trace), trace.min_distance,
    )
    return trace


def extract_events(
    t: NDArray[np.float64],
    chi: NDArray[np.int64],
    margins: NDArray[np.float64],
    distances: NDArray[np.float64],
    threshold: float = FOV_VIOLATION_THRESHOLD,
) -> tuple[Event, ...]:
    """
    Derive the event list from per-step records.

    A chi switch is a step whose nonzero chi_n has the opposite sign of the
    last nonzero value; a violation onset is the first step of every run of
    steps with margin below threshold.
    """
    events: list[Event] = []

    last = 0
    for k, c in enumerate(chi):
        c = int(c)
        if c == 0:
            continue
        if last != 0 and c != last:
            events.append(Event(EventKind.CHI_SWITCH, float(t[k]), k, value=float(c)))
            logger.debug("chi_n switched to {} at t={:.4f}", c, t[k])
        last = c

    outside = margins < threshold
    onset = outside.copy()
    onset[1:] &= ~outside[:-1]
    for k, i in zip(*np.nonzero(onset)):
        events.append(Event(EventKind.FOV_VIOLATION, float(t[k]), int(k), agent=int(i), value=float(margins[k, i])))
        logger.debug("agent {} left the field of view at t={:.4f} (margin {:.3e})", i, t[k], margins[k, i])

    k, i = np.unravel_index(int(np.argmin(distances)), distances.shape)
    events.append(Event(EventKind.MIN_DISTANCE, float(t[k]), int(k), agent=int(i), value=float(distances[k, i])))

    events.sort(key=lambda e: (e.step, e.kind.value))
    return tuple(events)


# ==================== Trace diagnostics ====================

def chi_switch_count(trace: SimTrace) -> int:
    return len(trace.events_of(EventKind.CHI_SWITCH))


def _bearing_angle_change(trace: SimTrace, k: int, i: int) -> float:
    a = trace.agents[k, i] - trace.p_r[k]
    b = trace.agents[k - 1, i] - trace.p_r[k - 1]
    cross = a[0] * b[1] - a[1] * b[0]
    return abs(math.atan2(cross, float(a @ b)))


def max_switch_jump_ratio(trace: SimTrace) -> float:
    """
    Largest ||u_r(t_k) - u_r(t_k-1)|| / (C K_r sum of bearing angle changes)
    over the chi switches of a trace, with the sum taken over the bearings
    selected on either side of the switch. Values <= 1 mean no O(1) jump.
    """
    K_r = trace.scenario.gains.K_r
    worst = 0.0
    for event in trace.events_of(EventKind.CHI_SWITCH):
        k = event.step
        if k == 0:
            continue
        jump = float(np.linalg.norm(trace.u_r[k] - trace.u_r[k - 1]))
        involved = {int(i) for i in trace.selected[k] if i >= 0} | {int(i) for i in trace.selected[k - 1] if i >= 0}
        bound = SWITCH_JUMP_CONSTANT * K_r * sum(_bearing_angle_change(trace, k, i) for i in involved)
        if bound > 0.0:
            worst = max(worst, jump / bound)
        elif jump > 1e-12:
            worst = math.inf
    return worst
