"""
Simulation Service: turns scenario documents into runs.
Parses and validates JSON configs, builds core Scenarios and runs sweeps.
"""

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger
from pydantic import ValidationError

from fov_relay import agents as agent_models
from fov_relay.avoidance import SafetyConfig
from fov_relay.controller import GainSpec
from fov_relay.exceptions import DomainError, InvalidAngle, MarginInfeasible, ScenarioError
from fov_relay.geometry import make_fov
from fov_relay.scenarios import (
    scenario_dancing,
    scenario_patrol,
    scenario_single_worst_case,
    scenario_two_agent_worst_case,
)
from fov_relay.simulator import Scenario, SimTrace, chi_switch_count, run
from fov_relay.world import WorldState

from ..config import get_settings
from ..exceptions import ConfigParseError, ConfigValidationError
from ..schemas.models import (
    BisectorOscillatorConfig,
    CirclePathConfig,
    ConstantVelocityConfig,
    FormationAgentConfig,
    ScenarioConfig,
    ScenarioKind,
    StaticConfig,
    SweepRow,
    WaypointLoopConfig,
)


# ==================== Config parsing ====================

def read_config(text: str) -> ScenarioConfig:
    """
    Parse and validate a scenario document.

    Raises:
        ConfigParseError: on malformed JSON, with line and column
        ConfigValidationError: on schema violations, naming the field
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict):
        raise ConfigParseError("top-level value must be an object", line=1, column=1)
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        field = ".".join(str(p) for p in err["loc"]) or None
        raise ConfigValidationError(err["msg"], field=field) from e


def load_config(path: str) -> ScenarioConfig:
    """Read a scenario document from disk (OSError propagates)."""
    return read_config(Path(path).read_text(encoding="utf-8"))


def serialize_config(config: ScenarioConfig) -> str:
    """
    Write a config back to JSON.

    gamma_rad is always written so the round trip reproduces the exact
    radian value; Python's float repr makes every number round-trip.
    """
    data = config.model_dump(mode="json")
    data["gamma_rad"] = config.gamma
    return json.dumps(data, indent=2)


# ==================== Scenario building ====================

def _agent_model(cfg, formation) -> tuple:
    """(model, initial position) for one agent config."""
    if isinstance(cfg, StaticConfig):
        return agent_models.Static(), cfg.position
    if isinstance(cfg, ConstantVelocityConfig):
        return agent_models.ConstantVelocity(v=cfg.velocity, stop_time=cfg.stop_time), cfg.position
    if isinstance(cfg, WaypointLoopConfig):
        return agent_models.WaypointLoop(points=tuple(cfg.points), speed=cfg.speed), cfg.points[0]
    if isinstance(cfg, CirclePathConfig):
        circle = agent_models.CirclePath(center=cfg.center, radius=cfg.radius, angular_rate=cfg.angular_rate)
        return circle, circle.start(cfg.phase)
    if isinstance(cfg, BisectorOscillatorConfig):
        osc = agent_models.BisectorOscillator(
            anchor=cfg.anchor, amplitude=cfg.amplitude, omega=cfg.omega, drift=cfg.drift
        )
        return osc, cfg.anchor
    if isinstance(cfg, FormationAgentConfig):
        return agent_models.FormationAgent(spec=formation, gain=cfg.gain), cfg.position
    raise ConfigValidationError(f"unknown agent model {cfg!r}", field="agents")


def _custom_scenario(config: ScenarioConfig, safety: SafetyConfig, K_mult: float) -> Scenario:
    formation = None
    if config.formation is not None:
        formation = agent_models.FormationSpec(
            edges=tuple(tuple(e) for e in config.formation.edges),
            desired={tuple(e): np.asarray(g) for e, g in zip(config.formation.edges, config.formation.desired_bearings)},
        )
    models, positions = zip(*(_agent_model(a, formation) for a in config.agents))
    n = len(models)
    return Scenario(
        fov=make_fov(config.bisector, config.gamma),
        gains=GainSpec.from_multiplier(config.v_max, config.gamma, n, K_mult),
        safety=safety,
        avoidance_enabled=config.avoidance,
        agent_models=tuple(models),
        initial=WorldState(t=0.0, p_r=config.relay_position, agents=np.array(positions, dtype=float)),
        dt=config.dt,
        t_final=config.t_final,
        transient_delay=config.transient_delay,
        name="custom",
    )


def _build(config: ScenarioConfig) -> Scenario:
    safety = SafetyConfig(eps=config.epsilon, eps_s=config.epsilon_s, delta=config.delta)
    mult = config.kr_multiplier if config.kr_multiplier is not None else 1.0
    common = dict(
        safety=safety,
        avoidance_enabled=config.avoidance,
        dt=config.dt,
        t_final=config.t_final,
        transient_delay=config.transient_delay,
    )
    kind = config.scenario
    if kind == ScenarioKind.SINGLE_WORST_CASE:
        scenario = scenario_single_worst_case(
            config.gamma, config.v_max, mult, config.d0,
            escape_duration=config.escape_duration,
            bisector=config.bisector, relay_position=config.relay_position, **common,
        )
    elif kind == ScenarioKind.TWO_AGENT_WORST_CASE:
        scenario = scenario_two_agent_worst_case(
            config.gamma, config.v_max, mult, config.d0,
            bisector=config.bisector, relay_position=config.relay_position, **common,
        )
    elif kind == ScenarioKind.DANCING:
        scenario = scenario_dancing(
            config.n_agents, config.crossings, config.gamma, config.v_max, mult,
            distance=config.dancing_distance, **common,
        )
    elif kind == ScenarioKind.PATROL:
        scenario = scenario_patrol(
            config.patrol_radius, config.patrol_center, config.patrol_angular_rate,
            config.gamma, config.v_max, mult, **common,
        )
    else:
        scenario = _custom_scenario(config, safety, mult)

    if config.kr_absolute is not None:
        gains = GainSpec(v_M=config.v_max, gamma=config.gamma, n=scenario.n, K_r=config.kr_absolute)
        scenario = dataclasses.replace(scenario, gains=gains)
    threshold = get_settings().fov_violation_threshold
    if threshold != scenario.violation_threshold:
        scenario = dataclasses.replace(scenario, violation_threshold=threshold)
    return scenario


def build_scenario(config: ScenarioConfig) -> Scenario:
    """
    Build the core Scenario a config describes.

    Raises:
        ConfigValidationError: when the scenario violates a core invariant,
            e.g. an agent starting outside the field of view.
    """
    try:
        return _build(config)
    except (ScenarioError, InvalidAngle, DomainError, MarginInfeasible, ValueError) as e:
        raise ConfigValidationError(str(e), field="scenario") from e


def parse_config(text: str) -> Scenario:
    """Parse a scenario document straight into a validated Scenario."""
    return build_scenario(read_config(text))


# ==================== Runs and sweeps ====================

def _sweep_one(config_text: str, multiplier: float) -> SweepRow:
    config = read_config(config_text).model_copy(update={"kr_multiplier": multiplier, "kr_absolute": None})
    trace = run(build_scenario(config))
    return SweepRow(
        multiplier=multiplier,
        k_r=trace.scenario.gains.K_r,
        min_margin=trace.min_margin,
        violation=bool(trace.fov_violations),
        min_distance=trace.min_distance,
        switch_count=chi_switch_count(trace),
    )


class SimulationService:
    """Service for building and running relay scenarios."""

    def __init__(self, workers: int = 1):
        self.workers = workers

    def run(self, config: ScenarioConfig) -> SimTrace:
        """Run one scenario config."""
        return run(build_scenario(config))

    def sweep(self, config: ScenarioConfig, multipliers: Sequence[float], workers: Optional[int] = None) -> List[SweepRow]:
        """
        Run the config once per gain multiplier.

        Rows come back in the order of `multipliers`, whatever the order in
        which parallel runs finish.
        """
        if not multipliers:
            raise ConfigValidationError("at least one multiplier is required", field="multipliers")
        # Validate once up front so a bad config fails before any run starts
        build_scenario(config)
        text = serialize_config(config)
        workers = workers or self.workers
        logger.info("sweeping {} multipliers with {} worker(s)", len(multipliers), workers)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(_sweep_one, [text] * len(multipliers), multipliers))
        return [_sweep_one(text, m) for m in multipliers]


# Singleton instance
_simulation_service: Optional[SimulationService] = None


def get_simulation_service() -> SimulationService:
    """Get or create simulation service instance."""
    global _simulation_service
    if _simulation_service is None:
        _simulation_service = SimulationService(workers=get_settings().sweep_workers)
    return _simulation_service
