"""
Pydantic schemas for scenario configuration and command results.
"""

import math
from enum import Enum
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import get_settings

Vec = Tuple[float, float]


# ==================== Agent Schemas ====================

class StaticConfig(BaseModel):
    """Agent holding its position."""
    model_config = ConfigDict(extra="forbid")
    model: Literal["static"] = "static"
    position: Vec


class ConstantVelocityConfig(BaseModel):
    """Agent moving with a constant world-frame velocity."""
    model_config = ConfigDict(extra="forbid")
    model: Literal["constant_velocity"] = "constant_velocity"
    position: Vec
    velocity: Vec
    stop_time: Optional[float] = Field(None, ge=0)


class WaypointLoopConfig(BaseModel):
    """Agent looping through waypoints; starts on the first one."""
    model_config = ConfigDict(extra="forbid")
    model: Literal["waypoint_loop"] = "waypoint_loop"
    points: List[Vec] = Field(..., min_length=2)
    speed: float = Field(..., gt=0)


class CirclePathConfig(BaseModel):
    """Agent circling a centre; starts at angle `phase` from the +x axis."""
    model_config = ConfigDict(extra="forbid")
    model: Literal["circle_path"] = "circle_path"
    center: Vec
    radius: float = Field(..., gt=0)
    angular_rate: float
    phase: float = 0.0


class BisectorOscillatorConfig(BaseModel):
    """Agent swaying along x around its anchor; starts on the anchor."""
    model_config = ConfigDict(extra="forbid")
    model: Literal["bisector_oscillator"] = "bisector_oscillator"
    anchor: Vec
    amplitude: float
    omega: float
    drift: Vec = (0.0, 0.0)


class FormationAgentConfig(BaseModel):
    """Agent running the bearing formation law of the scenario's formation."""
    model_config = ConfigDict(extra="forbid")
    model: Literal["formation"] = "formation"
    position: Vec
    gain: float = Field(1.0, gt=0)


AgentConfig = Annotated[
    Union[
        StaticConfig,
        ConstantVelocityConfig,
        WaypointLoopConfig,
        CirclePathConfig,
        BisectorOscillatorConfig,
        FormationAgentConfig,
    ],
    Field(discriminator="model"),
]


class FormationConfig(BaseModel):
    """Directed edges with their desired bearings, paired by position."""
    model_config = ConfigDict(extra="forbid")
    edges: List[Tuple[int, int]] = Field(..., min_length=1)
    desired_bearings: List[Vec]

    @model_validator(mode="after")
    def check_lengths(self) -> "FormationConfig":
        if len(self.edges) != len(self.desired_bearings):
            raise ValueError("edges and desired_bearings must have the same length")
        return self


# ==================== Scenario Schema ====================

class ScenarioKind(str, Enum):
    SINGLE_WORST_CASE = "single_worst_case"
    TWO_AGENT_WORST_CASE = "two_agent_worst_case"
    DANCING = "dancing"
    PATROL = "patrol"
    CUSTOM = "custom"


class ScenarioConfig(BaseModel):
    """
    Scenario document. Angles are in degrees; gamma_rad, when present,
    overrides gamma_deg with an exact radian value.
    """
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioKind = ScenarioKind.SINGLE_WORST_CASE

    # FoV and gains
    gamma_deg: float = Field(45.0, gt=0, le=90)
    gamma_rad: Optional[float] = Field(None, gt=0, le=math.pi / 2)
    v_max: float = Field(5.0, gt=0)
    kr_multiplier: Optional[float] = Field(None, gt=0)
    kr_absolute: Optional[float] = Field(None, gt=0)

    # Timing
    dt: float = Field(default_factory=lambda: get_settings().default_dt, gt=0, le=0.1)
    t_final: float = Field(default_factory=lambda: get_settings().default_t_final, gt=0)

    # Safety
    epsilon: float = Field(5.0, gt=0)
    epsilon_s: float = Field(10.0, gt=0)
    delta: float = Field(0.01, gt=0, le=1)
    avoidance: bool = True
    transient_delay: float = Field(0.0, ge=0)

    # Reference scenario parameters
    d0: float = Field(30.0, gt=0)
    escape_duration: Optional[float] = Field(None, gt=0)
    n_agents: int = Field(2, ge=2)
    crossings: int = Field(5, ge=1)
    dancing_distance: float = Field(200.0, gt=0)
    patrol_radius: float = Field(20.0, gt=0)
    patrol_center: Vec = (0.0, -60.0)
    patrol_angular_rate: float = 0.2

    # Custom scenarios
    bisector: Vec = (0.0, -1.0)
    relay_position: Vec = (0.0, 0.0)
    agents: List[AgentConfig] = Field(default_factory=list)
    formation: Optional[FormationConfig] = None

    @model_validator(mode="after")
    def check_consistency(self) -> "ScenarioConfig":
        if self.kr_multiplier is not None and self.kr_absolute is not None:
            raise ValueError("set at most one of kr_multiplier and kr_absolute")
        if self.epsilon >= self.epsilon_s:
            raise ValueError("epsilon must be smaller than epsilon_s")
        if self.bisector == (0.0, 0.0):
            raise ValueError("bisector must be a nonzero vector")
        if self.scenario == ScenarioKind.CUSTOM and not self.agents:
            raise ValueError("a custom scenario needs at least one agent")
        uses_formation = any(isinstance(a, FormationAgentConfig) for a in self.agents)
        if uses_formation and self.formation is None:
            raise ValueError("formation agents need a 'formation' section")
        return self

    @property
    def gamma(self) -> float:
        """Half-angle in radians."""
        if self.gamma_rad is not None:
            return self.gamma_rad
        return math.radians(self.gamma_deg)


# ==================== Result Schemas ====================

class GainTable(BaseModel):
    """Gain selection for one (gamma, v_max, n) triple."""
    gamma_deg: float
    v_max: float
    n: int
    k_star: float
    k_q: float
    k_conservative: float
    k_critical: float
    q_star: float
    phi_star_deg: float


class SweepRow(BaseModel):
    """Outcome of one multiplier in a gain sweep."""
    multiplier: float
    k_r: float
    min_margin: float
    violation: bool
    min_distance: float
    switch_count: int


class CriterionResult(BaseModel):
    """Outcome of one acceptance criterion."""
    name: str
    passed: bool
    detail: str = ""
