"""
fov_relay: bearing-only guidance of a relay vehicle that keeps a group of
agents inside its limited field of view.
"""

from .avoidance import SafetyConfig, avoidance_term, relay_velocity
from .controller import Branch, ControlDecision, GainSpec, control_general, critical_gain
from .exceptions import RelaySimError
from .geometry import FovConfig, make_fov
from .simulator import Scenario, SimTrace, run, step
from .world import WorldState

__all__ = [
    "Branch",
    "ControlDecision",
    "FovConfig",
    "GainSpec",
    "RelaySimError",
    "SafetyConfig",
    "Scenario",
    "SimTrace",
    "WorldState",
    "avoidance_term",
    "control_general",
    "critical_gain",
    "make_fov",
    "relay_velocity",
    "run",
    "step",
]
