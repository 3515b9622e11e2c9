"""
Snapshot of the relay and agent positions at one instant.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .geometry import Vec2, bearings


@dataclass(frozen=True, eq=False)
class WorldState:
    t: float
    p_r: Vec2
    agents: NDArray[np.float64]

    def __post_init__(self):
        p_r = np.array(self.p_r, dtype=np.float64).reshape(2)
        agents = np.array(self.agents, dtype=np.float64).reshape(-1, 2)
        if not (np.all(np.isfinite(p_r)) and np.all(np.isfinite(agents))):
            raise ValueError("world state contains non-finite positions")
        p_r.setflags(write=False)
        agents.setflags(write=False)
        object.__setattr__(self, "p_r", p_r)
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return self.agents.shape[0]

    def distances(self) -> NDArray[np.float64]:
        """Relay-to-agent ranges d_ri."""
        diff = self.agents - self.p_r
        return np.hypot(diff[:, 0], diff[:, 1])

    def bearings(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Relay-to-agent bearings and ranges."""
        return bearings(self.p_r, self.agents)
