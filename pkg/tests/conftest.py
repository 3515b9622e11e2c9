"""
Shared fixtures: the default cone, bearing helpers and clean settings.
"""

import json
import math
import os

import numpy as np
import pytest

from fov_relay.geometry import make_fov, rotate
from relay_app.config import get_settings

GAMMA = math.pi / 4
V_MAX = 5.0
BISECTOR = (0.0, -1.0)


@pytest.fixture
def fov():
    """gamma = pi/4 cone looking down the -y axis."""
    return make_fov(BISECTOR, GAMMA)


@pytest.fixture
def at_angle(fov):
    """Bearing at a signed angle from the bisector (negative is towards border 1)."""
    def _at(theta: float) -> np.ndarray:
        return rotate(theta, fov.bisector)
    return _at


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Isolate each test from the caller's RELAY_* environment."""
    for key in list(os.environ):
        if key.startswith("RELAY_"):
            monkeypatch.delenv(key, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def write_config(tmp_path):
    """Write a scenario document and return its path as a string."""
    def _write(data: dict, name: str = "scenario.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return _write
