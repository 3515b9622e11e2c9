"""
Controller: bearing-only switching control laws for the relay vehicle.
Side labelling, the side discriminator, closest-to-border selection and the
single/general control laws plus critical-gain selection.
"""

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from . import qgamma
from .exceptions import DomainError
from .geometry import FovConfig, UnitVec2, Vec2, project

BearingSet = NDArray[np.float64]
BearingsLike = Union[BearingSet, Sequence[Sequence[float]]]

# Zero band of sign(); |x| below it counts as on the bisector
TOL_SIDE = 1e-12


class SideLabel(IntEnum):
    """Which half of the cone a bearing lies in."""
    ON_BISECTOR = 1
    LEFT = 2
    RIGHT = 3


class Branch(str, Enum):
    """Active branch of the general control law."""
    SAME_SIDE = "same_side"
    OPPOSITE_SIDES = "opposite_sides"


@dataclass(frozen=True)
class SideCounts:
    sigma1: int
    sigma2: int
    sigma3: int

    @property
    def n(self) -> int:
        return self.sigma1 + self.sigma2 + self.sigma3


@dataclass(frozen=True)
class GainSpec:
    """Speed bound, half-angle, agent count and the gain actually applied."""
    v_M: float
    gamma: float
    n: int
    K_r: float

    def __post_init__(self):
        if self.v_M <= 0:
            raise DomainError(f"v_M must be positive, got {self.v_M}")
        if self.K_r <= 0:
            raise DomainError(f"K_r must be positive, got {self.K_r}")
        if self.n < 1:
            raise DomainError(f"at least one agent is required, got n={self.n}")

    @property
    def critical(self) -> float:
        """Critical gain K_rc for this speed bound, angle and agent count."""
        return critical_gain(self.v_M, self.gamma, self.n)

    @property
    def multiplier(self) -> float:
        return self.K_r / self.critical

    @classmethod
    def from_multiplier(cls, v_M: float, gamma: float, n: int, multiplier: float) -> "GainSpec":
        """Build a GainSpec with K_r = multiplier * K_rc."""
        return cls(v_M=v_M, gamma=gamma, n=n, K_r=multiplier * critical_gain(v_M, gamma, n))


@dataclass(frozen=True)
class ControlDecision:
    """Relay control input plus the diagnostics of the branch that produced it."""
    u_r: Vec2
    chi_n: int
    selected: tuple[int, ...]
    branch: Branch


def as_bearing_set(bearings: BearingsLike) -> BearingSet:
    """
    Stack bearings into an (n, 2) float64 array.

    Raises:
        ValueError: if the set is empty, malformed or holds non-unit vectors.
    """
    arr = np.asarray(bearings, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise ValueError(f"expected a non-empty (n, 2) bearing set, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("bearing set contains non-finite values")
    norms = np.hypot(arr[:, 0], arr[:, 1])
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError(f"bearings must be unit vectors, got norms {norms}")
    return arr


def _sign(x: float) -> int:
    if abs(x) <= TOL_SIDE:
        return 0
    return 1 if x > 0 else -1


# ==================== Side discrimination ====================

def side(g_ri: UnitVec2, fov: FovConfig) -> SideLabel:
    """Label a bearing by the sign of g^T (g_fov2 - g_fov1)."""
    s = _sign(float(np.asarray(g_ri) @ fov.border_gap))
    if s == 0:
        return SideLabel.ON_BISECTOR
    return SideLabel.LEFT if s < 0 else SideLabel.RIGHT


def side_counts(labels: Iterable[SideLabel]) -> SideCounts:
    """Count how many labels fall in each class."""
    counts = {SideLabel.ON_BISECTOR: 0, SideLabel.LEFT: 0, SideLabel.RIGHT: 0}
    for label in labels:
        counts[SideLabel(label)] += 1
    return SideCounts(
        sigma1=counts[SideLabel.ON_BISECTOR],
        sigma2=counts[SideLabel.LEFT],
        sigma3=counts[SideLabel.RIGHT],
    )


def xi_n(counts: SideCounts) -> int:
    """Side discriminator on the label counts."""
    n = counts.n
    if 2 <= max(counts.sigma2, counts.sigma3) == n - counts.sigma1:
        return 1
    if counts.sigma1 >= n - 1:
        return 0
    return -1


def _side_counts_array(bearings: BearingSet, fov: FovConfig) -> SideCounts:
    values = bearings @ fov.border_gap
    on = np.abs(values) <= TOL_SIDE
    left = (values < 0) & ~on
    right = (values > 0) & ~on
    return SideCounts(int(on.sum()), int(left.sum()), int(right.sum()))


def chi_n(bearings: BearingsLike, fov: FovConfig) -> int:
    """
    Generalized side discriminator.

    Returns:
        +1 if at least two agents lie off the bisector and all of them on the
        same side, 0 if at most one lies off the bisector, -1 otherwise.
    """
    return xi_n(_side_counts_array(as_bearing_set(bearings), fov))


def chi_2(g_r1: UnitVec2, g_r2: UnitVec2, fov: FovConfig) -> int:
    """Two-agent discriminator sign(g_r1^T P_{g*} g_r2)."""
    return _sign(float(np.asarray(g_r1) @ project(fov.bisector, np.asarray(g_r2, dtype=np.float64))))


# ==================== Closest-to-border selection ====================

def closest_to_border(bearings: BearingsLike, fov: FovConfig) -> int:
    """Index of the bearing with the largest projection on either border."""
    dots = as_bearing_set(bearings) @ fov.borders.T
    # np.argmax returns the first maximum, i.e. the lowest index on ties
    return int(np.argmax(dots.max(axis=1)))


def closest_per_border(bearings: BearingsLike, fov: FovConfig) -> tuple[int, int]:
    """Indices of the bearings closest to border 1 and to border 2."""
    dots = as_bearing_set(bearings) @ fov.borders.T
    return int(np.argmax(dots[:, 0])), int(np.argmax(dots[:, 1]))


# ==================== Control laws ====================

def control_single(g_r1: UnitVec2, fov: FovConfig, K_r: float) -> Vec2:
    """Single-agent law u_r = -K_r P_{g_r1} g*."""
    if K_r <= 0:
        raise DomainError(f"K_r must be positive, got {K_r}")
    return -K_r * project(np.asarray(g_r1, dtype=np.float64), fov.bisector)


def control_general(bearings: BearingsLike, fov: FovConfig, K_r: float) -> ControlDecision:
    """
    General n-agent switching law.

    With chi_n >= 0 the relay steers on the agent closest to any border; with
    chi_n < 0 it sums the projector terms of the agents closest to each border.

    Args:
        bearings: Bearing set g_r1 ... g_rn, shape (n, 2)
        fov: Cone the controller operates on
        K_r: Control gain

    Returns:
        ControlDecision with u_r, chi_n, selected indices and branch
    """
    if K_r <= 0:
        raise DomainError(f"K_r must be positive, got {K_r}")
    return decide(as_bearing_set(bearings), fov, K_r)


def decide(G: BearingSet, fov: FovConfig, K_r: float) -> ControlDecision:
    """control_general without input validation, for the integration loop."""
    chi = xi_n(_side_counts_array(G, fov))
    dots = G @ fov.borders.T
    b = fov.bisector
    if chi >= 0:
        k = int(np.argmax(dots.max(axis=1)))
        u = -K_r * project(G[k], b)
        return ControlDecision(u_r=u, chi_n=chi, selected=(k,), branch=Branch.SAME_SIDE)
    k1 = int(np.argmax(dots[:, 0]))
    k2 = int(np.argmax(dots[:, 1]))
    u = -K_r * (project(G[k1], b) + project(G[k2], b))
    return ControlDecision(u_r=u, chi_n=chi, selected=(k1, k2), branch=Branch.OPPOSITE_SIDES)


# ==================== Gain selection ====================

def critical_gain(v_M: float, gamma: float, n: int) -> float:
    """
    Critical gain K_rc.

    v_M / sin(gamma) for one agent, v_M / q*_gamma for two or more.
    """
    if v_M <= 0:
        raise DomainError(f"v_M must be positive, got {v_M}")
    if n < 1:
        raise DomainError(f"at least one agent is required, got n={n}")
    qgamma.check_gamma(gamma)
    if n == 1:
        return v_M / math.sin(gamma)
    return v_M / qgamma.q_star(gamma)


def conservative_gain_bound(v_M: float, gamma: float) -> float:
    """Upper bound v_M / sin^3(gamma) on the critical gain for any n."""
    qgamma.check_gamma(gamma)
    return v_M / math.sin(gamma) ** 3
