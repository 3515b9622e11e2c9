"""
Planar geometry for the relay field of view.
Bearings, projectors, rotations and the FoV cone with its membership test.

All vectors are float64 numpy arrays of shape (2,). Rotations are
counterclockwise-positive; border 1 of the cone is R_z(-gamma) applied to the
bisector and border 2 is R_z(gamma) applied to it.
"""

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .exceptions import CoincidentPoints, InvalidAngle, MarginInfeasible

Vec2 = NDArray[np.float64]
UnitVec2 = NDArray[np.float64]
Mat2 = NDArray[np.float64]
VecLike = Union[Vec2, Sequence[float]]

# Below this range a bearing is undefined
MIN_DISTANCE = 1e-9
# Slack on the cone half-planes; the border counts as inside
TOL_FOV = 1e-9

_EYE2 = np.eye(2)


def as_vec2(v: VecLike) -> Vec2:
    """Convert to a float64 (2,) array, rejecting NaN and Inf components."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (2,):
        raise ValueError(f"expected a planar vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite vector components: {arr}")
    return arr


def rotation_matrix(alpha: float) -> Mat2:
    """R_z(alpha), counterclockwise-positive."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]], dtype=np.float64)


def rotate(alpha: float, v: VecLike) -> Vec2:
    """Apply R_z(alpha) to v."""
    return rotation_matrix(alpha) @ as_vec2(v)


def perp(v: Vec2) -> Vec2:
    # R_z(pi/2) v without building the matrix
    return np.array([-v[1], v[0]], dtype=np.float64)


def bearing(p_from: VecLike, p_to: VecLike) -> UnitVec2:
    """
    Unit vector pointing from p_from to p_to.

    Raises:
        CoincidentPoints: if the two points are closer than MIN_DISTANCE.
    """
    diff = as_vec2(p_to) - as_vec2(p_from)
    dist = math.hypot(diff[0], diff[1])
    if dist <= MIN_DISTANCE:
        raise CoincidentPoints(f"points {p_from} and {p_to} are {dist:.3e} m apart")
    return diff / dist


def bearings(p_from: Vec2, points: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Bearings and ranges from one point to many.

    Args:
        p_from: Observer position, shape (2,)
        points: Target positions, shape (n, 2)

    Returns:
        (bearings, distances) with shapes (n, 2) and (n,)
    """
    diff = points - p_from
    dist = np.hypot(diff[:, 0], diff[:, 1])
    if np.any(dist <= MIN_DISTANCE):
        idx = int(np.argmin(dist))
        raise CoincidentPoints(f"agent {idx} coincides with the observer (d={dist[idx]:.3e} m)")
    return diff / dist[:, None], dist


def projector(g: UnitVec2) -> Mat2:
    """Orthogonal projector I - g g^T onto the line normal to g."""
    return _EYE2 - np.outer(g, g)


def project(g: UnitVec2, v: Vec2) -> Vec2:
    """P_g v, computed without forming the matrix."""
    return v - (g @ v) * g


@dataclass(frozen=True, eq=False)
class FovConfig:
    """The relay's sensing cone: two border vectors, half-angle and bisector."""

    g_fov1: UnitVec2
    g_fov2: UnitVec2
    gamma: float
    bisector: UnitVec2
    # Inward normals of the two half-planes bounding the cone
    normal1: Vec2 = field(init=False, repr=False, compare=False)
    normal2: Vec2 = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("g_fov1", "g_fov2", "bisector"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n1 = perp(self.g_fov1)
        n2 = perp(self.g_fov2)
        n1.setflags(write=False)
        n2.setflags(write=False)
        object.__setattr__(self, "normal1", n1)
        object.__setattr__(self, "normal2", n2)

    @property
    def border_gap(self) -> Vec2:
        """g_fov2 - g_fov1, the side discriminator direction."""
        return self.g_fov2 - self.g_fov1

    @property
    def borders(self) -> NDArray[np.float64]:
        """Border vectors stacked as rows, shape (2, 2)."""
        return np.vstack([self.g_fov1, self.g_fov2])


def make_fov(bisector: VecLike, gamma: float) -> FovConfig:
    """
    Build the FoV cone around a bisector.

    Args:
        bisector: Unit bisector g*
        gamma: Half-angle in radians, in (0, pi/2]

    Raises:
        InvalidAngle: if gamma is outside (0, pi/2].
    """
    if not (0.0 < gamma <= math.pi / 2):
        raise InvalidAngle(f"gamma must lie in (0, pi/2], got {gamma}")
    b = as_vec2(bisector)
    b = b / np.linalg.norm(b)
    g1 = rotate(-gamma, b)
    g2 = rotate(gamma, b)
    return FovConfig(g_fov1=g1, g_fov2=g2, gamma=float(gamma), bisector=b)


def safe_fov(fov: FovConfig, lam: float) -> FovConfig:
    """Shrink the cone by a transient margin lam: gamma_S = gamma - lam."""
    if not (0.0 <= lam < fov.gamma):
        raise InvalidAngle(f"transient margin must lie in [0, gamma), got {lam}")
    if lam == 0.0:
        return fov
    return make_fov(fov.bisector, fov.gamma - lam)


def in_fov(g: UnitVec2, fov: FovConfig) -> bool:
    """True if the bearing lies in the cone (border included)."""
    return bool(fov.normal1 @ g >= -TOL_FOV and fov.normal2 @ g <= TOL_FOV)


def in_fov_many(g: NDArray[np.float64], fov: FovConfig) -> NDArray[np.bool_]:
    """Vectorised in_fov over bearings of shape (n, 2)."""
    return (g @ fov.normal1 >= -TOL_FOV) & (g @ fov.normal2 <= TOL_FOV)


def signed_offset(g: NDArray[np.float64], fov: FovConfig) -> NDArray[np.float64]:
    """Signed angle from the bisector to g, counterclockwise-positive."""
    b = fov.bisector
    g = np.asarray(g, dtype=np.float64)
    cross = b[0] * g[..., 1] - b[1] * g[..., 0]
    dot = g @ b
    return np.arctan2(cross, dot)


def angular_margin(g: UnitVec2, fov: FovConfig) -> float:
    """Angle from g to the nearest border, positive inside the cone."""
    return float(fov.gamma - abs(signed_offset(g, fov)))


def angular_margins(g: NDArray[np.float64], fov: FovConfig) -> NDArray[np.float64]:
    """Vectorised angular_margin over bearings of shape (n, 2)."""
    return fov.gamma - np.abs(signed_offset(g, fov))


def transient_margin(T_r: float, v_M: float, eps: float) -> float:
    """
    Smallest admissible transient region lambda* = arcsin(T_r v_M / eps).

    Raises:
        MarginInfeasible: if eps <= 0, T_r < 0, v_M < 0 or T_r * v_M exceeds eps.
    """
    if not eps > 0.0:
        raise MarginInfeasible(f"eps must be positive, got {eps}")
    if T_r < 0.0 or v_M < 0.0:
        raise MarginInfeasible(f"T_r and v_M must be non-negative, got T_r={T_r}, v_M={v_M}")
    ratio = T_r * v_M / eps
    if ratio > 1.0:
        raise MarginInfeasible(f"T_r * v_M = {T_r * v_M} exceeds eps = {eps}")
    return math.asin(ratio)
