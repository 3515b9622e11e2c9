"""
Collision avoidance term added to the relay control input.

The relay pushes only along -g* so that FoV tracking is left undisturbed,
and the push is sized so the retreat speed along the escape normal -n_r is at
least v_bar whenever an agent reaches the safety distance.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from .exceptions import CollisionError, DomainError, GammaDegenerate
from .geometry import MIN_DISTANCE, FovConfig, UnitVec2, Vec2
from .world import WorldState

# Ranges closer than this count as equal when forming V_r
TOL_DIST = 1e-9
# Below this the critical pair has no escape normal
TOL_NORMAL = 1e-12


@dataclass(frozen=True)
class SafetyConfig:
    """Safety distance eps, sensing radius eps_s and ramp shape delta."""
    eps: float = 5.0
    eps_s: float = 10.0
    delta: float = 0.01

    def __post_init__(self):
        if not (0.0 < self.eps < self.eps_s):
            raise DomainError(f"need 0 < eps < eps_s, got eps={self.eps}, eps_s={self.eps_s}")
        if not (0.0 < self.delta <= 1.0):
            raise DomainError(f"delta must lie in (0, 1], got {self.delta}")


@dataclass(frozen=True)
class ProximityState:
    d_r: float
    V_s: tuple[int, ...]
    V_r: tuple[int, ...]
    critical_pair: Optional[tuple[int, int]]
    n_r: UnitVec2
    v_bar: float


@dataclass(frozen=True)
class AvoidanceTerm:
    """upsilon = -eta * a_r * f_r, with f_r = g*."""
    upsilon: Vec2
    eta: float
    a_r: float
    f_r: UnitVec2
    # -u_r^T n_r, retreat speed the tracking input alone provides
    w_r: float
    proximity: ProximityState


def proximity(world: WorldState, cfg: SafetyConfig, fov: FovConfig, v_M: float) -> ProximityState:
    """
    Locate the closest agents and the escape normal.

    Raises:
        CollisionError: if an agent sits on the relay.
        GammaDegenerate: if gamma = pi/2 while an agent is within eps_s, or
            the two critical bearings are opposite.
    """
    diff = world.agents - world.p_r
    d = np.hypot(diff[:, 0], diff[:, 1])
    if np.any(d <= MIN_DISTANCE):
        i = int(np.argmin(d))
        raise CollisionError(f"agent {i} reached the relay at t={world.t:.6f} s (d={d[i]:.3e} m)")

    V_s = np.flatnonzero(d <= cfg.eps_s)
    if V_s.size == 0:
        return ProximityState(
            d_r=cfg.eps_s, V_s=(), V_r=(), critical_pair=None, n_r=fov.bisector, v_bar=0.0
        )
    if fov.gamma >= math.pi / 2:
        raise GammaDegenerate("collision avoidance is undefined for gamma = pi/2")

    d_r = float(d[V_s].min())
    V_r = V_s[np.abs(d[V_s] - d_r) <= TOL_DIST]
    G = diff[V_r] / d[V_r, None]

    # argmin over i <= j of g_i^T g_j, first hit wins
    dots = G @ G.T
    best = (0, 0)
    best_val = math.inf
    for a in range(len(V_r)):
        for b in range(a, len(V_r)):
            if dots[a, b] < best_val:
                best_val = dots[a, b]
                best = (a, b)

    s = G[best[0]] + G[best[1]]
    s_norm = float(np.linalg.norm(s))
    if s_norm <= TOL_NORMAL:
        i, j = int(V_r[best[0]]), int(V_r[best[1]])
        raise GammaDegenerate(
            f"agents {i} and {j} sit on opposite sides of the relay at t={world.t:.6f} s; no escape normal"
        )
    n_r = s / s_norm
    v_bar = v_M / float(n_r @ G[best[0]])
    return ProximityState(
        d_r=d_r,
        V_s=tuple(int(i) for i in V_s),
        V_r=tuple(int(i) for i in V_r),
        critical_pair=(int(V_r[best[0]]), int(V_r[best[1]])),
        n_r=n_r,
        v_bar=v_bar,
    )


def alert(d_r: float, cfg: SafetyConfig) -> float:
    """Collision alert eta in [0, 1]: 1 at eps, linear ramp down, 0 from eps_s on."""
    if d_r <= cfg.eps:
        return 1.0
    if d_r >= cfg.eps_s:
        return 0.0
    ramp = -d_r / (cfg.delta * cfg.eps) + (1.0 + cfg.delta) / cfg.delta
    return min(max(ramp, 0.0), 1.0)


def avoidance_effort(prox: ProximityState, u_r: Vec2, fov: FovConfig) -> float:
    """Magnitude a_r = [v_bar + u_r^T n_r]_+ / (n_r^T g*), zero when V_r is empty."""
    if not prox.V_r:
        return 0.0
    denom = float(prox.n_r @ fov.bisector)
    if denom <= 0.0:
        raise GammaDegenerate(f"escape normal is orthogonal to or behind the bisector (n_r^T g* = {denom})")
    return max(prox.v_bar + float(u_r @ prox.n_r), 0.0) / denom


def avoidance_term(world: WorldState, cfg: SafetyConfig, fov: FovConfig, v_M: float, u_r: Vec2) -> AvoidanceTerm:
    """Compose proximity, alert and effort into upsilon = -eta a_r g*."""
    prox = proximity(world, cfg, fov, v_M)
    eta = alert(prox.d_r, cfg)
    a_r = avoidance_effort(prox, u_r, fov)
    upsilon = -eta * a_r * fov.bisector
    w_r = -float(u_r @ prox.n_r) if prox.V_r else 0.0
    if eta > 0.0:
        logger.debug(
            "avoidance active at t={:.4f}: d_r={:.4f} eta={:.3f} a_r={:.4f} pair={}",
            world.t, prox.d_r, eta, a_r, prox.critical_pair,
        )
    return AvoidanceTerm(upsilon=upsilon, eta=eta, a_r=a_r, f_r=fov.bisector, w_r=w_r, proximity=prox)


def relay_velocity(u_r: Vec2, term: AvoidanceTerm) -> Vec2:
    """p_r_dot = u_r + upsilon."""
    return u_r + term.upsilon
