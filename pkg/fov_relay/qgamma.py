"""
Analysis of the worst-case tracking efficiency q_gamma(phi).

q_gamma(phi) is the speed, per unit gain, at which the two-agent
opposite-sides law pulls the escaping agent back toward the cone when the
second agent sits at angle phi inward from the other border. Its minimum
q*_gamma fixes the critical gain for n >= 2.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

from .exceptions import DomainError, NotDifferentiable

HALF_PI = math.pi / 2
SMALL_GAMMA_LIMIT = math.pi / 6
# Slack accepted on the phi interval ends
TOL_DOMAIN = 1e-12

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / golden ratio
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / golden ratio^2


class GammaBranch(str, Enum):
    SMALL_GAMMA = "small_gamma"  # gamma <= pi/6, minimum at phi = 0
    LARGE_GAMMA = "large_gamma"


@dataclass(frozen=True)
class QGammaResult:
    """Closed-form minimizer and minimum of q_gamma."""
    gamma: float
    phi_star: float
    q_star: float
    branch: GammaBranch


def check_gamma(gamma: float) -> None:
    """Raise DomainError unless gamma lies in (0, pi/2]."""
    if not (math.isfinite(gamma) and 0.0 < gamma <= HALF_PI):
        raise DomainError(f"gamma must lie in (0, pi/2], got {gamma}")


def _check_phi(gamma: float, phi: float) -> float:
    check_gamma(gamma)
    if not (math.isfinite(phi) and -TOL_DOMAIN <= phi <= gamma + TOL_DOMAIN):
        raise DomainError(f"phi must lie in [0, gamma={gamma}], got {phi}")
    return min(max(phi, 0.0), gamma)


def _q(gamma: float, phi):
    # Works on scalars and numpy arrays alike
    s_g = np.sin(gamma)
    return (
        s_g ** 3
        + s_g * np.sin(gamma - phi) ** 2
        + np.cos(gamma) * np.sin(phi) * np.abs(np.cos(2 * gamma - phi))
    )


# ==================== Function values ====================

def q_gamma(gamma: float, phi: float) -> float:
    """
    Worst-case tracking efficiency, simplified form.

    sin^3(g) + sin(g) sin^2(g - phi) + cos(g) sin(phi) |cos(2g - phi)|

    Raises:
        DomainError: if gamma is outside (0, pi/2] or phi outside [0, gamma].
    """
    phi = _check_phi(gamma, phi)
    return float(_q(gamma, phi))


def q_gamma_radical(gamma: float, phi: float) -> float:
    """
    Same quantity in its original square-root form.

    Kept as a cross-check of q_gamma; the radicand is clamped at zero since
    roundoff can push it slightly negative.
    """
    phi = _check_phi(gamma, phi)
    s_g = math.sin(gamma)
    s_gp = math.sin(gamma - phi)
    sq = s_g ** 2 + s_gp ** 2
    radicand = sq - 2 * math.cos(2 * gamma - phi) * s_g * s_gp - sq ** 2
    return s_g ** 3 + s_g * s_gp ** 2 + math.cos(gamma) * math.sqrt(max(radicand, 0.0))


def q_star(gamma: float) -> float:
    """Minimum of q_gamma over [0, gamma]."""
    check_gamma(gamma)
    if gamma <= SMALL_GAMMA_LIMIT:
        return 2 * math.sin(gamma) ** 3
    return 1.5 * math.sin(gamma) - 0.5


def phi_star(gamma: float) -> QGammaResult:
    """Unique global minimizer of q_gamma with its minimum."""
    check_gamma(gamma)
    if gamma <= SMALL_GAMMA_LIMIT:
        phi, branch = 0.0, GammaBranch.SMALL_GAMMA
    else:
        phi, branch = 1.5 * gamma - math.pi / 4, GammaBranch.LARGE_GAMMA
    return QGammaResult(gamma=gamma, phi_star=phi, q_star=q_star(gamma), branch=branch)


def q_max(gamma: float) -> float:
    """Maximum of q_gamma over [0, gamma]: max(2 sin^3, sin)."""
    check_gamma(gamma)
    s = math.sin(gamma)
    return max(2 * s ** 3, s)


def qgamma_table(gamma: float, samples: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Uniform (phi, q_gamma(phi)) grid over [0, gamma].

    Raises:
        DomainError: if gamma is out of range or samples < 2.
    """
    check_gamma(gamma)
    if samples < 2:
        raise DomainError(f"at least 2 samples are required, got {samples}")
    phi = np.linspace(0.0, gamma, samples)
    return phi, _q(gamma, phi)


# ==================== Derivatives ====================

def _kink(gamma: float) -> Optional[float]:
    # |cos(2g - phi)| has a corner at phi = 2g - pi/2 inside [0, g] for g in [pi/4, pi/2)
    if math.pi / 4 <= gamma < HALF_PI:
        return 2 * gamma - HALF_PI
    return None


def _cos_sign(gamma: float, phi: float) -> int:
    kink = _kink(gamma)
    if kink is not None and abs(phi - kink) <= TOL_DOMAIN:
        raise NotDifferentiable(f"q_gamma is not differentiable at phi = 2*gamma - pi/2 = {kink}")
    c = math.cos(2 * gamma - phi)
    return int(np.sign(c))


def q_derivative(gamma: float, phi: float) -> float:
    """
    First derivative of q_gamma with respect to phi.

    Raises:
        NotDifferentiable: at phi = 2 gamma - pi/2 when gamma is in [pi/4, pi/2).
    """
    phi = _check_phi(gamma, phi)
    s = _cos_sign(gamma, phi)
    d = 2 * (gamma - phi)
    return s * math.cos(gamma) * math.cos(d) - math.sin(gamma) * math.sin(d)


def q_second_derivative(gamma: float, phi: float) -> float:
    """
    Second derivative of q_gamma with respect to phi.

    2 sin(3g - 2phi) where cos(2g - phi) > 0 and -2 sin(g - 2phi) where it is
    negative; at gamma = pi/2 this reduces to -2 cos(2 phi).

    Defined wherever q_gamma is twice differentiable, not only on the
    convexity region (gamma < pi/4, or phi > 2 gamma - pi/2). The value is
    positive on that region and may be negative outside it, e.g.
    q_second_derivative(pi/3, 0.1) = -2 sin(pi/3 - 0.2).

    Raises:
        DomainError: outside 0 <= phi <= gamma <= pi/2.
        NotDifferentiable: at phi = 2 gamma - pi/2 when gamma is in [pi/4, pi/2).
    """
    phi = _check_phi(gamma, phi)
    s = _cos_sign(gamma, phi)
    if s > 0:
        return 2 * math.sin(3 * gamma - 2 * phi)
    if s < 0:
        return -2 * math.sin(gamma - 2 * phi)
    # cos(2g - phi) = 0 only at gamma = pi/2, phi = pi/2 where cos(g) kills the |.| term
    return -2 * math.cos(2 * phi)


# ==================== Brute-force oracle ====================

def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """
    Golden-section search.

    Given f with a single local minimum in [a, b], returns a bracket [c, d]
    containing it with d - c <= tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, b

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc < yd:
        return a, d
    return c, b


def q_min_bruteforce(gamma: float, samples: int = 1000) -> tuple[float, float]:
    """
    Numerical minimum of q_gamma, independent of the closed form.

    Scans a uniform grid over [0, gamma] and refines around the best grid
    point with golden-section search down to a 1e-10 bracket.

    Returns:
        (phi, q) at the located minimum
    """
    if samples < 1000:
        raise DomainError(f"at least 1000 samples are required, got {samples}")
    phi, q = qgamma_table(gamma, samples)
    i = int(np.argmin(q))
    lo = phi[max(i - 1, 0)]
    hi = phi[min(i + 1, samples - 1)]

    def f(x: float) -> float:
        return float(_q(gamma, x))

    c, d = golden_section(f, lo, hi, tol=1e-10)
    candidates = [(float(phi[i]), float(q[i])), (c, f(c)), (d, f(d)), (0.5 * (c + d), f(0.5 * (c + d)))]
    return min(candidates, key=lambda pq: pq[1])
