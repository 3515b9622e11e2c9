"""
Exceptions raised by the relay guidance core.
Every error the core can raise derives from RelaySimError so callers can
separate simulation failures from configuration or I/O problems.
"""


class RelaySimError(Exception):
    """Base class for all guidance and simulation errors."""


class CoincidentPoints(RelaySimError):
    """Two points are too close for a bearing to be defined."""


class InvalidAngle(RelaySimError):
    """An angle lies outside its admissible range."""


class MarginInfeasible(RelaySimError):
    """The transient region cannot be computed (bad inputs or T_r * v_M > eps)."""


class DomainError(RelaySimError):
    """Arguments fall outside the domain of a q_gamma function."""


class NotDifferentiable(DomainError):
    """q_gamma has a kink at the requested point."""


class GammaDegenerate(RelaySimError):
    """Collision avoidance is undefined: half-plane field of view or opposite critical bearings."""


class CollisionError(RelaySimError):
    """The relay and an agent coincide."""


class ScenarioError(RelaySimError):
    """A scenario violates its construction invariants."""
