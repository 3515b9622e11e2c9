"""
Verify Service: the acceptance battery.
Every criterion is a named check returning a CriterionResult; the battery
passes only when all of them do.
"""

import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from fov_relay import qgamma
from fov_relay.avoidance import SafetyConfig, alert, avoidance_term, proximity
from fov_relay.controller import chi_2, chi_n, control_general, critical_gain
from fov_relay.exceptions import CollisionError, NotDifferentiable, RelaySimError
from fov_relay.geometry import bearing, make_fov, projector
from fov_relay.scenarios import (
    scenario_dancing,
    scenario_patrol,
    scenario_single_worst_case,
    scenario_two_agent_worst_case,
)
from fov_relay.simulator import SimTrace, chi_switch_count, max_switch_jump_ratio, run
from fov_relay.world import WorldState

from ..config import get_settings
from ..schemas.models import CriterionResult
from .export_service import trace_to_text

GAMMA = math.pi / 4
V_MAX = 5.0
DT = 1e-3
MARGIN_SLACK = -1e-3

Check = Callable[[], CriterionResult]


def _result(name: str, passed: bool, detail: str) -> CriterionResult:
    return CriterionResult(name=name, passed=bool(passed), detail=detail)


def _in_fov_bearings(rng: np.random.Generator, fov, size) -> np.ndarray:
    """Random unit vectors strictly inside the cone, shape size + (2,)."""
    theta = rng.uniform(-fov.gamma, fov.gamma, size=size)
    bx, by = fov.bisector
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([c * bx - s * by, s * bx + c * by], axis=-1)


def _bearing_angle_to_bisector(trace: SimTrace, k: int, i: int = 0) -> float:
    g = bearing(trace.p_r[k], trace.agents[k, i])
    return math.acos(min(max(float(g @ trace.scenario.fov.bisector), -1.0), 1.0))


class VerifyService:
    """Runs the acceptance criteria."""

    def __init__(self, seed: int):
        self.seed = seed

    def _rng(self, offset: int) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)

    # ==================== Gains and q analysis ====================

    def critical_gains(self) -> CriterionResult:
        k1 = critical_gain(V_MAX, GAMMA, 1)
        k2 = critical_gain(V_MAX, GAMMA, 2)
        ok = abs(k1 - 7.0711) <= 1e-4 and abs(k2 - 8.9181) <= 1e-4
        return _result("critical_gains", ok, f"K*_r={k1:.6f} (7.0711), K^q_r={k2:.6f} (8.9181)")

    def q_star_quarter_pi(self) -> CriterionResult:
        q = qgamma.q_star(GAMMA)
        phi = qgamma.phi_star(GAMMA).phi_star
        ok = abs(q - 0.5607) <= 1e-4 and phi == math.pi / 8
        return _result("q_star_quarter_pi", ok, f"q*={q:.6f} (0.5607), phi*={phi!r} (pi/8={math.pi / 8!r})")

    def qgamma_oracle(self) -> CriterionResult:
        rng = self._rng(1)
        worst_q = worst_phi = 0.0
        for gamma in rng.uniform(0.01, math.pi / 2, size=200):
            phi_o, q_o = qgamma.q_min_bruteforce(float(gamma))
            worst_q = max(worst_q, abs(q_o - qgamma.q_star(float(gamma))))
            worst_phi = max(worst_phi, abs(phi_o - qgamma.phi_star(float(gamma)).phi_star))
        ok = worst_q <= 1e-6 and worst_phi <= 1e-4
        return _result("qgamma_oracle", ok, f"200 gammas: max |dq|={worst_q:.2e}, max |dphi|={worst_phi:.2e}")

    def qgamma_derivatives(self) -> CriterionResult:
        rng = self._rng(2)
        h = 1e-6
        worst1 = worst2 = 0.0
        checked = 0
        for gamma in rng.uniform(0.05, math.pi / 2, size=100):
            gamma = float(gamma)
            for phi in rng.uniform(1e-3, gamma - 1e-3, size=10):
                phi = float(phi)
                kink = 2 * gamma - math.pi / 2
                if math.pi / 4 <= gamma < math.pi / 2 and abs(phi - kink) < 1e-3:
                    continue
                try:
                    d1 = qgamma.q_derivative(gamma, phi)
                    d2 = qgamma.q_second_derivative(gamma, phi)
                except NotDifferentiable:
                    continue
                fd1 = (qgamma.q_gamma(gamma, phi + h) - qgamma.q_gamma(gamma, phi - h)) / (2 * h)
                fd2 = (qgamma.q_derivative(gamma, phi + h) - qgamma.q_derivative(gamma, phi - h)) / (2 * h)
                worst1 = max(worst1, abs(d1 - fd1))
                worst2 = max(worst2, abs(d2 - fd2))
                checked += 1
        ok = checked > 0 and worst1 <= 1e-5 and worst2 <= 1e-4
        return _result("qgamma_derivatives", ok, f"{checked} points: max err q'={worst1:.2e}, q''={worst2:.2e}")

    # ==================== Worst-case scenarios ====================

    def single_worst_case_below_critical(self) -> CriterionResult:
        trace = run(scenario_single_worst_case(GAMMA, V_MAX, 0.9, dt=DT))
        onsets = trace.fov_violations
        ok = bool(onsets) and onsets[0].t <= 1.0
        first = f"first at t={onsets[0].t:.3f} s" if onsets else "none"
        return _result("single_worst_case_0.9_violates", ok, f"violation onsets: {len(onsets)}, {first}")

    def single_worst_case_critical(self) -> CriterionResult:
        trace = run(scenario_single_worst_case(GAMMA, V_MAX, 1.0, dt=DT))
        ok = trace.min_margin >= MARGIN_SLACK
        return _result("single_worst_case_1.0_holds", ok, f"min margin {trace.min_margin:.3e} rad")

    def single_worst_case_converges(self) -> CriterionResult:
        trace = run(scenario_single_worst_case(GAMMA, V_MAX, 1.1, dt=DT, escape_duration=10.0))
        start = _bearing_angle_to_bisector(trace, 0)
        end = _bearing_angle_to_bisector(trace, len(trace.t) - 1)
        ok = end < 0.1 * start
        return _result("single_worst_case_1.1_converges", ok, f"angle to bisector {start:.4f} -> {end:.4f} rad")

    def two_agent_below_critical(self) -> CriterionResult:
        trace = run(scenario_two_agent_worst_case(GAMMA, V_MAX, 0.9, dt=DT))
        ok = bool(trace.fov_violations)
        return _result("two_agent_0.9_violates", ok, f"violation onsets: {len(trace.fov_violations)}")

    def two_agent_critical(self) -> CriterionResult:
        trace = run(scenario_two_agent_worst_case(GAMMA, V_MAX, 1.0, dt=DT))
        ok = trace.min_margin >= MARGIN_SLACK
        return _result("two_agent_1.0_holds", ok, f"min margin {trace.min_margin:.3e} rad")

    # ==================== Collision avoidance ====================

    def avoidance_keeps_distance(self) -> CriterionResult:
        safety = SafetyConfig()
        trace = run(scenario_single_worst_case(GAMMA, V_MAX, 1.5, dt=DT, safety=safety))
        floor = safety.eps - V_MAX * DT
        ok = trace.min_distance >= floor
        return _result("avoidance_on_floor", ok, f"min distance {trace.min_distance:.4f} m (floor {floor:.4f})")

    def no_avoidance_closes_in(self) -> CriterionResult:
        safety = SafetyConfig()
        # Full horizon: the range is still above eps at 18 s and bottoms out near 22.6 s
        scenario = scenario_single_worst_case(
            GAMMA, V_MAX, 1.5, dt=DT, safety=safety, avoidance_enabled=False, t_final=30.0
        )
        try:
            d_min = run(scenario).min_distance
        except CollisionError:
            d_min = 0.0
        return _result("avoidance_off_closes_in", d_min < safety.eps, f"min distance {d_min:.4f} m (eps {safety.eps})")

    # ==================== Switching scenarios ====================

    def _dancing(self, n: int, crossings: int, required: int) -> CriterionResult:
        trace = run(scenario_dancing(n, crossings, GAMMA, V_MAX, 1.0, dt=DT))
        switches = chi_switch_count(trace)
        ratio = max_switch_jump_ratio(trace)
        ok = switches >= required and not trace.fov_violations and ratio <= 1.0
        return _result(
            f"dancing_n{n}", ok,
            f"{switches} switches (>= {required}), {len(trace.fov_violations)} violations, jump ratio {ratio:.3f}",
        )

    def dancing_two(self) -> CriterionResult:
        return self._dancing(2, 5, 5)

    def dancing_five(self) -> CriterionResult:
        return self._dancing(5, 3, 3)

    def patrol(self) -> CriterionResult:
        trace = run(scenario_patrol(dt=DT))
        switches = chi_switch_count(trace)
        ok = not trace.fov_violations and switches >= 1
        return _result("patrol", ok, f"{len(trace.fov_violations)} violations, {switches} switches")

    # ==================== Property suites ====================

    def side_discriminator_equivalence(self) -> CriterionResult:
        fov = make_fov((0.0, -1.0), GAMMA)
        pairs = _in_fov_bearings(self._rng(3), fov, (100_000, 2))
        mismatches = sum(
            1 for g in pairs if chi_n(g, fov) != chi_2(g[0], g[1], fov)
        )
        return _result("chi_pair_equivalence", mismatches == 0, f"100000 pairs, {mismatches} mismatches")

    def projector_algebra(self) -> CriterionResult:
        rng = self._rng(4)
        angles = rng.uniform(-math.pi, math.pi, size=100_000)
        vs = rng.normal(size=(100_000, 2))
        worst = 0.0
        for a, v in zip(angles, vs):
            g = np.array([math.cos(a), math.sin(a)])
            P = projector(g)
            worst = max(
                worst,
                float(np.abs(P @ P - P).max()),
                float(np.abs(P - P.T).max()),
                float(np.abs(P @ g).max()),
                abs(float(g @ (P @ v))) / (1.0 + float(np.linalg.norm(v))),
            )
        return _result("projector_algebra", worst <= 1e-12, f"100000 samples, max residual {worst:.2e}")

    def admissibility(self) -> CriterionResult:
        rng = self._rng(5)
        fov = make_fov((0.0, -1.0), GAMMA)
        worst = -math.inf
        for n in rng.integers(1, 8, size=10_000):
            G = _in_fov_bearings(rng, fov, (int(n),))
            u = control_general(G, fov, 8.0).u_r
            worst = max(worst, float(u @ fov.bisector))
        return _result("admissibility", worst <= 1e-12, f"10000 bearing sets, max u_r.g* {worst:.2e}")

    def alert_ramp(self) -> CriterionResult:
        cfg = SafetyConfig(eps=5.0, eps_s=10.0, delta=0.01)
        expected = {4.0: 1.0, 5.0: 1.0, 5.025: 0.5, 5.05: 0.0, 7.0: 0.0, 10.0: 0.0, 12.0: 0.0}
        errors = {d: abs(alert(d, cfg) - e) for d, e in expected.items()}
        ok = max(errors.values()) <= 1e-9
        return _result("alert_ramp", ok, f"eta(5.025)={alert(5.025, cfg):.12f}")

    def retreat_speed_bounds(self) -> CriterionResult:
        rng = self._rng(6)
        cfg = SafetyConfig()
        fov = make_fov((0.0, -1.0), GAMMA)
        upper = V_MAX / math.cos(GAMMA)
        bad = 0
        retreat_short = 0
        for _ in range(10_000):
            n = int(rng.integers(1, 5))
            G = _in_fov_bearings(rng, fov, (n,))
            d = rng.uniform(cfg.eps * 0.5, cfg.eps_s, size=n)
            # Put at least two agents on the same range half the time
            if n > 1 and rng.random() < 0.5:
                d[1] = d[0]
            world = WorldState(t=0.0, p_r=(0.0, 0.0), agents=G * d[:, None])
            prox = proximity(world, cfg, fov, V_MAX)
            if not (V_MAX - 1e-9 <= prox.v_bar <= upper + 1e-9):
                bad += 1
            u_r = control_general(G, fov, 8.0).u_r
            term = avoidance_term(world, cfg, fov, V_MAX, u_r)
            if term.eta == 1.0 and float((u_r + term.upsilon) @ -prox.n_r) < prox.v_bar - 1e-9:
                retreat_short += 1
        ok = bad == 0 and retreat_short == 0
        return _result(
            "retreat_speed_bounds", ok,
            f"10000 configurations: {bad} v_bar out of [{V_MAX}, {upper:.4f}], {retreat_short} short retreats",
        )

    # ==================== Determinism ====================

    def determinism(self) -> CriterionResult:
        first = trace_to_text(run(scenario_two_agent_worst_case(GAMMA, V_MAX, 1.0, dt=DT, t_final=5.0)))
        second = trace_to_text(run(scenario_two_agent_worst_case(GAMMA, V_MAX, 1.0, dt=DT, t_final=5.0)))
        return _result("determinism", first == second, f"{len(first)} bytes per trace")

    # ==================== Battery ====================

    def criteria(self) -> Dict[str, Check]:
        """Criteria in report order, keyed by method name."""
        return {
            "critical_gains": self.critical_gains,
            "q_star_quarter_pi": self.q_star_quarter_pi,
            "qgamma_oracle": self.qgamma_oracle,
            "qgamma_derivatives": self.qgamma_derivatives,
            "single_worst_case_below_critical": self.single_worst_case_below_critical,
            "single_worst_case_critical": self.single_worst_case_critical,
            "single_worst_case_converges": self.single_worst_case_converges,
            "two_agent_below_critical": self.two_agent_below_critical,
            "two_agent_critical": self.two_agent_critical,
            "avoidance_keeps_distance": self.avoidance_keeps_distance,
            "no_avoidance_closes_in": self.no_avoidance_closes_in,
            "dancing_two": self.dancing_two,
            "dancing_five": self.dancing_five,
            "patrol": self.patrol,
            "side_discriminator_equivalence": self.side_discriminator_equivalence,
            "projector_algebra": self.projector_algebra,
            "admissibility": self.admissibility,
            "alert_ramp": self.alert_ramp,
            "retreat_speed_bounds": self.retreat_speed_bounds,
            "determinism": self.determinism,
        }

    def run(self, names: Optional[Sequence[str]] = None) -> List[CriterionResult]:
        """
        Run all criteria, or only those named.

        A criterion raising a simulation error counts as failed rather than
        aborting the battery.
        """
        checks = self.criteria()
        selected = list(checks) if names is None else list(names)
        unknown = [n for n in selected if n not in checks]
        if unknown:
            raise KeyError(f"unknown criteria: {', '.join(unknown)}")

        results = []
        for name in selected:
            try:
                result = checks[name]()
            except RelaySimError as e:
                result = _result(name, False, f"{type(e).__name__}: {e}")
            logger.info("criterion {}: {}", result.name, "pass" if result.passed else "FAIL")
            results.append(result)
        return results


# Singleton instance
_verify_service: Optional[VerifyService] = None


def get_verify_service() -> VerifyService:
    """Get or create verify service instance."""
    global _verify_service
    if _verify_service is None:
        _verify_service = VerifyService(seed=get_settings().verify_seed)
    return _verify_service
