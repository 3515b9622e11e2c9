"""
Gains Command: prints the gain selection for a field of view.
"""

import argparse
import math

from fov_relay import qgamma
from fov_relay.controller import conservative_gain_bound, critical_gain
from fov_relay.exceptions import DomainError

from ..exceptions import EXIT_OK, UsageError
from ..schemas.models import GainTable


def gain_table(gamma_deg: float, v_max: float, n: int) -> GainTable:
    """
    Gain selection for one (gamma, v_max, n) triple.

    Raises:
        DomainError: if gamma, v_max or n is out of range.
    """
    gamma = math.radians(gamma_deg)
    best = qgamma.phi_star(gamma)
    return GainTable(
        gamma_deg=gamma_deg,
        v_max=v_max,
        n=n,
        k_star=critical_gain(v_max, gamma, 1),
        k_q=v_max / best.q_star,
        k_conservative=conservative_gain_bound(v_max, gamma),
        k_critical=critical_gain(v_max, gamma, n),
        q_star=best.q_star,
        phi_star_deg=math.degrees(best.phi_star),
    )


def format_gain_table(table: GainTable) -> str:
    rows = [
        ("gamma [deg]", f"{table.gamma_deg:g}"),
        ("v_max [m/s]", f"{table.v_max:g}"),
        ("n", f"{table.n}"),
        ("K*_r = v_M/sin(gamma)", f"{table.k_star:.4f}"),
        ("K^q_r = v_M/q*", f"{table.k_q:.4f}"),
        ("K_r bound = v_M/sin^3(gamma)", f"{table.k_conservative:.4f}"),
        ("K_rc (this n)", f"{table.k_critical:.4f}"),
        ("q*", f"{table.q_star:.4f}"),
        ("phi* [deg]", f"{table.phi_star_deg:.4f}"),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def register(subparsers) -> None:
    parser = subparsers.add_parser("gains", help="임계 게인 계산")
    parser.add_argument("--gamma", type=float, default=45.0, help="FoV half-angle [deg]")
    parser.add_argument("--vmax", type=float, default=5.0, help="agent speed bound [m/s]")
    parser.add_argument("--n", type=int, default=2, help="number of agents")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    try:
        table = gain_table(args.gamma, args.vmax, args.n)
    except DomainError as e:
        raise UsageError(str(e)) from e
    print(format_gain_table(table))
    return EXIT_OK
