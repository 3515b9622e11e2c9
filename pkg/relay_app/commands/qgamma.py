"""
q_gamma Command: tabulates the worst-case tracking efficiency.
"""

import argparse
import math

from fov_relay.exceptions import DomainError
from fov_relay.qgamma import phi_star

from ..exceptions import EXIT_OK, UsageError
from ..services.export_service import write_qgamma_table


def register(subparsers) -> None:
    parser = subparsers.add_parser("qgamma", help="q_gamma(phi) 테이블 저장")
    parser.add_argument("--gamma", type=float, default=45.0, help="FoV half-angle [deg]")
    parser.add_argument("--samples", type=int, default=1000, help="grid points over [0, gamma]")
    parser.add_argument("--out", required=True, help="table output path")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    gamma = math.radians(args.gamma)
    try:
        best = phi_star(gamma)
        path = write_qgamma_table(gamma, args.samples, args.out)
    except DomainError as e:
        raise UsageError(str(e)) from e
    print(f"✅ Table written: {path}")
    print(f"   phi* = {math.degrees(best.phi_star):.4f} deg, q* = {best.q_star:.6f} ({best.branch.value})")
    return EXIT_OK
