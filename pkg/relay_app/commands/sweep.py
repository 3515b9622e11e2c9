"""
Sweep Command: runs one config over a list of gain multipliers.
"""

import argparse
from typing import List

from ..exceptions import EXIT_OK, UsageError
from ..schemas.models import SweepRow
from ..services.simulation_service import get_simulation_service, load_config


def parse_multipliers(text: str) -> List[float]:
    """Parse 'a,b,c' into floats."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError("--multipliers needs at least one value")
    try:
        values = [float(p) for p in parts]
    except ValueError as e:
        raise UsageError(f"--multipliers: {e}") from e
    if any(v <= 0 for v in values):
        raise UsageError("--multipliers must be positive")
    return values


def format_sweep(rows: List[SweepRow]) -> str:
    header = f"{'multiplier':>10}  {'K_r':>9}  {'min margin [rad]':>16}  {'violation':>9}  {'min d [m]':>9}  {'switches':>8}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.multiplier:>10g}  {r.k_r:>9.4f}  {r.min_margin:>16.3e}  {str(r.violation).lower():>9}"
            f"  {r.min_distance:>9.4f}  {r.switch_count:>8d}"
        )
    return "\n".join(lines)


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="게인 배수별 일괄 실행")
    parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--multipliers", required=True, help="comma-separated K_r multipliers, e.g. 0.9,1.0,1.1")
    parser.add_argument("--workers", type=int, default=None, help="parallel processes (default from settings)")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    multipliers = parse_multipliers(args.multipliers)
    config = load_config(args.config)
    rows = get_simulation_service().sweep(config, multipliers, workers=args.workers)
    print(format_sweep(rows))
    return EXIT_OK
