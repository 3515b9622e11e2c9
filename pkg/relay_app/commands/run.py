"""
Run Command: simulates one scenario config and writes its trace.
"""

import argparse

from ..exceptions import EXIT_OK
from ..services.export_service import render_svg, write_trace_csv
from ..services.simulation_service import get_simulation_service, load_config


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="시나리오 실행 및 trace 저장")
    parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--out", required=True, help="trace CSV output path")
    parser.add_argument("--svg", default=None, help="optional SVG rendering path")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    """Load, simulate, export."""
    config = load_config(args.config)
    trace = get_simulation_service().run(config)

    path = write_trace_csv(trace, args.out)
    print(f"✅ Trace written: {path} ({len(trace.t)} rows)")
    if trace.fov_violations:
        first = trace.fov_violations[0]
        print(f"⚠️  FoV violation: agent {first.agent + 1} at t={first.t:.3f} s "
              f"({len(trace.fov_violations)} onsets)")
    if args.svg:
        print(f"🖼️  SVG written: {render_svg(trace, args.svg)}")
    return EXIT_OK
