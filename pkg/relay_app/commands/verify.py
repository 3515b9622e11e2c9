"""
Verify Command: runs the acceptance battery and reports per criterion.
"""

import argparse

from ..exceptions import EXIT_OK, EXIT_SIMULATION, UsageError
from ..services.verify_service import get_verify_service


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="검증 기준 전체 실행")
    parser.add_argument("--only", nargs="*", default=None, help="run only the named criteria")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    if args.only == []:
        raise UsageError("--only needs at least one criterion name")
    try:
        results = get_verify_service().run(args.only)
    except KeyError as e:
        raise UsageError(e.args[0]) from e
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "✅ PASS" if r.passed else "❌ FAIL"
        print(f"{mark}  {r.name:<{width}}  {r.detail}")

    failed = sum(not r.passed for r in results)
    print(f"\n{len(results) - failed}/{len(results)} criteria passed")
    return EXIT_OK if failed == 0 else EXIT_SIMULATION
