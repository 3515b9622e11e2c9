"""
Relay Simulator CLI.
Main entry point for the command-line interface.
"""

import argparse
import sys
from typing import List, Optional

from loguru import logger

from fov_relay.exceptions import RelaySimError

from .commands import gains, qgamma, run, sweep, verify
from .config import get_settings
from .exceptions import EXIT_INVALID, EXIT_IO, EXIT_SIMULATION, ConfigError, UsageError


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that reports usage errors as exceptions instead of exiting with 2."""

    def error(self, message: str):
        raise UsageError(message)


def configure_logging(level: str) -> None:
    """Route loguru records to stderr at the configured level."""
    logger.remove()
    logger.add(
        sys.stderr,
        level=level.upper(),
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {name}:{function} - {message}",
    )


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="relay-sim",
        description="""
    시야각(FoV) 제약 하에서 베어링 정보만으로 릴레이 차량을 유도하는 시뮬레이터입니다.

    명령:
      run     시나리오 실행 → trace CSV (+ SVG)
      gains   임계 게인 K_rc 계산
      qgamma  q_gamma(phi) 테이블
      sweep   게인 배수별 일괄 실행
      verify  검증 기준 전체 실행
    """,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)
    for command in (run, gains, qgamma, sweep, verify):
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, dispatch the subcommand and map failures to exit codes.

    Returns:
        0 on success, 1 on parse/validation/usage errors, 2 on simulation
        errors, 3 on I/O errors
    """
    configure_logging(get_settings().log_level)
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except (ConfigError, UsageError) as e:
        print(f"❌ Invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except RelaySimError as e:
        print(f"💥 Simulation error ({type(e).__name__}): {e}", file=sys.stderr)
        return EXIT_SIMULATION
    except OSError as e:
        print(f"📁 I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
