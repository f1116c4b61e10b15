#!/usr/bin/env python3
import argparse
import json
import logging
import sys
from typing import List, Optional

from voicesim import config
from voicesim.cli import calibrate, evaluate, render, simulate, summarize
from voicesim.errors import EXIT_INTERNAL, UsageError, VoiceSimError

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage problems as UsageError (exit code 1) instead of exiting with 2"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='store_true', help='Debug logging on stderr')

    parser = ArgumentParser(
        prog='voicesim',
        description='Voice similarity matrices, DeID and G_VD for speaker pseudonymisation'
    )
    subparsers = parser.add_subparsers(dest='subcommand', required=True)
    for command in (evaluate, calibrate, render, simulate, summarize):
        command.register(subparsers, [common])
    return parser


def setup_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True
    )


def _report_error(payload: dict):
    sys.stderr.write(json.dumps(payload) + '\n')


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except VoiceSimError as e:
        _report_error(e.to_dict())
        return e.exit_code

    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except VoiceSimError as e:
        logger.error(f"{args.subcommand} failed: {e.message}")
        _report_error(e.to_dict())
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected error in {args.subcommand}")
        _report_error({'error': type(e).__name__, 'message': str(e), 'exit_code': EXIT_INTERNAL})
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
