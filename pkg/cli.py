"""
Main entry point for the Eisenstein packing toolkit.

Builds the argument parser from the subcommand handlers, dispatches, prints
the result on stdout and turns errors into exit codes with a one-line
machine-readable message on stderr.
"""
import argparse
import sys
from typing import Optional, Sequence, TextIO

from config import EXTENDED_DPS, OUTPUT_FORMAT
from handlers import construct_handler, exponent_handler, primes_handler, search_handler, table1_handler
from utils.errors import PackingError, UsageError
from utils.formatting import FORMATS, emit
from utils.logger import setup_logger
from utils.numerics import get_numerics

logger = setup_logger(__name__)

HANDLERS = (primes_handler, exponent_handler, search_handler, table1_handler, construct_handler)


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises UsageError instead of exiting."""

    def error(self, message: str) -> None:
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None,
                        help=f"Output format (default: {OUTPUT_FORMAT})")
    common.add_argument("--precision", choices=("double", "extended"), default="double",
                        help="Numeric back-end for closed-form bounds")
    common.add_argument("--dps", type=int, default=EXTENDED_DPS,
                        help="Decimal digits in extended precision")

    parser = ArgumentParser(
        prog="eisenstein-packings",
        description="Sphere-packing density bounds from codes concatenated over the Eisenstein integers",
    )
    subparsers = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    subparsers.required = True
    for handler in HANDLERS:
        handler.register(subparsers, [common])
    return parser


def _report_error(error: PackingError, stream: TextIO) -> int:
    message = " ".join(str(error).split())
    stream.write(f"error kind={error.kind} code={error.exit_code} message={message}\n")
    return error.exit_code


def main(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    """
    Run one command.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])
        stdout: Stream for results
        stderr: Stream for the error line

    Returns:
        Process exit code
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.dps < 30:
            raise UsageError(f"--dps must be >= 30, got {args.dps}")
        numerics = get_numerics(args.precision, args.dps)
        result = args.handler(args, numerics)
        fmt = args.format or getattr(args, "default_format", None) or OUTPUT_FORMAT
        emit(result, fmt, numerics, stdout)
        return 0
    except PackingError as e:
        logger.debug(f"{e.kind}: {e}")
        return _report_error(e, stderr)
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        message = " ".join(str(e).split())
        stderr.write(f"error kind=InternalError code=1 message={message}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
