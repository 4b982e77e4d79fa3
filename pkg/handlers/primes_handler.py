"""
Primes handler: splitting table of rational primes in Q(sqrt(-3)).
"""
import sympy

from models.eisenstein import split_prime
from utils.logger import setup_logger
from utils.validators import require, validate_positive_int

logger = setup_logger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("primes", parents=parents,
                                   help="Splitting table p, kind, t, Q for primes up to a limit")
    parser.add_argument("--limit", required=True, help="Largest prime to list")
    parser.set_defaults(handler=handle, default_format="csv")


def handle(args, numerics) -> list[dict]:
    """
    List the prime ideal chosen above every prime <= limit.

    Args:
        args: Parsed arguments
        numerics: Unused (exact data)

    Returns:
        One row per prime
    """
    limit = require(lambda s: validate_positive_int(s, minimum=2), args.limit, "--limit")
    rows = []
    for p in sympy.primerange(2, limit + 1):
        info = split_prime(int(p))
        rows.append({"p": info.p, "kind": info.kind.value, "t": str(info.t), "Q": info.Q})
    logger.debug(f"Listed {len(rows)} primes up to {limit}")
    return rows
