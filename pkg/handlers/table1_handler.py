"""
Table handler: componential contributions of the principal and congruence families.
"""
from fractions import Fraction

from models.asymptotics import componential_table
from utils.validators import (
    require,
    validate_even_exponent,
    validate_positive_int,
    validate_prime,
    validate_unit_interval,
)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("table1", parents=parents,
                                   help="Lattice and codes contributions side by side")
    parser.add_argument("--Q", default="4")
    parser.add_argument("--p", default="11")
    parser.add_argument("--r", default="94")
    parser.add_argument("--y", default=str(Fraction(1, 4_000_000_000)))
    parser.set_defaults(handler=handle, default_format="text")


def handle(args, numerics) -> list[dict]:
    """Rows lambda, ell, c, lattice, codes with one column per family."""
    table = componential_table(
        Q=require(lambda s: validate_positive_int(s, minimum=2), args.Q, "--Q"),
        p=require(validate_prime, args.p, "--p"),
        r=require(validate_even_exponent, args.r, "--r"),
        y=require(validate_unit_interval, args.y, "--y"),
        numerics=numerics,
    )
    return [{"row": name, "principal": principal, "congruence": congruence}
            for name, principal, congruence in table.rows()]
