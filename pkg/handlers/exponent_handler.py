"""
Exponent handler: evaluate one closed-form density-exponent bound.
"""
from models.asymptotics import (
    BoundFamily,
    PrimePower,
    congruence_bound,
    general_concat_bound,
    principal_bound,
    ring_of_integers_bound,
    rt_report,
)
from utils.errors import UsageError
from utils.validators import (
    require,
    validate_even_exponent,
    validate_fraction,
    validate_positive_int,
    validate_prime,
    validate_unit_interval,
)

FAMILIES = ("ring", "principal", "congruence", "general", "rt-principal", "rt-congruence")


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("exponent", parents=parents,
                                   help="Evaluate one asymptotic density-exponent bound")
    parser.add_argument("family", choices=FAMILIES)
    parser.add_argument("--Q", help="Norm of the prime ideal (alphabet size)")
    parser.add_argument("--ell", help="Number of code levels (ring family)")
    parser.add_argument("--p", help="Prime of q = p^r")
    parser.add_argument("--r", help="Even exponent of q = p^r")
    parser.add_argument("--y", help="Divisor-degree parameter in (0, 1], decimal or fraction")
    parser.add_argument("--c2", help="Squared distance coefficient (general family)")
    parser.add_argument("--delta", help="Normalised log-determinant (general family)")
    parser.set_defaults(handler=handle)


def _needs(args, *names: str) -> None:
    missing = [f"--{name}" for name in names if getattr(args, name) is None]
    if missing:
        raise UsageError(f"{args.family} needs {', '.join(missing)}")


def _prime_power(args) -> PrimePower:
    p = require(validate_prime, args.p, "--p")
    r = require(validate_even_exponent, args.r, "--r")
    return PrimePower(p, r)


def handle(args, numerics) -> dict:
    """
    Evaluate the requested family and return its report.

    Args:
        args: Parsed arguments
        numerics: Precision back-end

    Returns:
        BoundReport as a dict
    """
    family = args.family
    if family == "ring":
        _needs(args, "Q", "ell")
        Q = require(lambda s: validate_positive_int(s, minimum=2), args.Q, "--Q")
        ell = require(lambda s: validate_positive_int(s, minimum=0), args.ell, "--ell")
        report = ring_of_integers_bound(Q, ell, numerics)
    elif family == "principal":
        _needs(args, "Q", "p", "r")
        Q = require(lambda s: validate_positive_int(s, minimum=2), args.Q, "--Q")
        report = principal_bound(Q, _prime_power(args), numerics)
    elif family == "congruence":
        _needs(args, "Q", "p", "r", "y")
        Q = require(lambda s: validate_positive_int(s, minimum=2), args.Q, "--Q")
        y = require(validate_unit_interval, args.y, "--y")
        report = congruence_bound(Q, _prime_power(args), y, numerics)
    elif family == "general":
        _needs(args, "Q", "c2", "delta")
        Q = require(lambda s: validate_positive_int(s, minimum=2), args.Q, "--Q")
        c2 = require(validate_unit_interval, args.c2, "--c2")
        delta = require(validate_fraction, args.delta, "--delta")
        report = general_concat_bound(Q, c2, delta, numerics)
    elif family == "rt-principal":
        _needs(args, "p", "r")
        report = rt_report(BoundFamily.RT_PRINCIPAL, _prime_power(args), numerics=numerics)
    else:
        _needs(args, "p", "r", "y")
        y = require(validate_unit_interval, args.y, "--y")
        report = rt_report(BoundFamily.RT_CONGRUENCE, _prime_power(args), y, numerics)
    return report.to_dict()
