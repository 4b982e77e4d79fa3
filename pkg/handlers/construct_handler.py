"""
Construct handler: build a desk-scale concatenation and check it by enumeration.
"""
from config import ENUMERATION_CAP
from models.concat import brute_density_check, build, construction_report, load_spec, verify
from utils.errors import VerificationError
from utils.logger import setup_logger
from utils.validators import require, validate_positive_int

logger = setup_logger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("construct", parents=parents,
                                   help="Build a concatenated packing from a spec file")
    parser.add_argument("--spec", required=True, help="Concatenation spec file")
    parser.add_argument("--verify", action="store_true",
                        help="Check distance, coset count and density exponent by enumeration")
    parser.add_argument("--window", help="Also count points in the box [-w, w)^N")
    parser.add_argument("--cap", default=str(ENUMERATION_CAP), help="Largest accepted coset count")
    parser.set_defaults(handler=handle)


def handle(args, numerics) -> dict:
    """
    Build the packing from the spec file and report its accounting.

    Args:
        args: Parsed arguments
        numerics: Unused (enumeration runs in double precision)

    Returns:
        Construction report
    """
    cap = require(validate_positive_int, args.cap, "--cap")
    spec = load_spec(args.spec)
    pkg = build(spec, cap=cap)
    measurement = verify(pkg) if args.verify else None
    report = construction_report(pkg, measurement)
    if args.window is not None:
        window = require(validate_positive_int, args.window, "--window")
        check = brute_density_check(pkg, window)
        report["density_check"] = check.to_dict()
        if args.verify and not check.passed:
            raise VerificationError(
                f"Point density {check.measured} deviates from {check.expected} "
                f"by more than {check.tolerance:.3f}"
            )
    if args.verify:
        report["verified"] = True
        logger.info(f"Verified construction from {args.spec}")
    return report
