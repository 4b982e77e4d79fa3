"""
Search handler: grid searches for the best bound parameters.
"""
from pathlib import Path

from config import PACKING_THREADS
from models.asymptotics import BoundFamily
from models.search import (
    PUBLISHED_CONGRUENCE,
    PUBLISHED_PRINCIPAL,
    PUBLISHED_RING,
    SearchResult,
    load_search_config,
    search_congruence,
    search_principal,
    search_ring_of_integers,
    search_rt_baseline,
)
from utils.errors import UsageError
from utils.formatting import to_csv
from utils.logger import setup_logger
from utils.validators import require, validate_positive_int, validate_unit_interval

logger = setup_logger(__name__)

PRESETS = {
    "principal": PUBLISHED_PRINCIPAL,
    "congruence": PUBLISHED_CONGRUENCE,
    "ring": PUBLISHED_RING,
    "rt-principal": PUBLISHED_PRINCIPAL,
    "rt-congruence": PUBLISHED_CONGRUENCE,
}


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("search", parents=parents,
                                   help="Search the parameter grid for the best bound")
    parser.add_argument("family", choices=tuple(PRESETS))
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", help="JSON search configuration")
    source.add_argument("--paper-grid", action="store_true", help="Use the published grid")
    parser.add_argument("--threads", default=str(PACKING_THREADS), help="Worker processes")
    parser.add_argument("--y", default="1", help="Fixed y for rt-congruence")
    parser.add_argument("--dump", help="Write the evaluated grid as CSV to this file")
    parser.set_defaults(handler=handle)


def _dump(result: SearchResult, path: str, numerics) -> None:
    rows = [{
        "Q": row.Q, "p": row.p, "r": row.r, "y": row.y, "stage": row.stage,
        "ell": row.ell, "lambda_lower": row.lambda_lower,
    } for row in result.grid]
    Path(path).write_text(to_csv(rows, numerics), encoding="utf-8")
    logger.info(f"Wrote {len(rows)} grid rows to {path}")


def handle(args, numerics) -> dict:
    """
    Run the search and return the best report with the grid size.

    Args:
        args: Parsed arguments
        numerics: Back-end for the re-evaluated winner

    Returns:
        Best BoundReport as a dict plus "evaluations"
    """
    threads = require(validate_positive_int, args.threads, "--threads")
    cfg = PRESETS[args.family] if args.paper_grid else load_search_config(args.config)

    if args.family == "principal":
        result = search_principal(cfg, threads, numerics)
    elif args.family == "congruence":
        if not cfg.y_schedule:
            raise UsageError("congruence search needs a y_schedule in its configuration")
        result = search_congruence(cfg, threads, numerics)
    elif args.family == "ring":
        result = search_ring_of_integers(cfg, numerics)
    elif args.family == "rt-principal":
        result = search_rt_baseline(BoundFamily.RT_PRINCIPAL, cfg, numerics=numerics)
    else:
        y = require(validate_unit_interval, args.y, "--y")
        result = search_rt_baseline(BoundFamily.RT_CONGRUENCE, cfg, y, numerics)

    if args.dump:
        _dump(result, args.dump, numerics)
    report = result.best.to_dict()
    report["evaluations"] = result.evaluations
    return report
