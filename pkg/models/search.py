"""
Parameter searches over (Q, q = p^r, y).

Grids are evaluated in vectorised double precision, one prime-ideal norm Q
per task, so a worker pool over Q gives the same numbers as a serial run.
The winner is re-evaluated with the requested numerics.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import sympy

from config import PACKING_THREADS, PRECISION_DROP_LOG2
from models.asymptotics import (
    BoundFamily,
    BoundReport,
    PrimePower,
    congruence_bound,
    principal_bound,
    ring_of_integers_bound,
    rt_report,
)
from models.coding import entropy_array
from models.eisenstein import split_prime
from utils.errors import EmptyGridError, InvalidArgumentError, SpecFileError
from utils.logger import setup_logger
from utils.numerics import DOUBLE, Numerics

logger = setup_logger(__name__)

TIE_TOLERANCE = 1e-12
ROW_BLOCK = 64
DESCENT_MANTISSAS = range(10, 201)
POLISH_HALF_WIDTH = 50
LN2 = math.log(2.0)
LOG2_E = 1.0 / LN2
LOG2_PI_E = math.log2(math.pi * math.e)
LOG2_PI_HALF = math.log2(math.pi / 2.0)
QUARTER_LOG2_3 = math.log2(3.0) / 4.0

Stage = tuple[Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class SearchConfig:
    prime_limit_Q: int = 100
    prime_limit_q: int = 100
    r_range: tuple[int, int] = (2, 250)
    y_schedule: tuple[Stage, ...] = ()
    refinements: int = 0
    ell: int = 1000

    def __post_init__(self):
        r_min, r_max = self.r_range
        if r_min < 2 or r_min % 2 or r_max % 2 or r_max < r_min:
            raise InvalidArgumentError(f"r_range must hold even values 2 <= r_min <= r_max, got {self.r_range}")
        if self.prime_limit_Q < 2 or self.prime_limit_q < 2:
            raise InvalidArgumentError("Prime limits must be >= 2")
        for start, end, step in self.y_schedule:
            if step <= 0 or not 0 < start <= end <= 1:
                raise InvalidArgumentError(f"Invalid y stage ({start}, {end}, {step})")
        if self.refinements < 0 or self.ell < 0:
            raise InvalidArgumentError("refinements and ell must be >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> SearchConfig:
        schedule = tuple(tuple(Fraction(str(x)) for x in stage) for stage in data.get("y_schedule", ()))
        if any(len(stage) != 3 for stage in schedule):
            raise InvalidArgumentError("Each y stage needs (start, end, step)")
        return cls(
            prime_limit_Q=int(data.get("prime_limit_Q", 100)),
            prime_limit_q=int(data.get("prime_limit_q", 100)),
            r_range=(int(data.get("r_min", 2)), int(data.get("r_max", 250))),
            y_schedule=schedule,
            refinements=int(data.get("refinements", 0)),
            ell=int(data.get("ell", 1000)),
        )

    def to_dict(self) -> dict:
        return {
            "prime_limit_Q": self.prime_limit_Q,
            "prime_limit_q": self.prime_limit_q,
            "r_min": self.r_range[0],
            "r_max": self.r_range[1],
            "y_schedule": [[str(x) for x in stage] for stage in self.y_schedule],
            "refinements": self.refinements,
            "ell": self.ell,
        }


PUBLISHED_PRINCIPAL = SearchConfig(prime_limit_Q=100, prime_limit_q=100, r_range=(2, 250))
PUBLISHED_CONGRUENCE = SearchConfig(
    prime_limit_Q=60,
    prime_limit_q=60,
    r_range=(2, 100),
    y_schedule=(
        (Fraction(1, 10), Fraction(1), Fraction(1, 100)),
        (Fraction(1, 100), Fraction(1, 5), Fraction(1, 10000)),
    ),
    refinements=24,
)
PUBLISHED_RING = SearchConfig(prime_limit_Q=100, prime_limit_q=100, ell=1000)


def load_search_config(path: Union[str, Path]) -> SearchConfig:
    """Read a JSON search configuration."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return SearchConfig.from_dict(data)
    except OSError as e:
        raise SpecFileError(f"Cannot read search config {path}: {e}") from e
    except (json.JSONDecodeError, TypeError, ValueError, AttributeError) as e:
        raise SpecFileError(f"{path}: {e}") from e


@dataclass(frozen=True)
class GridRow:
    Q: int
    p: int
    r: int
    ell: int
    lambda_lower: float
    y: Optional[Fraction] = None
    stage: int = 0


@dataclass
class SearchResult:
    family: BoundFamily
    best: BoundReport
    grid: list[GridRow] = field(default_factory=list)

    @property
    def evaluations(self) -> int:
        return len(self.grid)


def prime_ideal_norms(limit: int) -> list[int]:
    """Sorted norms of the chosen prime ideals above the primes <= limit."""
    return sorted({split_prime(int(p)).Q for p in sympy.primerange(2, limit + 1)})


def prime_powers(limit: int, r_range: tuple[int, int]) -> list[tuple[int, int]]:
    return [(int(p), r) for p in sympy.primerange(2, limit + 1)
            for r in range(r_range[0], r_range[1] + 1, 2)]


def y_grid(start: Fraction, end: Fraction, step: Fraction) -> list[Fraction]:
    """Exact grid start, start + step, ... <= end, restricted to (0, 1]."""
    count = int((end - start) / step) + 1
    return [y for y in (start + k * step for k in range(count)) if 0 < y <= 1]


def _log2_1p_grid(values: np.ndarray, sign: int) -> np.ndarray:
    # log2(1 + sign 2^-L), dropped beyond the working threshold
    small = np.exp2(-values)
    return np.where(values >= PRECISION_DROP_LOG2, 0.0, np.log1p(sign * small) / LN2)


def _tail_grid(L: np.ndarray) -> np.ndarray:
    s = np.exp2(-L / 2.0)
    return L * s / (1.0 - s)


def principal_lattice_grid(L: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised lattice term and log2 c^2 of the principal family."""
    plus = _log2_1p_grid(L, +1)
    minus = _log2_1p_grid(L, -1)
    lattice = LOG2_PI_E / 2.0 - L / 2.0 - _tail_grid(L) - plus / 2.0 + minus - QUARTER_LOG2_3
    return lattice, 1.0 - L - plus


def congruence_lattice_grid(L: np.ndarray, ln_q: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised lattice term and log2 c^2 of the congruence family (broadcasting)."""
    minus = _log2_1p_grid(L, -1)
    log2_y = np.log2(y)
    log2_ln_q = np.log2(ln_q)
    lattice = (LOG2_PI_HALF / 2.0 - log2_ln_q / 2.0 - _tail_grid(L) + minus
               + log2_y / 2.0 + (1.0 - y) / 2.0 * LOG2_E - QUARTER_LOG2_3)
    return lattice, log2_y - log2_ln_q


def levels_grid(Q: int, log2_c2: np.ndarray) -> np.ndarray:
    log2_limit = math.log2((Q - 1) / Q)
    ell = np.floor((log2_limit - log2_c2) / math.log2(Q) + 1e-12)
    return np.maximum(ell, 0).astype(np.int64)


def codes_grid(Q: int, log2_c2: np.ndarray, ell: np.ndarray, kmax: int) -> np.ndarray:
    """Vectorised (1/2) log2 Q * sum_{k<=l} (1 - H_Q(Q^k c^2)) with a fixed number of columns."""
    if kmax == 0:
        return np.zeros_like(log2_c2)
    log2_Q = math.log2(Q)
    k = np.arange(1, kmax + 1, dtype=float)
    args = log2_c2[..., None] + k * log2_Q
    active = k <= ell[..., None]
    terms = np.where(active, 1.0 - entropy_array(Q, np.where(active, args, -1.0)), 0.0)
    return log2_Q / 2.0 * terms.sum(axis=-1)


def _principal_task(Q: int, grid: Sequence[tuple[int, int]]) -> list[GridRow]:
    p = np.array([g[0] for g in grid], dtype=float)
    r = np.array([g[1] for g in grid], dtype=float)
    L = r * np.log2(p)
    lattice, log2_c2 = principal_lattice_grid(L)
    ell = levels_grid(Q, log2_c2)
    lam = lattice + codes_grid(Q, log2_c2, ell, int(ell.max()))
    return [GridRow(Q, pp, rr, int(e), float(v)) for (pp, rr), e, v in zip(grid, ell, lam)]


def _max_levels(Q: int, y_min: float, ln_q_max: float) -> int:
    # levels grow as y shrinks and ln q grows
    log2_limit = math.log2((Q - 1) / Q)
    return max(0, math.floor((log2_limit - math.log2(y_min) + math.log2(ln_q_max)) / math.log2(Q) + 1e-12))


def _best_y(Q: int, L: np.ndarray, ln_q: np.ndarray,
            ys: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per q row: index of the best y in that row of `ys`, its level count and its lambda."""
    kmax = _max_levels(Q, float(ys.min()), float(ln_q.max()))
    lattice, log2_c2 = congruence_lattice_grid(L[:, None], ln_q[:, None], ys)
    ell = levels_grid(Q, log2_c2)
    lam = lattice + codes_grid(Q, log2_c2, ell, kmax)
    j = np.argmax(lam, axis=1)
    rows = np.arange(len(L))
    return j, ell[rows, j], lam[rows, j]


def decade(y: Fraction) -> int:
    """The exponent e with 10^e <= y < 10^(e+1)."""
    e = math.floor(math.log10(y))
    while Fraction(10) ** e > y:
        e -= 1
    while Fraction(10) ** (e + 1) <= y:
        e += 1
    return e


def descent_grid(best: Fraction) -> list[Fraction]:
    """Two-digit decimals from a decade below the best y up to twice its decade, capped at 1."""
    unit = Fraction(10) ** (decade(best) - 2)
    return [min(m * unit, Fraction(1)) for m in DESCENT_MANTISSAS]


def polish_grid(best: Fraction) -> list[Fraction]:
    """Decimals around the best y with a step below best/1000, kept inside (0, 1]."""
    step = Fraction(10) ** (decade(best) - 3)
    while step >= best / 1000:
        step /= 10
    return [y if 0 < y <= 1 else best
            for y in (best + k * step for k in range(-POLISH_HALF_WIDTH, POLISH_HALF_WIDTH + 1))]


class _CongruenceTracker:
    """Running best (y, lambda) per q row of one Q, plus the rows dumped so far."""

    def __init__(self, Q: int, grid: Sequence[tuple[int, int]]):
        self.Q = Q
        self.grid = list(grid)
        self.L = np.array([r * math.log2(p) for p, r in grid])
        self.ln_q = np.array([r * math.log(p) for p, r in grid])
        self.best_y: list[Optional[Fraction]] = [None] * len(grid)
        self.best_lambda = np.full(len(grid), -np.inf)
        self.rows: list[GridRow] = []

    def evaluate(self, indices: Sequence[int], ys: Sequence[Sequence[Fraction]], stage: int) -> list[bool]:
        """Evaluate one y list per selected row; returns which rows moved to a lower decade."""
        moved = []
        for start in range(0, len(indices), ROW_BLOCK):
            block = list(indices[start:start + ROW_BLOCK])
            block_ys = ys[start:start + ROW_BLOCK]
            y_values = np.array([[float(y) for y in row] for row in block_ys])
            index, ell, lam = _best_y(self.Q, self.L[block], self.ln_q[block], y_values)
            for i, row_ys, j, e, value in zip(block, block_ys, index, ell, lam):
                p, r = self.grid[i]
                y = row_ys[int(j)]
                self.rows.append(GridRow(self.Q, p, r, int(e), float(value), y=y, stage=stage))
                previous = self.best_y[i]
                if value > self.best_lambda[i] + TIE_TOLERANCE:
                    moved.append(previous is not None and decade(y) < decade(previous))
                    self.best_y[i], self.best_lambda[i] = y, value
                else:
                    moved.append(False)
        return moved


def _congruence_task(Q: int, grid: Sequence[tuple[int, int]], cfg: SearchConfig) -> list[GridRow]:
    tracker = _CongruenceTracker(Q, grid)
    everything = list(range(len(grid)))
    stage = 0
    for start, end, step in cfg.y_schedule:
        ys = y_grid(start, end, step)
        if ys:
            tracker.evaluate(everything, [ys] * len(grid), stage)
        stage += 1

    active = [i for i in everything if tracker.best_y[i] is not None]
    for _ in range(cfg.refinements):
        if not active:
            break
        moved = tracker.evaluate(active, [descent_grid(tracker.best_y[i]) for i in active], stage)
        active = [i for i, down in zip(active, moved) if down]
        stage += 1

    if cfg.refinements:
        ready = [i for i in everything if tracker.best_y[i] is not None]
        tracker.evaluate(ready, [polish_grid(tracker.best_y[i]) for i in ready], stage)
    logger.debug(f"Congruence Q={Q}: {len({row.stage for row in tracker.rows})} stages, {len(tracker.rows)} rows")
    return tracker.rows


def _rt_task(Q: int, grid: Sequence[tuple[int, int]], y: Optional[Fraction]) -> list[GridRow]:
    p = np.array([g[0] for g in grid], dtype=float)
    r = np.array([g[1] for g in grid], dtype=float)
    L = r * np.log2(p)
    if y is None:
        lattice, _ = principal_lattice_grid(L)
    else:
        lattice, _ = congruence_lattice_grid(L, r * np.log(p), np.full_like(L, float(y)))
    values = lattice + QUARTER_LOG2_3
    return [GridRow(Q, pp, rr, 0, float(v), y=y) for (pp, rr), v in zip(grid, values)]


def _run(tasks: list[tuple], worker, threads: int) -> list[list[GridRow]]:
    if threads <= 1 or len(tasks) <= 1:
        return [worker(*task) for task in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(worker, *task) for task in tasks]
        return [future.result() for future in futures]


def select_best(rows: Sequence[GridRow]) -> GridRow:
    """Argmax of lambda; values within 1e-12 of the best go to the smallest (Q, p, r, y)."""
    if not rows:
        raise EmptyGridError("No grid point was evaluated")
    top = max(row.lambda_lower for row in rows)
    candidates = [row for row in rows if row.lambda_lower >= top - TIE_TOLERANCE]
    return min(candidates, key=lambda row: (row.Q, row.p, row.r, row.y or 0))


def _grid(cfg: SearchConfig) -> tuple[list[int], list[tuple[int, int]]]:
    norms = prime_ideal_norms(cfg.prime_limit_Q)
    powers = prime_powers(cfg.prime_limit_q, cfg.r_range)
    if not norms or not powers:
        raise EmptyGridError(f"Empty search grid for {cfg}")
    logger.info(f"Search grid: {len(norms)} norms x {len(powers)} prime powers")
    return norms, powers


def search_principal(cfg: SearchConfig = PUBLISHED_PRINCIPAL, threads: int = PACKING_THREADS,
                     numerics: Numerics = DOUBLE) -> SearchResult:
    """
    Maximise the principal-family bound over (Q, p, r).

    Args:
        cfg: Search grid
        threads: Worker processes (one task per Q)
        numerics: Back-end for re-evaluating the winner

    Returns:
        SearchResult with the full grid dump
    """
    norms, powers = _grid(cfg)
    chunks = _run([(Q, powers) for Q in norms], _principal_task, threads)
    rows = [row for chunk in chunks for row in chunk]
    winner = select_best(rows)
    logger.info(f"Principal search best: Q={winner.Q} q={winner.p}^{winner.r} "
                f"lambda={winner.lambda_lower:.12f}")
    best = principal_bound(winner.Q, PrimePower(winner.p, winner.r), numerics)
    return SearchResult(BoundFamily.PRINCIPAL, best, rows)


def search_congruence(cfg: SearchConfig = PUBLISHED_CONGRUENCE, threads: int = PACKING_THREADS,
                      numerics: Numerics = DOUBLE) -> SearchResult:
    """
    Maximise the congruence-family bound over (Q, p, r, y).

    The explicit schedule runs first for every (Q, q). Then, per (Q, q), up to
    `refinements` decade-down stages scan two-digit decimals over
    [10^(e-1), 2 10^e], e being the decade of the running best y, for as long
    as the best improves and drops a decade. A last stage scans the running
    best +- 50 steps, the step being the first power of ten below best/1000.

    Args:
        cfg: Search grid with a non-empty y schedule
        threads: Worker processes (one task per Q)
        numerics: Back-end for re-evaluating the winner

    Returns:
        SearchResult whose grid holds the best y per (Q, q, stage)
    """
    if not cfg.y_schedule:
        raise EmptyGridError("Congruence search needs a y schedule")
    norms, powers = _grid(cfg)
    chunks = _run([(Q, powers, cfg) for Q in norms], _congruence_task, threads)
    rows = [row for chunk in chunks for row in chunk]
    winner = select_best(rows)
    logger.info(f"Congruence search best: Q={winner.Q} q={winner.p}^{winner.r} y={winner.y} "
                f"lambda={winner.lambda_lower:.12f}")
    best = congruence_bound(winner.Q, PrimePower(winner.p, winner.r), winner.y, numerics)
    return SearchResult(BoundFamily.CONGRUENCE, best, rows)


def search_ring_of_integers(cfg: SearchConfig = PUBLISHED_RING, numerics: Numerics = DOUBLE) -> SearchResult:
    """Best ring-of-integers bound over the norms of prime ideals above primes <= limit."""
    norms = prime_ideal_norms(cfg.prime_limit_Q)
    if not norms:
        raise EmptyGridError("No prime ideal norm in range")
    reports = [ring_of_integers_bound(Q, cfg.ell, numerics) for Q in norms]
    rows = [GridRow(rep.Q, 0, 0, rep.ell, float(rep.lambda_lower)) for rep in reports]
    winner = select_best(rows)
    best = next(rep for rep in reports if rep.Q == winner.Q)
    return SearchResult(BoundFamily.RING_OF_INTEGERS, best, rows)


def search_rt_baseline(family: BoundFamily, cfg: SearchConfig = PUBLISHED_PRINCIPAL,
                       y: Optional[Fraction] = None, numerics: Numerics = DOUBLE) -> SearchResult:
    """Maximise a lattice-only baseline over q = p^r (y fixed for the congruence family)."""
    if family is BoundFamily.RT_CONGRUENCE and y is None:
        y = Fraction(1)
    if family is BoundFamily.RT_PRINCIPAL:
        y = None
    powers = prime_powers(cfg.prime_limit_q, cfg.r_range)
    if not powers:
        raise EmptyGridError(f"Empty search grid for {cfg}")
    rows = _rt_task(1, powers, y)
    winner = select_best(rows)
    best = rt_report(family, PrimePower(winner.p, winner.r), y, numerics)
    return SearchResult(family, best, rows)
