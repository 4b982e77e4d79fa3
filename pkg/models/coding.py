"""
Q-ary codes over a residue alphabet and the Gilbert-Varshamov machinery.

Codewords are stored as index vectors (entries in [0, Q)); binding indices to
Eisenstein residues happens when a code is used in a concatenation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from utils.errors import BoundDomainError, CapExceededError, InvalidArgumentError, SpecFileError
from utils.logger import setup_logger
from utils.numerics import DOUBLE, Numerics, Real

logger = setup_logger(__name__)

GREEDY_SPACE_LIMIT = 10 ** 6
SCAN_BLOCK = 4096

Codeword = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class QaryCode:
    """An (n, M, d_H) code over the alphabet {0, ..., Q-1}."""

    length: int
    alphabet_size: int
    codewords: tuple[Codeword, ...]

    def __post_init__(self):
        if self.length < 1 or self.alphabet_size < 2:
            raise InvalidArgumentError(
                f"Need length >= 1 and Q >= 2, got n={self.length}, Q={self.alphabet_size}"
            )
        if not self.codewords:
            raise InvalidArgumentError("A code needs at least one codeword")
        for word in self.codewords:
            if len(word) != self.length:
                raise InvalidArgumentError(f"Codeword {word} does not have length {self.length}")
            if any(not 0 <= x < self.alphabet_size for x in word):
                raise InvalidArgumentError(f"Codeword {word} leaves the alphabet [0, {self.alphabet_size})")
        if len(set(self.codewords)) != len(self.codewords):
            raise InvalidArgumentError("Codewords must be distinct")

    @classmethod
    def from_words(cls, Q: int, words: Iterable[Sequence[int]]) -> QaryCode:
        words = tuple(tuple(int(x) for x in w) for w in words)
        if not words:
            raise InvalidArgumentError("A code needs at least one codeword")
        return cls(length=len(words[0]), alphabet_size=Q, codewords=words)

    @property
    def size(self) -> int:
        return len(self.codewords)

    @property
    def contains_zero(self) -> bool:
        return tuple([0] * self.length) in self.codewords

    def as_array(self) -> np.ndarray:
        return np.array(self.codewords, dtype=np.int64)

    @cached_property
    def min_distance(self) -> Optional[int]:
        """Exhaustive pairwise minimum Hamming distance; None for a single codeword."""
        if self.size < 2:
            return None
        words = self.as_array()
        best = self.length
        for i in range(self.size - 1):
            distances = np.count_nonzero(words[i + 1:] != words[i], axis=1)
            best = min(best, int(distances.min()))
            if best == 1:
                break
        return best

    @property
    def rate(self) -> float:
        """R(C) = log_Q(M) / n."""
        return math.log(self.size, self.alphabet_size) / self.length

    @property
    def relative_distance(self) -> Optional[float]:
        """rho(C) = d_H / n."""
        if self.min_distance is None:
            return None
        return self.min_distance / self.length

    def __repr__(self) -> str:
        return (f"QaryCode(n={self.length}, Q={self.alphabet_size}, "
                f"M={self.size}, d={self.min_distance})")


def _check_rho(rho) -> None:
    if not 0 <= rho <= 1:
        raise InvalidArgumentError(f"Entropy argument {rho} is outside [0, 1]")


def entropy_from_log2(Q: int, log2_rho: Real, numerics: Numerics = DOUBLE) -> Real:
    """
    H_Q(rho) from log2(rho), valid for arguments far below double range.

    Uses rho * (log2(Q-1) - log2 rho) - (1 - rho) * log2(1 - rho), all over log2 Q.

    Args:
        Q: Alphabet size (>= 2)
        log2_rho: log2 of the argument (<= 0)
        numerics: Precision back-end

    Returns:
        Entropy value
    """
    if log2_rho > 0:
        raise InvalidArgumentError(f"log2(rho) = {log2_rho} > 0")
    rho = numerics.exp2(log2_rho)
    if rho == 1:
        return numerics.log2(Q - 1) / numerics.log2(Q)
    tail = -(1 - rho) * numerics.log1p(-rho) / numerics.ln2
    return (rho * (numerics.log2(Q - 1) - log2_rho) + tail) / numerics.log2(Q)


def entropy(Q: int, rho, numerics: Numerics = DOUBLE) -> Real:
    """
    The Q-ary entropy function H_Q on [0, 1].

    Args:
        Q: Alphabet size (>= 2)
        rho: Argument in [0, 1]
        numerics: Precision back-end

    Returns:
        H_Q(rho), with H_Q(0) = 0 and H_Q(1) = log_Q(Q-1)
    """
    if Q < 2:
        raise InvalidArgumentError(f"Alphabet size must be >= 2, got {Q}")
    _check_rho(rho)
    if rho == 0:
        return numerics.real(0)
    return entropy_from_log2(Q, numerics.log2(numerics.real(rho)), numerics)


def entropy_array(Q: int, log2_rho: np.ndarray) -> np.ndarray:
    """Vectorised double-precision H_Q from an array of log2(rho) values."""
    log2_rho = np.asarray(log2_rho, dtype=float)
    rho = np.exp2(log2_rho)
    tail = -(1.0 - rho) * np.log1p(-rho) / math.log(2.0)
    return (rho * (math.log2(Q - 1) - log2_rho) + tail) / math.log2(Q)


def clipped_entropy(Q: int, rho, numerics: Numerics = DOUBLE) -> Real:
    """H'_Q: equal to H_Q below (Q-1)/Q and to 1 from there on."""
    _check_rho(rho)
    if rho * Q >= Q - 1:
        return numerics.real(1)
    return entropy(Q, rho, numerics)


def gv_rate(Q: int, rho, numerics: Numerics = DOUBLE) -> Real:
    """
    Asymptotic Gilbert-Varshamov rate R_GV = 1 - H_Q(rho).

    Args:
        Q: Alphabet size
        rho: Relative distance in the open interval (0, (Q-1)/Q)

    Returns:
        Achievable rate in (0, 1)
    """
    if not 0 < rho < (Q - 1) / Q:
        raise BoundDomainError(f"GV rate needs 0 < rho < {(Q - 1) / Q}, got {rho}")
    return 1 - entropy(Q, rho, numerics)


def hamming_ball_volume(n: int, Q: int, radius: int) -> int:
    """Number of words within Hamming distance `radius` of a fixed word."""
    return sum(math.comb(n, j) * (Q - 1) ** j for j in range(min(radius, n) + 1))


def gv_size_bound(n: int, Q: int, d: int) -> int:
    """Finite GV guarantee: some code has M >= ceil(Q^n / V(n, d-1))."""
    if not 1 <= d <= n:
        raise InvalidArgumentError(f"Need 1 <= d <= n, got d={d}, n={n}")
    volume = hamming_ball_volume(n, Q, d - 1)
    return -(-Q ** n // volume)


def hamming_size_bound(n: int, Q: int, d: int) -> int:
    """Sphere-packing limit: every code has M <= Q^n / V(n, floor((d-1)/2))."""
    if not 1 <= d <= n:
        raise InvalidArgumentError(f"Need 1 <= d <= n, got d={d}, n={n}")
    return Q ** n // hamming_ball_volume(n, Q, (d - 1) // 2)


def _all_words(n: int, Q: int) -> np.ndarray:
    # row k holds the base-Q digits of k, most significant first
    indices = np.arange(Q ** n, dtype=np.int64)
    powers = Q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % Q


def greedy_gv_code(n: int, Q: int, d: int) -> QaryCode:
    """
    Lexicographic greedy code: scan all words from zero, keep each word at
    Hamming distance >= d from everything kept so far.

    Each kept word forbids only its radius d-1 Hamming ball, found by adding
    the digit patterns of weight 1..d-1 to it mod Q.

    Args:
        n: Length
        Q: Alphabet size
        d: Required minimum distance, 1 <= d <= n

    Returns:
        QaryCode containing the zero word with M >= gv_size_bound(n, Q, d)
    """
    if not 1 <= d <= n:
        raise InvalidArgumentError(f"Need 1 <= d <= n, got d={d}, n={n}")
    if Q < 2:
        raise InvalidArgumentError(f"Alphabet size must be >= 2, got {Q}")
    if Q ** n > GREEDY_SPACE_LIMIT:
        raise CapExceededError(f"Q^n = {Q ** n} words exceed the greedy limit {GREEDY_SPACE_LIMIT}")

    words = _all_words(n, Q)
    if d == 1:
        chosen = range(len(words))
    else:
        weights = np.count_nonzero(words, axis=1)
        patterns = words[(weights >= 1) & (weights < d)]
        powers = Q ** np.arange(n - 1, -1, -1, dtype=np.int64)
        forbidden = np.zeros(len(words), dtype=bool)
        chosen = []
        index = 0
        while index is not None:
            chosen.append(index)
            forbidden[index] = True
            forbidden[((words[index] + patterns) % Q) @ powers] = True
            index = _next_free(forbidden, index + 1)

    code = QaryCode(length=n, alphabet_size=Q,
                    codewords=tuple(tuple(int(x) for x in words[i]) for i in chosen))
    logger.debug(f"Greedy code n={n} Q={Q} d={d}: M={code.size}")
    return code


def _next_free(forbidden: np.ndarray, start: int) -> Optional[int]:
    while start < len(forbidden):
        free = np.flatnonzero(~forbidden[start:start + SCAN_BLOCK])
        if free.size:
            return start + int(free[0])
        start += SCAN_BLOCK
    return None


def repetition_code(n: int, Q: int) -> QaryCode:
    """The code {(a, ..., a) : a in [0, Q)}."""
    if n < 1:
        raise InvalidArgumentError(f"Length must be >= 1, got {n}")
    return QaryCode(length=n, alphabet_size=Q, codewords=tuple((a,) * n for a in range(Q)))


def save_code(code: QaryCode, path: Union[str, Path]) -> None:
    """Write a code as "n Q M d" followed by one codeword per line (d = 0 when M = 1)."""
    lines = [f"{code.length} {code.alphabet_size} {code.size} {code.min_distance or 0}"]
    lines.extend(" ".join(str(x) for x in word) for word in code.codewords)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_code(path: Union[str, Path]) -> QaryCode:
    """
    Read a code written by save_code; the header is checked against the body.

    Args:
        path: Code file

    Returns:
        QaryCode
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecFileError(f"Cannot read code file {path}: {e}") from e

    rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    if not rows:
        raise SpecFileError(f"{path}: empty code file")
    try:
        header = [int(x) for x in rows[0]]
        words = [tuple(int(x) for x in row) for row in rows[1:]]
    except ValueError as e:
        raise SpecFileError(f"{path}: non-integer entry ({e})") from e
    if len(header) != 4:
        raise SpecFileError(f"{path}: header must be 'n Q M d'")

    n, Q, M, d = header
    if len(words) != M:
        raise SpecFileError(f"{path}: header says M={M}, found {len(words)} codewords")
    try:
        code = QaryCode(length=n, alphabet_size=Q, codewords=tuple(words))
    except InvalidArgumentError as e:
        raise SpecFileError(f"{path}: {e}") from e
    if (code.min_distance or 0) != d:
        raise SpecFileError(f"{path}: header says d={d}, computed {code.min_distance or 0}")
    return code
