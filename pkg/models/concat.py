"""
Desk-scale concatenation C_0 + t C_1 + ... + t^(l-1) C_(l-1) + t^l P.

P = complexify(base) for a full-rank integer lattice base; the codes live over
the residue alphabet of a prime ideal (t) of norm Q. Everything is built
explicitly so that distances and densities can be checked by enumeration.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import sympy
from sympy.matrices.normalforms import hermite_normal_form

from config import ENUMERATION_CAP, ENUMERATION_CHUNK
from models.coding import QaryCode, load_code
from models.eisenstein import ZERO, EisensteinInt, PrimeIdealInfo, split_prime
from models.lattice import (
    DensityMetrics,
    EmbeddedPacking,
    IntegerLattice,
    certified_min_distance,
    complexify,
    density_metrics,
    min_squared_norm,
    scale_by,
)
from utils.errors import (
    CapExceededError,
    DegenerateLatticeError,
    InvalidArgumentError,
    SpecFileError,
    VerificationError,
)
from utils.logger import setup_logger

logger = setup_logger(__name__)

TOLERANCE = 1e-9


@dataclass(frozen=True)
class ConcatenationSpec:
    info: PrimeIdealInfo
    ell: int
    codes: tuple[QaryCode, ...]
    base: IntegerLattice

    @property
    def n(self) -> int:
        return self.base.ambient_dim

    @property
    def Q(self) -> int:
        return self.info.Q

    @property
    def sizes(self) -> list[int]:
        return [code.size for code in self.codes]

    @property
    def points_per_cell(self) -> int:
        return math.prod(self.sizes)


@dataclass(frozen=True)
class Violation:
    code_index: Optional[int]
    message: str

    def __str__(self) -> str:
        where = "spec" if self.code_index is None else f"C_{self.code_index}"
        return f"{where}: {self.message}"


def validate(spec: ConcatenationSpec) -> list[Violation]:
    """
    Check the hypotheses of the concatenation lemma.

    Every code must have length n, alphabet size Q, contain the zero word and
    satisfy d_H(C_i) >= Q^(l-i) d_E^2(P). Codes with one codeword have no
    distance and meet the distance condition vacuously.

    Args:
        spec: Concatenation parameters

    Returns:
        List of violations (empty when the spec is valid)
    """
    violations = []
    if spec.ell < 0:
        return [Violation(None, f"ell {spec.ell} < 0")]
    if len(spec.codes) != spec.ell:
        return [Violation(None, f"{len(spec.codes)} codes given for ell={spec.ell}")]
    if not spec.base.is_full_rank:
        return [Violation(None, f"base lattice has rank {spec.base.rank} < {spec.n}")]

    d2 = min_squared_norm(spec.base) if spec.ell else 0
    for i, code in enumerate(spec.codes):
        if code.alphabet_size != spec.Q:
            violations.append(Violation(i, f"alphabet size {code.alphabet_size} != Q {spec.Q}"))
            continue
        if code.length != spec.n:
            violations.append(Violation(i, f"length {code.length} != n {spec.n}"))
            continue
        if not code.contains_zero:
            violations.append(Violation(i, "does not contain the zero codeword"))
        required = spec.Q ** (spec.ell - i) * d2
        if code.min_distance is not None and code.min_distance < required:
            violations.append(Violation(i, f"d_H {code.min_distance} < {required}"))
    return violations


@dataclass(frozen=True, eq=False)
class ConcatenatedPacking:
    spec: ConcatenationSpec
    packing: EmbeddedPacking
    base_metrics: DensityMetrics
    base_squared_distance: int

    @property
    def points_per_cell(self) -> int:
        return self.packing.num_cosets

    @property
    def real_dim(self) -> int:
        return self.packing.real_dim

    @property
    def lambda_lower(self) -> float:
        """lambda(P) + (1/2n) sum log2 M_i."""
        log2_sizes = sum(math.log2(m) for m in self.spec.sizes)
        return self.base_metrics.exponent + log2_sizes / self.real_dim

    @property
    def required_squared_distance(self) -> int:
        return self.spec.Q ** self.spec.ell * self.base_squared_distance


def _coset_reps(spec: ConcatenationSpec) -> tuple[tuple[EisensteinInt, ...], ...]:
    powers = [spec.info.t ** i for i in range(spec.ell)]
    reps = []
    for words in itertools.product(*(code.codewords for code in spec.codes)):
        vector = []
        for j in range(spec.n):
            total = ZERO
            for power, word in zip(powers, words):
                total = total + power * spec.info.reps[word[j]]
            vector.append(total)
        reps.append(tuple(vector))
    return tuple(reps)


def build(spec: ConcatenationSpec, cap: int = ENUMERATION_CAP) -> ConcatenatedPacking:
    """
    Materialise the concatenated packing as cosets of t^l P.

    Args:
        spec: Valid concatenation parameters
        cap: Largest accepted number of cosets (product of code sizes)

    Returns:
        ConcatenatedPacking
    """
    violations = validate(spec)
    if violations:
        raise InvalidArgumentError("Invalid concatenation: " + "; ".join(str(v) for v in violations))
    if spec.points_per_cell > cap:
        raise CapExceededError(f"{spec.points_per_cell} cosets exceed the cap {cap}")

    base_packing = complexify(spec.base)
    period = scale_by(spec.info.t ** spec.ell, base_packing)
    packing = EmbeddedPacking(
        generators=period.generators,
        coset_reps=_coset_reps(spec),
        declared_det=period.declared_det,
    )
    d2 = min_squared_norm(spec.base)
    metrics = density_metrics(math.sqrt(d2), base_packing.det, base_packing.real_dim)
    logger.info(f"Built concatenation n={spec.n} Q={spec.Q} ell={spec.ell} "
                f"with {packing.num_cosets} cosets")
    return ConcatenatedPacking(spec=spec, packing=packing, base_metrics=metrics,
                               base_squared_distance=d2)


@dataclass(frozen=True)
class Measurement:
    squared_distance: float
    det_per_point: float
    exponent: float
    certified: bool


def measure(pkg: ConcatenatedPacking) -> Measurement:
    """Exhaustive d_E^2, covolume per point and density exponent of a built packing."""
    result = certified_min_distance(pkg.packing)
    metrics = density_metrics(result.distance, pkg.packing.det, pkg.real_dim)
    return Measurement(
        squared_distance=result.squared,
        det_per_point=pkg.packing.det,
        exponent=metrics.exponent,
        certified=result.certified,
    )


def verify(pkg: ConcatenatedPacking) -> Measurement:
    """
    Brute-force check of the lemma's conclusion.

    Raises VerificationError unless the cosets are distinct, the measured
    d_E^2 reaches Q^l d_E^2(P) and the measured exponent reaches lambda_lower.
    """
    if pkg.points_per_cell != pkg.spec.points_per_cell:
        raise VerificationError(
            f"{pkg.points_per_cell} cosets, expected {pkg.spec.points_per_cell}"
        )
    if not pkg.packing.cosets_distinct():
        raise VerificationError("Two coset representatives coincide modulo the period lattice")
    measurement = measure(pkg)
    if measurement.squared_distance < pkg.required_squared_distance - TOLERANCE:
        raise VerificationError(
            f"d_E^2 {measurement.squared_distance} < {pkg.required_squared_distance}"
        )
    if measurement.exponent < pkg.lambda_lower - TOLERANCE:
        raise VerificationError(
            f"measured lambda {measurement.exponent} < lower bound {pkg.lambda_lower}"
        )
    return measurement


@dataclass(frozen=True)
class DensityCheck:
    window: int
    count: int
    measured: float
    expected: float
    tolerance: float

    @property
    def relative_error(self) -> float:
        return abs(self.measured - self.expected) / self.expected

    @property
    def passed(self) -> bool:
        return self.relative_error <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "count": self.count,
            "points_per_volume": self.measured,
            "expected": self.expected,
            "relative_error": self.relative_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _integer_coordinates(vector: Sequence[EisensteinInt]) -> list[int]:
    # (a_1..a_n, b_1..b_n) for the entries a_k + w b_k, matching embed_vector's layout
    return [x.a for x in vector] + [x.b for x in vector]


def triangular_basis(rows: Sequence[Sequence[int]]) -> np.ndarray:
    """
    Upper-triangular basis, stored as columns, of the integer lattice spanned by `rows`.

    Column j has its last non-zero entry (a positive pivot) at index j, so
    coordinate i of W c depends only on c_i, ..., c_(m-1).
    """
    hnf = hermite_normal_form(sympy.Matrix(rows).T)
    W = np.array([[int(x) for x in row] for row in hnf.tolist()], dtype=np.int64).reshape(hnf.shape)
    m = len(rows[0])
    if W.shape != (m, m):
        raise DegenerateLatticeError(f"Rows span rank {W.shape[1]}, need {m}")
    return W


def _box_limits(coordinate: int, states: np.ndarray, window: int,
                complex_dim: Optional[int]) -> tuple[np.ndarray, np.ndarray]:
    """Inclusive range of one integer coordinate keeping the real point inside [-w, w)^N."""
    k = len(states)
    if complex_dim is None:
        return np.full(k, -window), np.full(k, window - 1)
    if coordinate >= complex_dim:
        # -w <= (sqrt(3)/2) b < w, never tight for b != 0
        b_max = math.isqrt(4 * window * window // 3)
        return np.full(k, -b_max), np.full(k, b_max)
    # -2w <= 2a - b < 2w, b already fixed
    b = states[:, coordinate + complex_dim]
    return -((2 * window - b) // 2), (b + 2 * window - 1) // 2


def _expand(states: np.ndarray, c_lo: np.ndarray, sizes: np.ndarray, column: np.ndarray) -> np.ndarray:
    owners = np.repeat(np.arange(len(states)), sizes)
    firsts = np.repeat(np.cumsum(sizes) - sizes, sizes)
    c = c_lo[owners] + (np.arange(owners.size) - firsts)
    return states[owners] + c[:, None] * column[None, :]


def count_box_points(W: np.ndarray, shifts: np.ndarray, window: int,
                     complex_dim: Optional[int] = None) -> int:
    """
    Count the points of the cosets W Z^m + s inside the half-open box of half side `window`.

    Coordinates are fixed from the last to the first; each one ranges over an
    exact interval given the ones already fixed, so no point outside the box
    is generated. With `complex_dim` set, integer vectors are read as
    (a, b) coordinates of O_K^n and the box applies to their embedding.
    """

    def count(states: np.ndarray, i: int) -> int:
        lo, hi = _box_limits(i, states, window, complex_dim)
        known = states[:, i]
        pivot = W[i, i]
        c_lo = -((known - lo) // pivot)
        sizes = np.maximum((hi - known) // pivot - c_lo + 1, 0)
        if i == 0:
            return int(sizes.sum())
        ends = np.cumsum(sizes)
        total = 0
        start = 0
        while start < len(states):
            limit = (ends[start - 1] if start else 0) + ENUMERATION_CHUNK
            stop = max(start + 1, int(np.searchsorted(ends, limit, side="right")))
            part = slice(start, stop)
            total += count(_expand(states[part], c_lo[part], sizes[part], W[:, i]), i - 1)
            start = stop
        return total

    return count(np.asarray(shifts, dtype=np.int64), W.shape[0] - 1)


def brute_density_check(target: Union[ConcatenatedPacking, EmbeddedPacking, IntegerLattice],
                        window: int) -> DensityCheck:
    """
    Count points in the half-open box [-w, w)^N and compare points per unit
    volume with 1 / det-per-point. Boundary effects are allowed a relative
    error of N / (2w).

    Args:
        target: Packing or full-rank integer lattice
        window: Half side length w of the box

    Returns:
        DensityCheck
    """
    if window < 1:
        raise InvalidArgumentError(f"window must be >= 1, got {window}")
    if isinstance(target, ConcatenatedPacking):
        target = target.packing
    if isinstance(target, IntegerLattice):
        if not target.is_full_rank:
            raise InvalidArgumentError("Density check needs a full-rank lattice")
        W = triangular_basis(target.basis)
        shifts = np.zeros((1, target.ambient_dim), dtype=np.int64)
        complex_dim = None
        det = math.sqrt(target.gram_determinant())
    else:
        W = triangular_basis([_integer_coordinates(g) for g in target.generators])
        shifts = np.array([_integer_coordinates(r) for r in target.coset_reps], dtype=np.int64)
        complex_dim = target.complex_dim
        det = target.det

    N = W.shape[0]
    count = count_box_points(W, shifts, window, complex_dim)
    volume = (2.0 * window) ** N
    check = DensityCheck(window=window, count=count, measured=count / volume,
                         expected=1.0 / det, tolerance=N / (2.0 * window))
    logger.debug(f"Density check N={N} w={window}: {count} points, "
                 f"relative error {check.relative_error:.4f}")
    return check


def construction_report(pkg: ConcatenatedPacking, measurement: Optional[Measurement] = None) -> dict:
    """JSON-ready summary of a construction."""
    report = {
        "n": pkg.spec.n,
        "Q": pkg.spec.Q,
        "ell": pkg.spec.ell,
        "M_list": pkg.spec.sizes,
        "points_per_cell": pkg.points_per_cell,
        "required_d_E2": pkg.required_squared_distance,
        "det_per_point": pkg.packing.det,
        "lambda_lower": pkg.lambda_lower,
    }
    if measurement is not None:
        report["d_E2_measured"] = measurement.squared_distance
        report["lambda_measured"] = measurement.exponent
        report["certified"] = measurement.certified
    return report


def load_spec(path: Union[str, Path]) -> ConcatenationSpec:
    """
    Read a concatenation spec file.

    Format (blank lines and '#' comments ignored):

        prime 2
        ell 1
        basis
        1 0 0 0
        ...
        code rep_4_4.code

    Code paths are relative to the spec file.

    Args:
        path: Spec file

    Returns:
        ConcatenationSpec
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise SpecFileError(f"Cannot read spec file {path}: {e}") from e

    prime = ell = None
    rows: list[list[int]] = []
    code_paths: list[Path] = []
    in_basis = False
    try:
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, rest = line.partition(" ")
            if key == "prime":
                prime, in_basis = int(rest), False
            elif key == "ell":
                ell, in_basis = int(rest), False
            elif key == "basis":
                in_basis = True
            elif key == "code":
                code_paths.append(path.parent / rest.strip())
                in_basis = False
            elif in_basis:
                rows.append([int(x) for x in line.split()])
            else:
                raise SpecFileError(f"{path}: unexpected line '{line}'")
    except ValueError as e:
        raise SpecFileError(f"{path}: non-integer value ({e})") from e

    if prime is None or ell is None or not rows:
        raise SpecFileError(f"{path}: 'prime', 'ell' and 'basis' are required")
    try:
        info = split_prime(prime)
        base = IntegerLattice.from_rows(rows)
    except (InvalidArgumentError, DegenerateLatticeError) as e:
        raise SpecFileError(f"{path}: {e}") from e
    codes = tuple(load_code(p) for p in code_paths)
    return ConcatenationSpec(info=info, ell=ell, codes=codes, base=base)
