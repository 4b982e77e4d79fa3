"""
Integer lattices, their complexification P + wP and packing-density metrics.

Minimum distances are found by exhaustive enumeration of bounded integer
coefficient vectors. Each enumeration also reports the coefficient radius
that certifies the result, so callers can tell an exact minimum from an
upper bound.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from config import ENUMERATION_CHUNK
from models.eisenstein import EisensteinInt, ZERO, embed_vector
from utils.errors import DegenerateLatticeError, InvalidArgumentError
from utils.logger import setup_logger
from utils.numerics import DOUBLE, Numerics, Real

logger = setup_logger(__name__)


OKVector = tuple[EisensteinInt, ...]


def bareiss_determinant(matrix: Sequence[Sequence[int]]) -> int:
    """
    Exact determinant of an integer matrix by fraction-free elimination.

    Args:
        matrix: Square integer matrix

    Returns:
        Determinant as a Python integer
    """
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    previous = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // previous
        previous = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class IntegerLattice:
    """Lattice spanned by integer row vectors in Z^n."""

    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.basis:
            raise DegenerateLatticeError("Empty basis")
        width = len(self.basis[0])
        if any(len(row) != width for row in self.basis):
            raise InvalidArgumentError("Basis rows must share one ambient dimension")
        if self.rank > width:
            raise DegenerateLatticeError(f"Rank {self.rank} exceeds ambient dimension {width}")
        if self.gram_determinant() <= 0:
            raise DegenerateLatticeError("Basis rows are linearly dependent")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> IntegerLattice:
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @property
    def ambient_dim(self) -> int:
        return len(self.basis[0])

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_dim

    def gram(self) -> list[list[int]]:
        return [[sum(x * y for x, y in zip(u, v)) for v in self.basis] for u in self.basis]

    def gram_determinant(self) -> int:
        """det(G) = det(L)^2, exact."""
        return bareiss_determinant(self.gram())

    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class EmbeddedPacking:
    """
    Point set in R^(2n) coming from O_K^n.

    The period lattice is generated by `generators` (vectors of O_K^n); the
    point set is the union of its translates by `coset_reps`. A plain lattice
    has the single coset representative 0.
    """

    generators: tuple[OKVector, ...]
    coset_reps: tuple[OKVector, ...] = ()
    declared_det: Optional[float] = None

    def __post_init__(self):
        if not self.generators:
            raise DegenerateLatticeError("Empty generator list")
        n = len(self.generators[0])
        if len(self.generators) != 2 * n:
            raise DegenerateLatticeError(
                f"{len(self.generators)} generators cannot span R^{2 * n}"
            )
        if not self.coset_reps:
            object.__setattr__(self, "coset_reps", (tuple(ZERO for _ in range(n)),))

    @property
    def complex_dim(self) -> int:
        return len(self.generators[0])

    @property
    def real_dim(self) -> int:
        return 2 * self.complex_dim

    @property
    def num_cosets(self) -> int:
        return len(self.coset_reps)

    @cached_property
    def basis(self) -> np.ndarray:
        return np.array([embed_vector(g) for g in self.generators], dtype=float)

    @cached_property
    def rep_points(self) -> np.ndarray:
        """Coset representatives reduced into the fundamental parallelepiped."""
        reps = np.array([embed_vector(r) for r in self.coset_reps], dtype=float)
        coefficients = np.linalg.solve(self.basis.T, reps.T).T
        return reps - np.floor(coefficients + 1e-9) @ self.basis

    @cached_property
    def computed_det(self) -> float:
        sign, logdet = np.linalg.slogdet(self.basis)
        if sign == 0:
            raise DegenerateLatticeError("Embedded generators are linearly dependent")
        return float(np.exp(logdet))

    @property
    def period_det(self) -> float:
        if self.declared_det is not None:
            return self.declared_det
        return self.computed_det

    @property
    def det(self) -> float:
        """Covolume per point."""
        return self.period_det / self.num_cosets

    def verify_det(self, rel_tol: float = 1e-9) -> None:
        """Recompute the period determinant from the R^(2n) basis and compare."""
        if self.declared_det is None:
            return
        if not math.isclose(self.declared_det, self.computed_det, rel_tol=rel_tol):
            raise DegenerateLatticeError(
                f"Declared det {self.declared_det} disagrees with Gram det {self.computed_det}"
            )

    def cosets_distinct(self) -> bool:
        """True if no two representatives differ by a period-lattice vector."""
        points = self.rep_points
        inverse = np.linalg.inv(self.basis)
        for i in range(len(points) - 1):
            coefficients = (points[i + 1:] - points[i]) @ inverse
            if np.any(np.all(np.abs(coefficients - np.round(coefficients)) < 1e-7, axis=1)):
                return False
        return True


@dataclass(frozen=True)
class MinDistanceResult:
    distance: float
    squared: float
    coeff_bound: int
    certified_radius: int
    exact_squared: Optional[int] = None

    @property
    def certified(self) -> bool:
        return self.coeff_bound >= self.certified_radius


Packing = Union[IntegerLattice, EmbeddedPacking]


def gram_det(packing: Union[Packing, np.ndarray]) -> float:
    """
    Determinant (covolume) sqrt(det G) of a lattice basis.

    Integer bases use exact fraction-free elimination; real bases use numpy.

    Args:
        packing: IntegerLattice, EmbeddedPacking or real basis array

    Returns:
        Lattice determinant
    """
    if isinstance(packing, IntegerLattice):
        return math.sqrt(packing.gram_determinant())
    basis = packing.basis if isinstance(packing, EmbeddedPacking) else np.asarray(packing, dtype=float)
    gram = basis @ basis.T
    sign, logdet = np.linalg.slogdet(gram)
    if sign <= 0:
        raise DegenerateLatticeError("Basis rows are linearly dependent")
    return float(np.exp(logdet / 2.0))


def _radius_per_coordinate(basis: np.ndarray, length: float, coset: bool) -> np.ndarray:
    # |c_i| <= length * ||column i of the pseudo-inverse||
    pinv = np.linalg.pinv(basis)
    column_norms = np.linalg.norm(pinv, axis=0)
    radius = np.floor(length * column_norms + 1e-9).astype(int)
    if coset:
        radius = radius + 1
    return np.maximum(radius, 1)


def coefficient_chunks(bounds: Sequence[int]) -> Iterator[np.ndarray]:
    """Yield all integer vectors c with |c_i| <= bounds[i], in chunks."""
    ranges = [np.arange(-b, b + 1) for b in bounds]
    split = 0
    size = int(np.prod([len(r) for r in ranges]))
    while split < len(ranges) - 1 and size > ENUMERATION_CHUNK:
        size //= len(ranges[split])
        split += 1
    tail = ranges[split:]
    mesh = np.array(np.meshgrid(*tail, indexing="ij")).reshape(len(tail), -1).T
    for head in itertools.product(*ranges[:split]):
        if head:
            prefix = np.broadcast_to(np.array(head), (mesh.shape[0], len(head)))
            yield np.hstack([prefix, mesh])
        else:
            yield mesh


def _enumerate_min_squared(basis: np.ndarray, deltas: np.ndarray, bounds: Sequence[int],
                           exact: bool) -> float:
    best = math.inf
    for coefficients in coefficient_chunks(bounds):
        vectors = coefficients @ basis
        for index, delta in enumerate(deltas):
            shifted = vectors + delta if index else vectors
            squared = np.einsum("ij,ij->i", shifted, shifted)
            if index == 0:
                squared = squared[np.any(coefficients != 0, axis=1)]
            if squared.size:
                best = min(best, squared.min())
    if exact:
        return int(best)
    return float(best)


def _deltas(packing: Packing) -> np.ndarray:
    if isinstance(packing, IntegerLattice):
        return np.zeros((1, packing.ambient_dim), dtype=np.int64)
    points = packing.rep_points
    rows = [np.zeros(packing.real_dim)]
    for i, j in itertools.combinations(range(len(points)), 2):
        rows.append(points[i] - points[j])
    return np.array(rows)


def _min_distance(packing: Packing, bounds: Sequence[int], coeff_bound: int) -> MinDistanceResult:
    exact = isinstance(packing, IntegerLattice)
    basis = packing.matrix() if exact else packing.basis
    deltas = _deltas(packing)
    logger.debug(f"Enumerating {int(np.prod([2 * b + 1 for b in bounds]))} coefficient vectors "
                 f"against {len(deltas)} offsets")
    squared = _enumerate_min_squared(basis, deltas, bounds, exact)
    if math.isinf(squared):
        raise DegenerateLatticeError("Enumeration found no nonzero vector")
    distance = math.sqrt(squared)
    radius = _radius_per_coordinate(np.asarray(basis, dtype=float), distance,
                                    coset=not exact and packing.num_cosets > 1)
    return MinDistanceResult(
        distance=distance,
        squared=float(squared),
        coeff_bound=coeff_bound,
        certified_radius=int(radius.max()),
        exact_squared=int(squared) if exact else None,
    )


def min_distance(packing: Packing, coeff_bound: int) -> MinDistanceResult:
    """
    Minimum nonzero distance over coefficient vectors in [-bound, bound]^rank.

    The value is an upper bound on d_E; it is exact when `certified` holds.

    Args:
        packing: IntegerLattice or EmbeddedPacking
        coeff_bound: Coefficient range (>= 1)

    Returns:
        MinDistanceResult
    """
    if coeff_bound < 1:
        raise InvalidArgumentError(f"coeff_bound must be >= 1, got {coeff_bound}")
    rank = packing.rank if isinstance(packing, IntegerLattice) else packing.real_dim
    return _min_distance(packing, [coeff_bound] * rank, coeff_bound)


def certified_min_distance(packing: Packing) -> MinDistanceResult:
    """
    Exact minimum distance: a first pass with radius 1 gives an upper bound,
    which fixes the per-coordinate radius that certifies the second pass.

    Args:
        packing: IntegerLattice or EmbeddedPacking

    Returns:
        MinDistanceResult with certified == True
    """
    first = min_distance(packing, 1)
    exact = isinstance(packing, IntegerLattice)
    basis = np.asarray(packing.matrix() if exact else packing.basis, dtype=float)
    radius = _radius_per_coordinate(basis, first.distance,
                                    coset=not exact and packing.num_cosets > 1)
    if radius.max() <= 1:
        return MinDistanceResult(first.distance, first.squared, 1, 1, first.exact_squared)
    second = _min_distance(packing, [int(r) for r in radius], int(radius.max()))
    logger.debug(f"Certified min distance {second.distance} with radii {radius.tolist()}")
    return MinDistanceResult(second.distance, second.squared, int(radius.max()),
                             int(radius.max()), second.exact_squared)


def min_squared_norm(lattice: IntegerLattice) -> int:
    """Exact d_E^2 of an integer lattice."""
    return certified_min_distance(lattice).exact_squared


def root_lattice_A(n: int) -> IntegerLattice:
    """
    The root lattice A_{n-1} = {x in Z^n : sum x_i = 0} with basis e_i - e_{i+1}.

    Args:
        n: Ambient dimension (>= 2)

    Returns:
        IntegerLattice of rank n - 1
    """
    if n < 2:
        raise InvalidArgumentError(f"A_(n-1) needs n >= 2, got {n}")
    rows = []
    for i in range(n - 1):
        row = [0] * n
        row[i] = 1
        row[i + 1] = -1
        rows.append(row)
    return IntegerLattice.from_rows(rows)


def augment(lattice: IntegerLattice, chi: int) -> IntegerLattice:
    """
    Dimension augmentation: append (0, ..., 0, chi) to a rank n-1 zero-sum lattice.

    det(B) = (|chi| / sqrt(n)) det(L) and d_E(B) >= min(d_E(L), |chi| / sqrt(n)).

    Args:
        lattice: Full-rank sublattice of A_{n-1}
        chi: Nonzero integer

    Returns:
        Rank-n IntegerLattice
    """
    if chi == 0:
        raise InvalidArgumentError("chi must be nonzero")
    n = lattice.ambient_dim
    if lattice.rank != n - 1:
        raise InvalidArgumentError(f"Expected rank {n - 1}, got {lattice.rank}")
    for row in lattice.basis:
        if sum(row) != 0:
            raise InvalidArgumentError(f"Row {row} does not lie in the zero-sum hyperplane")
    extra = tuple([0] * (n - 1) + [int(chi)])
    return IntegerLattice(lattice.basis + (extra,))


def complexify(lattice: IntegerLattice, verify: bool = False) -> EmbeddedPacking:
    """
    The packing P + wP in R^(2n) of a full-rank P in Z^n.

    det(P + wP) = (sqrt(3)/2)^n det(P)^2 and d_E(P + wP) = d_E(P).

    Args:
        lattice: Full-rank integer lattice
        verify: Recompute the determinant from the R^(2n) basis and compare

    Returns:
        EmbeddedPacking with the determinant cached
    """
    if not lattice.is_full_rank:
        raise DegenerateLatticeError(
            f"complexify needs full rank, got rank {lattice.rank} in Z^{lattice.ambient_dim}"
        )
    n = lattice.ambient_dim
    real_part = tuple(tuple(EisensteinInt(x, 0) for x in row) for row in lattice.basis)
    omega_part = tuple(tuple(EisensteinInt(0, x) for x in row) for row in lattice.basis)
    det_p_squared = lattice.gram_determinant()
    declared = (math.sqrt(3.0) / 2.0) ** n * det_p_squared
    packing = EmbeddedPacking(generators=real_part + omega_part, declared_det=declared)
    if verify:
        packing.verify_det()
    return packing


def scale_by(t: EisensteinInt, packing: EmbeddedPacking) -> EmbeddedPacking:
    """
    Multiply every complex coordinate by t.

    d_E scales by sqrt(norm t), det by norm(t)^n.

    Args:
        t: Eisenstein integer
        packing: O_K-module packing (complexify or concatenation output)

    Returns:
        Scaled EmbeddedPacking
    """
    if t.is_zero():
        raise InvalidArgumentError("Cannot scale by zero")
    generators = tuple(tuple(t * x for x in g) for g in packing.generators)
    reps = tuple(tuple(t * x for x in r) for r in packing.coset_reps)
    declared = None
    if packing.declared_det is not None:
        declared = packing.declared_det * t.norm() ** packing.complex_dim
    return EmbeddedPacking(generators=generators, coset_reps=reps, declared_det=declared)


def log2_unit_ball_volume(N: int, numerics: Numerics = DOUBLE) -> Real:
    """log2 V_N via log-gamma: (N/2) log2(pi) - log2 Gamma(N/2 + 1)."""
    if N < 1:
        raise InvalidArgumentError(f"Dimension must be >= 1, got {N}")
    with numerics.context():
        half = numerics.real(N) / 2
        return half * numerics.log2(numerics.pi) - numerics.lgamma(half + 1) / numerics.ln2


def unit_ball_volume(N: int) -> float:
    """Volume V_N of the unit ball in R^N."""
    return 2.0 ** log2_unit_ball_volume(N)


def stirling_log2_unit_ball_volume(N: int, numerics: Numerics = DOUBLE) -> Real:
    """
    Stirling form -(N/2) log2(N / (2 pi e)) - (1/2) log2(N pi).

    The exact log2 V_N lies below this by less than log2(e) / (6N). Near that
    bound the margin drops under double resolution, so compare in extended
    precision for large N.
    """
    if N < 1:
        raise InvalidArgumentError(f"Dimension must be >= 1, got {N}")
    with numerics.context():
        n = numerics.real(N)
        return -(n / 2) * numerics.log2(n / (2 * numerics.pi * numerics.e)) - numerics.log2(n * numerics.pi) / 2


@dataclass(frozen=True)
class DensityMetrics:
    density: float
    center_density: float
    exponent: float
    log2_density: float = field(repr=False, default=0.0)


def density_metrics(d_E: float, det: float, N: int) -> DensityMetrics:
    """
    Density, center density and density exponent of a packing.

    Delta = (d_E/2)^N V_N / det, delta = Delta / V_N, lambda = log2(Delta) / N,
    all computed in log space.

    Args:
        d_E: Minimum distance (> 0)
        det: Covolume per point (> 0)
        N: Real dimension

    Returns:
        DensityMetrics
    """
    if d_E <= 0 or det <= 0 or N < 1:
        raise InvalidArgumentError(f"Need d_E > 0, det > 0, N >= 1 (got {d_E}, {det}, {N})")
    log2_v = log2_unit_ball_volume(N)
    log2_delta = N * math.log2(d_E / 2.0) + log2_v - math.log2(det)
    return DensityMetrics(
        density=2.0 ** log2_delta,
        center_density=2.0 ** (log2_delta - log2_v),
        exponent=log2_delta / N,
        log2_density=log2_delta,
    )
