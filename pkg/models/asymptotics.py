"""
Closed-form asymptotic density-exponent bounds.

Every bound is reported as a lattice term plus a codes term. All logarithms
are base 2. Huge q = p^r is never materialised: formulas consume log2 q and
the corrections log2(1 +- 1/q), which are dropped in double precision once
1/q is negligible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Union

import sympy

from models.coding import entropy_from_log2
from models.eisenstein import is_prime_ideal_norm
from utils.errors import BoundDomainError, InvalidArgumentError
from utils.logger import setup_logger
from utils.numerics import DOUBLE, Numerics, Real

logger = setup_logger(__name__)

XING_REFERENCE = "-1.26532181415209410650824899158"
ELL_EPSILON = 1e-12

YValue = Union[Fraction, float, int, str]


class BoundFamily(str, Enum):
    RING_OF_INTEGERS = "RingOfIntegers"
    GENERAL = "General"
    PRINCIPAL = "Principal"
    CONGRUENCE = "Congruence"
    RT_PRINCIPAL = "RTPrincipal"
    RT_CONGRUENCE = "RTCongruence"


@dataclass(frozen=True)
class PrimePower:
    """q = p^r, carried through its logarithms."""

    p: int
    r: int

    def __post_init__(self):
        if not sympy.isprime(self.p):
            raise InvalidArgumentError(f"{self.p} is not a prime")
        if self.r < 1:
            raise InvalidArgumentError(f"Exponent must be >= 1, got {self.r}")

    def require_even(self) -> PrimePower:
        if self.r % 2:
            raise InvalidArgumentError(f"Curve families need an even power of a prime, got r={self.r}")
        return self

    @property
    def log2_q(self) -> float:
        return self.r * math.log2(self.p)

    @property
    def value(self) -> Optional[int]:
        """q as an integer, only while it is small enough to be useful."""
        if self.log2_q > 50:
            return None
        return self.p ** self.r

    def log2(self, numerics: Numerics = DOUBLE) -> Real:
        return self.r * numerics.log2(self.p)

    def ln(self, numerics: Numerics = DOUBLE) -> Real:
        return self.r * numerics.ln(self.p)

    def log2_1p_inverse(self, sign: int, numerics: Numerics = DOUBLE) -> Real:
        """log2(1 + sign/q)."""
        inverse = numerics.exp2(-self.log2(numerics))
        return numerics.log2_1p(sign * inverse)

    def __str__(self) -> str:
        return f"{self.p}^{self.r}"


@dataclass
class BoundReport:
    family: BoundFamily
    Q: int
    ell: int
    lattice_term: Real
    codes_term: Real
    c: Optional[Real] = None
    q: Optional[PrimePower] = None
    y: Optional[Fraction] = None
    numerics: str = "double"
    lambda_lower: Real = field(init=False)

    def __post_init__(self):
        self.lambda_lower = self.lattice_term + self.codes_term

    @property
    def key(self) -> tuple:
        return (self.Q, self.q.p if self.q else 0, self.q.r if self.q else 0)

    def to_dict(self) -> dict:
        data = {
            "family": self.family.value,
            "Q": self.Q,
            "p": self.q.p if self.q else None,
            "r": self.q.r if self.q else None,
            "ell": self.ell,
            "c": self.c,
            "lattice_term": self.lattice_term,
            "codes_term": self.codes_term,
            "lambda_lower": self.lambda_lower,
        }
        if self.y is not None:
            data["y"] = self.y
        return data


def _as_fraction(y: YValue) -> Fraction:
    try:
        return Fraction(str(y)) if not isinstance(y, Fraction) else y
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidArgumentError(f"Cannot read y = {y!r}") from e


def _check_y(y: YValue) -> Fraction:
    y = _as_fraction(y)
    if not 0 < y <= 1:
        raise InvalidArgumentError(f"y must lie in (0, 1], got {y}")
    return y


def _check_norm(Q: int) -> None:
    if not is_prime_ideal_norm(Q):
        raise InvalidArgumentError(f"{Q} is not the norm of a prime ideal of Z[w]")


def code_levels(Q: int, log2_c2: Real, numerics: Numerics = DOUBLE) -> int:
    """
    Number of code levels l = floor(log_Q((Q-1) / (c^2 Q))), clamped at 0.

    Raises BoundDomainError if Q^l c^2 exceeds (Q-1)/Q.
    """
    log2_limit = numerics.log2(numerics.real(Fraction(Q - 1, Q)))
    log2_Q = numerics.log2(Q)
    ell = numerics.floor((log2_limit - log2_c2) / log2_Q + ELL_EPSILON)
    if ell < 0:
        logger.warning(f"Code level count {ell} < 0 for Q={Q}; using the lattice-only bound")
        return 0
    if ell * log2_Q + log2_c2 > log2_limit + ELL_EPSILON:
        raise BoundDomainError(f"Q^ell c^2 exceeds (Q-1)/Q for Q={Q}, ell={ell}")
    return ell


def codes_sum(Q: int, ell: int, log2_c2: Real, numerics: Numerics = DOUBLE) -> Real:
    """(1/2) log2 Q * sum_{k=1..l} (1 - H_Q(Q^k c^2)), compensated."""
    if ell == 0:
        return numerics.real(0)
    log2_Q = numerics.log2(Q)
    terms = (1 - entropy_from_log2(Q, k * log2_Q + log2_c2, numerics) for k in range(1, ell + 1))
    return log2_Q / 2 * numerics.fsum(terms)


def _concat_report(family: BoundFamily, Q: int, log2_c2: Real, lattice_term: Real,
                   numerics: Numerics, q: Optional[PrimePower] = None,
                   y: Optional[Fraction] = None) -> BoundReport:
    ell = code_levels(Q, log2_c2, numerics)
    return BoundReport(
        family=family,
        Q=Q,
        ell=ell,
        lattice_term=lattice_term,
        codes_term=codes_sum(Q, ell, log2_c2, numerics),
        c=numerics.exp2(log2_c2 / 2),
        q=q,
        y=y,
        numerics=numerics.name,
    )


def ring_of_integers_bound(Q: int, ell: int, numerics: Numerics = DOUBLE) -> BoundReport:
    """
    Bound for concatenating l GV codes onto O_K^n.

    lattice_term = -1 + (1/2) log2(2 pi e) - (1/4) log2 3 - (l/2) log2 Q and
    codes_term = (1/2) log2 Q * sum_{i<l} (1 - H'_Q(Q^-i)).

    Args:
        Q: Prime-ideal norm
        ell: Number of code levels (>= 0)
        numerics: Precision back-end

    Returns:
        BoundReport
    """
    _check_norm(Q)
    if ell < 0:
        raise InvalidArgumentError(f"ell must be >= 0, got {ell}")
    with numerics.context():
        log2_Q = numerics.log2(Q)
        lattice = (-1 + numerics.log2(2 * numerics.pi * numerics.e) / 2
                   - numerics.log2(3) / 4 - ell * log2_Q / 2)
        # H'(1) = 1, so the i = 0 level contributes nothing
        terms = (1 - entropy_from_log2(Q, -i * log2_Q, numerics) for i in range(1, ell))
        codes = log2_Q / 2 * numerics.fsum(terms) if ell > 1 else numerics.real(0)
        return BoundReport(BoundFamily.RING_OF_INTEGERS, Q=Q, ell=ell, lattice_term=lattice,
                           codes_term=codes, numerics=numerics.name)


def general_concat_bound(Q: int, c2, delta, numerics: Numerics = DOUBLE) -> BoundReport:
    """
    Bound for concatenating GV codes onto a family with d_E >= c sqrt(n).

    Args:
        Q: Prime-ideal norm
        c2: c^2 in (0, 1]
        delta: limsup (1/n) log2 det(L_n)
        numerics: Precision back-end

    Returns:
        BoundReport with lattice_term = (1/2) log2(c^2 pi e / (2 sqrt 3)) - delta
    """
    if not 0 < c2 <= 1:
        raise InvalidArgumentError(f"c^2 must lie in (0, 1], got {c2}")
    with numerics.context():
        log2_c2 = numerics.log2(numerics.real(c2))
        return _general_from_log2(Q, log2_c2, numerics.real(delta), numerics)


def _general_from_log2(Q: int, log2_c2: Real, delta: Real, numerics: Numerics) -> BoundReport:
    lattice = (log2_c2 + numerics.log2(numerics.pi * numerics.e)
               - 1 - numerics.log2(3) / 2) / 2 - delta
    return _concat_report(BoundFamily.GENERAL, Q, log2_c2, lattice, numerics)


def _tail(q: PrimePower, numerics: Numerics) -> Real:
    # (sqrt q / (sqrt q - 1)) log2 q - log2 q
    log2_q = q.log2(numerics)
    s = numerics.exp2(-log2_q / 2)
    return log2_q * s / (1 - s)


def principal_log2_c2(q: PrimePower, numerics: Numerics = DOUBLE) -> Real:
    """log2 c^2 with c^2 = 2 / (q + 1)."""
    return 1 - q.log2(numerics) - q.log2_1p_inverse(+1, numerics)


def congruence_log2_c2(q: PrimePower, y: Fraction, numerics: Numerics = DOUBLE) -> Real:
    """log2 c^2 with c^2 = y / ln q."""
    return numerics.log2(numerics.real(y)) - numerics.log2(q.ln(numerics))


def principal_delta(q: PrimePower, numerics: Numerics = DOUBLE) -> Real:
    """limsup (1/n) log2 det of the augmented principal lattices."""
    q.require_even()
    with numerics.context():
        return _tail(q, numerics) - q.log2_1p_inverse(-1, numerics)


def congruence_delta(q: PrimePower, y: YValue, numerics: Numerics = DOUBLE) -> Real:
    """limsup (1/n) log2 det of the augmented congruence lattices."""
    q.require_even()
    y = _check_y(y)
    with numerics.context():
        log2_e = 1 / numerics.ln2
        return (_tail(q, numerics) - q.log2_1p_inverse(-1, numerics)
                + numerics.real(y) / 2 * log2_e)


def _principal_lattice(q: PrimePower, numerics: Numerics) -> Real:
    log2_q = q.log2(numerics)
    return (numerics.log2(numerics.pi * numerics.e) / 2 - log2_q / 2 - _tail(q, numerics)
            - q.log2_1p_inverse(+1, numerics) / 2 + q.log2_1p_inverse(-1, numerics)
            - numerics.log2(3) / 4)


def _congruence_lattice(q: PrimePower, y: Fraction, numerics: Numerics) -> Real:
    y_real = numerics.real(y)
    log2_e = 1 / numerics.ln2
    return (numerics.log2(numerics.pi / 2) / 2 - numerics.log2(q.ln(numerics)) / 2
            - _tail(q, numerics) + q.log2_1p_inverse(-1, numerics)
            + numerics.log2(y_real) / 2 + (1 - y_real) / 2 * log2_e
            - numerics.log2(3) / 4)


def principal_bound(Q: int, q: PrimePower, numerics: Numerics = DOUBLE) -> BoundReport:
    """
    Codes concatenated onto augmented principal lattices (c^2 = 2/(q+1)).

    Args:
        Q: Prime-ideal norm
        q: Even prime power
        numerics: Precision back-end

    Returns:
        BoundReport
    """
    _check_norm(Q)
    q.require_even()
    with numerics.context():
        return _concat_report(BoundFamily.PRINCIPAL, Q, principal_log2_c2(q, numerics),
                              _principal_lattice(q, numerics), numerics, q=q)


def congruence_bound(Q: int, q: PrimePower, y: YValue, numerics: Numerics = DOUBLE) -> BoundReport:
    """
    Codes concatenated onto augmented congruence lattices (c^2 = y / ln q).

    Args:
        Q: Prime-ideal norm
        q: Even prime power
        y: Divisor-degree parameter in (0, 1]
        numerics: Precision back-end

    Returns:
        BoundReport
    """
    _check_norm(Q)
    q.require_even()
    y = _check_y(y)
    with numerics.context():
        return _concat_report(BoundFamily.CONGRUENCE, Q, congruence_log2_c2(q, y, numerics),
                              _congruence_lattice(q, y, numerics), numerics, q=q, y=y)


def rt_principal_baseline(q: PrimePower, numerics: Numerics = DOUBLE) -> Real:
    """Density exponent bound of the augmented principal lattices alone."""
    q.require_even()
    with numerics.context():
        return _principal_lattice(q, numerics) + numerics.log2(3) / 4


def rt_congruence_baseline(q: PrimePower, y: YValue, numerics: Numerics = DOUBLE) -> Real:
    """Density exponent bound of the augmented congruence lattices alone."""
    q.require_even()
    y = _check_y(y)
    with numerics.context():
        return _congruence_lattice(q, y, numerics) + numerics.log2(3) / 4


def rt_report(family: BoundFamily, q: PrimePower, y: Optional[YValue] = None,
              numerics: Numerics = DOUBLE) -> BoundReport:
    """A baseline wrapped as a report with an empty codes term."""
    if family is BoundFamily.RT_PRINCIPAL:
        value = rt_principal_baseline(q, numerics)
    elif family is BoundFamily.RT_CONGRUENCE:
        y = _check_y(y)
        value = rt_congruence_baseline(q, y, numerics)
    else:
        raise InvalidArgumentError(f"{family.value} is not a baseline family")
    return BoundReport(family, Q=1, ell=0, lattice_term=value, codes_term=numerics.real(0),
                       q=q, y=y, numerics=numerics.name)


def xing_reference_constant(numerics: Numerics = DOUBLE) -> Real:
    """
    Printed optimum of the earlier P-adic construction (Q=4, z=0.3049).

    Stored, not computed: its formula is not reproduced here.
    """
    with numerics.context():
        return numerics.real(XING_REFERENCE)


@dataclass(frozen=True)
class ComponentialTable:
    principal: BoundReport
    congruence: BoundReport

    def rows(self) -> list[tuple[str, Real, Real]]:
        return [
            ("lambda", self.principal.lambda_lower, self.congruence.lambda_lower),
            ("ell", self.principal.ell, self.congruence.ell),
            ("c", self.principal.c, self.congruence.c),
            ("lattice", self.principal.lattice_term, self.congruence.lattice_term),
            ("codes", self.principal.codes_term, self.congruence.codes_term),
        ]


def componential_table(Q: int = 4, p: int = 11, r: int = 94, y: YValue = Fraction(1, 4_000_000_000),
                       numerics: Numerics = DOUBLE) -> ComponentialTable:
    """Principal and congruence decompositions side by side for one (Q, q, y)."""
    q = PrimePower(p, r)
    return ComponentialTable(
        principal=principal_bound(Q, q, numerics),
        congruence=congruence_bound(Q, q, y, numerics),
    )


@dataclass(frozen=True)
class XingOffsets:
    ratios: tuple[float, ...]
    target: float
    tolerance: float

    @property
    def hits(self) -> int:
        return sum(1 for z in self.ratios if abs(z - self.target) <= self.tolerance)


def xing_offsets(c: float, Q: int, n_values: Iterable[int], target: float = 0.3049,
                 tolerance: float = 1e-3) -> XingOffsets:
    """
    Ratios x / Q^ceil(log_Q x) for x = ceil(c sqrt n).

    The earlier construction needs this ratio to approach the optimal z; the
    result counts how many n land within `tolerance` of `target`.

    Args:
        c: Distance coefficient (d_E >= c sqrt n)
        Q: Prime-ideal norm
        n_values: Dimensions to test
        target: Ratio to compare with
        tolerance: Accepted absolute deviation

    Returns:
        XingOffsets
    """
    if c <= 0:
        raise InvalidArgumentError(f"c must be positive, got {c}")
    ratios = []
    for n in n_values:
        x = math.ceil(c * math.sqrt(n))
        exponent = 0
        while Q ** exponent < x:
            exponent += 1
        ratios.append(x / Q ** exponent)
    return XingOffsets(ratios=tuple(ratios), target=target, tolerance=tolerance)
