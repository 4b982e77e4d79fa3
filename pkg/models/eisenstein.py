"""
Exact arithmetic in the Eisenstein integers Z[w], w = (-1 + sqrt(-3)) / 2.

Covers prime-ideal splitting in Q(sqrt(-3)), residue alphabets and the
embedding C -> R^2 used to view O_K^n as a subset of R^(2n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import sympy

from utils.errors import ArithmeticOverflowError, InvalidArgumentError
from utils.logger import setup_logger

logger = setup_logger(__name__)

INT64_MAX = 2 ** 63 - 1
SQRT3_HALF = math.sqrt(3.0) / 2.0


def _checked(value: int) -> int:
    if not -INT64_MAX - 1 <= value <= INT64_MAX:
        raise ArithmeticOverflowError(f"Eisenstein coefficient {value} exceeds 64-bit range")
    return value


@dataclass(frozen=True, order=True)
class EisensteinInt:
    """The element a + b*w of Z[w]."""

    a: int
    b: int = 0

    def __post_init__(self):
        _checked(self.a)
        _checked(self.b)

    @classmethod
    def coerce(cls, value: Union[int, EisensteinInt]) -> EisensteinInt:
        if isinstance(value, EisensteinInt):
            return value
        return cls(int(value), 0)

    def __add__(self, other: Union[int, EisensteinInt]) -> EisensteinInt:
        other = EisensteinInt.coerce(other)
        return EisensteinInt(_checked(self.a + other.a), _checked(self.b + other.b))

    __radd__ = __add__

    def __neg__(self) -> EisensteinInt:
        return EisensteinInt(-self.a, -self.b)

    def __sub__(self, other: Union[int, EisensteinInt]) -> EisensteinInt:
        return self + (-EisensteinInt.coerce(other))

    def __rsub__(self, other: Union[int, EisensteinInt]) -> EisensteinInt:
        return EisensteinInt.coerce(other) - self

    def __mul__(self, other: Union[int, EisensteinInt]) -> EisensteinInt:
        other = EisensteinInt.coerce(other)
        a, b, c, d = self.a, self.b, other.a, other.b
        # w^2 = -1 - w
        return EisensteinInt(
            _checked(a * c - b * d),
            _checked(a * d + b * c - b * d),
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> EisensteinInt:
        if exponent < 0:
            raise InvalidArgumentError("Negative powers are not defined in Z[w]")
        result = EisensteinInt(1)
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self) -> EisensteinInt:
        """Complex conjugate: conj(w) = w^2 = -1 - w."""
        return EisensteinInt(_checked(self.a - self.b), -self.b)

    def norm(self) -> int:
        """Absolute norm a^2 - ab + b^2 (squared complex modulus)."""
        return _checked(self.a * self.a - self.a * self.b + self.b * self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def divides(self, other: EisensteinInt) -> bool:
        """True if self | other in Z[w]."""
        if self.is_zero():
            return other.is_zero()
        product = other * self.conjugate()
        n = self.norm()
        return product.a % n == 0 and product.b % n == 0

    def embed(self) -> tuple[float, float]:
        return embed(self.a, self.b)

    def __str__(self) -> str:
        return f"{self.a}{self.b:+d}ω"


ZERO = EisensteinInt(0, 0)
ONE = EisensteinInt(1, 0)
OMEGA = EisensteinInt(0, 1)


def embed(u, v) -> tuple[float, float]:
    """
    Map u + w*v to R^2 as (u - v/2, (sqrt(3)/2) v).

    The Euclidean length of the image equals the complex modulus of u + w*v.

    Args:
        u: Coefficient of 1
        v: Coefficient of w

    Returns:
        Point in R^2
    """
    u = float(u)
    v = float(v)
    return (u - v / 2.0, SQRT3_HALF * v)


def embed_vector(vector: Sequence[EisensteinInt]) -> list[float]:
    """
    Embed a vector of O_K^n into R^(2n): real parts first, then imaginary parts.

    Args:
        vector: Sequence of Eisenstein integers

    Returns:
        List of 2n real coordinates
    """
    points = [embed(x.a, x.b) for x in vector]
    return [p[0] for p in points] + [p[1] for p in points]


class SplittingKind(str, Enum):
    SPLIT = "Split"
    INERT = "Inert"
    RAMIFIED = "Ramified"


@dataclass(frozen=True)
class PrimeIdealInfo:
    """Splitting data of a rational prime p in Q(sqrt(-3))."""

    p: int
    kind: SplittingKind
    t: EisensteinInt
    Q: int
    reps: tuple[EisensteinInt, ...]

    def __post_init__(self):
        if self.t.norm() != self.Q:
            raise InvalidArgumentError(f"norm({self.t}) != Q={self.Q}")
        if len(self.reps) != self.Q or not self.reps[0].is_zero():
            raise InvalidArgumentError("Residue alphabet must have Q elements starting at zero")

    def reduce(self, x: EisensteinInt) -> int:
        return reduce(x, self)


def _find_generator(norm_value: int) -> EisensteinInt:
    bound = math.isqrt(norm_value) + 2
    for a in range(0, bound + 1):
        for b in range(-bound, bound + 1):
            if a * a - a * b + b * b == norm_value:
                return EisensteinInt(a, b)
    raise InvalidArgumentError(f"No element of norm {norm_value} in Z[w]")


def split_prime(p: int) -> PrimeIdealInfo:
    """
    Splitting data of the prime ideal chosen above p.

    Split (p = 1 mod 3) and ramified (p = 3) primes take the lexicographically
    smallest generator (a, b), a >= 0, of norm p; inert primes use t = p.

    Args:
        p: Rational prime

    Returns:
        PrimeIdealInfo with kind, generator t, norm Q and residue alphabet
    """
    if not isinstance(p, int) or not sympy.isprime(p):
        raise InvalidArgumentError(f"{p} is not a prime")

    if p == 3:
        kind, Q = SplittingKind.RAMIFIED, 3
    elif p % 3 == 1:
        kind, Q = SplittingKind.SPLIT, p
    else:
        kind, Q = SplittingKind.INERT, p * p

    if kind is SplittingKind.INERT:
        t = EisensteinInt(p, 0)
        reps = tuple(EisensteinInt(a, b) for b in range(p) for a in range(p))
    else:
        t = _find_generator(p)
        reps = tuple(EisensteinInt(a, 0) for a in range(p))

    logger.debug(f"Prime {p}: {kind.value}, t={t}, Q={Q}")
    return PrimeIdealInfo(p=p, kind=kind, t=t, Q=Q, reps=reps)


def is_prime_ideal_norm(Q: int) -> bool:
    """True if Q is the norm of some prime ideal of Z[w]: 3, p = 1 mod 3, or p^2 with p = 2 mod 3."""
    if Q == 3:
        return True
    if sympy.isprime(Q):
        return Q % 3 == 1
    root = math.isqrt(Q)
    return root * root == Q and sympy.isprime(root) and root % 3 == 2


def reduce(x: EisensteinInt, info: PrimeIdealInfo) -> int:
    """
    Index j with x = reps[j] (mod the prime ideal).

    Args:
        x: Element to reduce
        info: Prime ideal data

    Returns:
        Index into info.reps
    """
    if info.kind is SplittingKind.INERT:
        return (x.b % info.p) * info.p + (x.a % info.p)
    for index, rep in enumerate(info.reps):
        if info.t.divides(x - rep):
            return index
    raise InvalidArgumentError(f"{x} has no residue in the alphabet of {info.p}")
