"""
Precision back-ends for the closed-form bounds.

A formula is written once against the small interface below and evaluated
either in IEEE double (with compensated summation) or in mpmath extended
precision.
"""
import math
from contextlib import nullcontext
from fractions import Fraction
from typing import ContextManager, Iterable, Union

import mpmath

from config import EXTENDED_DPS, PRECISION_DROP_LOG2

Real = Union[float, mpmath.mpf]


class Accumulator:
    """Running sum carrying its rounding error (error-free two-sum)."""

    def __init__(self, value: float = 0.0):
        self._s = float(value)
        self._t = 0.0

    @staticmethod
    def _two_sum(u: float, v: float) -> tuple[float, float]:
        # u + v == s + t exactly
        s = u + v
        up = s - v
        vpp = s - up
        up -= u
        vpp -= v
        return s, -(up + vpp)

    def add(self, value: float) -> None:
        y, u = self._two_sum(float(value), self._t)
        self._s, self._t = self._two_sum(y, self._s)
        if self._s == 0.0:
            self._s = u
        else:
            self._t += u

    def __float__(self) -> float:
        return self._s + self._t


class DoubleNumerics:
    """IEEE double evaluation."""

    name = "double"
    digits = 15

    def context(self) -> ContextManager:
        return nullcontext()

    def real(self, value) -> float:
        return float(value)

    @property
    def pi(self) -> float:
        return math.pi

    @property
    def e(self) -> float:
        return math.e

    @property
    def ln2(self) -> float:
        return math.log(2.0)

    def log2(self, x) -> float:
        if isinstance(x, int):
            return math.log2(x)
        return math.log2(float(x))

    def ln(self, x) -> float:
        return math.log(x)

    def log1p(self, x) -> float:
        return math.log1p(x)

    def lgamma(self, x) -> float:
        return math.lgamma(x)

    def exp2(self, x) -> float:
        return 2.0 ** float(x)

    def sqrt(self, x) -> float:
        return math.sqrt(x)

    def floor(self, x) -> int:
        return math.floor(x)

    def log2_1p(self, x) -> float:
        """log2(1 + x), dropped to 0 once |x| is below the working threshold."""
        if abs(x) <= 2.0 ** -PRECISION_DROP_LOG2:
            return 0.0
        return math.log1p(x) / math.log(2.0)

    def fsum(self, values: Iterable[Real]) -> float:
        acc = Accumulator()
        for value in values:
            acc.add(value)
        return float(acc)

    def format(self, value: Real) -> str:
        return f"{float(value):.{self.digits}g}"


class ExtendedNumerics:
    """mpmath evaluation at a fixed number of decimal digits."""

    name = "extended"
    digits = 30

    def __init__(self, dps: int = EXTENDED_DPS):
        self.dps = dps

    def context(self) -> ContextManager:
        return mpmath.workdps(self.dps)

    def real(self, value) -> mpmath.mpf:
        if isinstance(value, Fraction):
            return mpmath.mpf(value.numerator) / value.denominator
        return mpmath.mpf(value)

    @property
    def pi(self) -> mpmath.mpf:
        return +mpmath.pi

    @property
    def e(self) -> mpmath.mpf:
        return +mpmath.e

    @property
    def ln2(self) -> mpmath.mpf:
        return +mpmath.ln2

    def log2(self, x) -> mpmath.mpf:
        return mpmath.log(self.real(x), 2)

    def ln(self, x) -> mpmath.mpf:
        return mpmath.log(self.real(x))

    def log1p(self, x) -> mpmath.mpf:
        return mpmath.log1p(self.real(x))

    def lgamma(self, x) -> mpmath.mpf:
        return mpmath.loggamma(self.real(x))

    def exp2(self, x) -> mpmath.mpf:
        return mpmath.power(2, self.real(x))

    def sqrt(self, x) -> mpmath.mpf:
        return mpmath.sqrt(self.real(x))

    def floor(self, x) -> int:
        return int(mpmath.floor(x))

    def log2_1p(self, x) -> mpmath.mpf:
        return mpmath.log1p(self.real(x)) / mpmath.ln2

    def fsum(self, values: Iterable[Real]) -> mpmath.mpf:
        return mpmath.fsum(values)

    def format(self, value: Real) -> str:
        return mpmath.nstr(mpmath.mpf(value), self.digits)


Numerics = Union[DoubleNumerics, ExtendedNumerics]

DOUBLE = DoubleNumerics()


def get_numerics(mode: str = "double", dps: int = EXTENDED_DPS) -> Numerics:
    """
    Return the back-end for a precision mode.

    Args:
        mode: "double" or "extended"
        dps: Decimal digits for extended mode

    Returns:
        Numerics instance
    """
    if mode == "double":
        return DOUBLE
    if mode == "extended":
        return ExtendedNumerics(dps)
    raise ValueError(f"Unknown precision mode: {mode}")
