"""Validation functions for command-line and file input."""
from fractions import Fraction
from typing import Any, Callable, Optional

import sympy

from utils.errors import InvalidArgumentError


def validate_positive_int(value_str: str, minimum: int = 1) -> tuple[bool, Optional[int]]:
    """
    Validate an integer input against a lower bound.

    Args:
        value_str: Integer as string
        minimum: Smallest accepted value

    Returns:
        Tuple of (is_valid, value or None)
    """
    try:
        value = int(str(value_str).strip())
        if value >= minimum:
            return True, value
        return False, None
    except (ValueError, AttributeError):
        return False, None


def validate_prime(value_str: str) -> tuple[bool, Optional[int]]:
    """
    Validate a rational prime.

    Args:
        value_str: Prime as string

    Returns:
        Tuple of (is_valid, prime or None)
    """
    is_valid, value = validate_positive_int(value_str, minimum=2)
    if is_valid and sympy.isprime(value):
        return True, value
    return False, None


def validate_even_exponent(value_str: str) -> tuple[bool, Optional[int]]:
    """
    Validate an exponent r for q = p^r; curve families need r even.

    Args:
        value_str: Exponent as string

    Returns:
        Tuple of (is_valid, exponent or None)
    """
    is_valid, value = validate_positive_int(value_str, minimum=2)
    if is_valid and value % 2 == 0:
        return True, value
    return False, None


def validate_fraction(text: str) -> tuple[bool, Optional[Fraction]]:
    """
    Parse an exact rational such as "1/4000000000" or "2.5e-10".

    Decimal strings are read exactly (no binary rounding).

    Args:
        text: Rational as string

    Returns:
        Tuple of (is_valid, Fraction or None)
    """
    try:
        return True, Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        return False, None


def validate_unit_interval(text: str) -> tuple[bool, Optional[Fraction]]:
    """
    Validate a parameter y in (0, 1].

    Args:
        text: Rational as string

    Returns:
        Tuple of (is_valid, Fraction or None)
    """
    is_valid, value = validate_fraction(text)
    if is_valid and 0 < value <= 1:
        return True, value
    return False, None


def require(validator: Callable[[str], tuple[bool, Any]], value_str: str, name: str) -> Any:
    """
    Run a validator on a command-line value and raise on failure.

    Args:
        validator: One of the validate_* functions
        value_str: Raw value
        name: Flag name used in the error message

    Returns:
        Parsed value
    """
    is_valid, value = validator(value_str)
    if not is_valid:
        raise InvalidArgumentError(f"Invalid value for {name}: {value_str!r}")
    return value
