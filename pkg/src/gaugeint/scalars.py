"""Scalar backends: exact rationals and binary floats.

A scalar is either a ``fractions.Fraction`` (exact backend, closed under
+,-,*, and division by nonzero) or a ``float``.  The two backends are never
mixed silently inside one computation; every vector and every function
declares its backend and conversions are explicit.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .errors import BackendMismatchError

Scalar = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"

#: Absolute tolerance used when float-backend quantities are compared.
FLOAT_TOL = 1e-9


def backend_of(x: Scalar) -> str:
    if isinstance(x, Fraction):
        return RATIONAL
    if isinstance(x, float):
        return FLOAT
    if isinstance(x, int):
        return RATIONAL
    raise TypeError(f"not a scalar: {x!r}")


def coerce(x, backend: str) -> Scalar:
    """Convert ``x`` to the requested backend (explicit, never silent)."""
    if backend == RATIONAL:
        if isinstance(x, float):
            return Fraction(x).limit_denominator(10**18) if not x.is_integer() else Fraction(int(x))
        return Fraction(x)
    if backend == FLOAT:
        return float(x)
    raise ValueError(f"unknown backend {backend!r}")


def as_scalar(x) -> Scalar:
    """Normalize ints to exact Fractions; pass Fractions and floats through."""
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, float)):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"not a scalar: {x!r}")


def check_same_backend(a: str, b: str) -> str:
    if a != b:
        raise BackendMismatchError(f"cannot mix {a} and {b} scalars in one computation")
    return a


def format_scalar(x: Scalar) -> str:
    """Canonical text form: ``p/q`` with gcd(p,q)=1, q>0, or a shortest
    round-trip decimal for floats."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    return repr(float(x))


def parse_scalar(s: str) -> Scalar:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    try:
        return Fraction(int(s))
    except ValueError:
        return float(s)


def scalar_sqrt(x: Scalar) -> float:
    """Square root, always in float (used by the Euclidean norm)."""
    if x < 0:
        raise ValueError("sqrt of negative scalar")
    return math.sqrt(float(x))


def ceil_div(x: Scalar) -> int:
    """Smallest integer >= x."""
    if isinstance(x, Fraction):
        return -((-x.numerator) // x.denominator)
    return math.ceil(x)
