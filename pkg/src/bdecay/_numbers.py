"""Number-representation plumbing: exact rationals plus mpmath big floats.

Rates and coefficients are kept as `fractions.Fraction` whenever they were
constructed from exact inputs (int / Fraction / decimal strings), so that
polynomial identities can be checked with equality instead of tolerances.
Conversion to binary floats happens only at explicitly chosen precision.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import mpmath
from mpmath import mp

Number = object  # Fraction | int | float | mpmath.mpf


def is_exact(x) -> bool:
    """True when x is an exact rational (int or Fraction)."""
    return isinstance(x, Rational)


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def as_number(x):
    """Canonicalize a rate-like input: ints become Fractions, floats stay."""
    if isinstance(x, bool):
        raise TypeError("bool is not a valid rate")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, (float, mpmath.mpf)):
        return x
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"unsupported numeric type: {type(x)!r}")


def to_mpf(x) -> mpmath.mpf:
    """Convert to mpf at the *current* mpmath working precision."""
    if isinstance(x, Rational):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def to_float(x) -> float:
    if isinstance(x, Rational):
        return x.numerator / x.denominator
    return float(x)


def nstr(x, digits: int = 17) -> str:
    """Decimal string with `digits` significant digits (round-trippable)."""
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, digits, strip_zeros=True)
    return f"{to_float(x):.{digits}g}"
